#ifndef IDEPNN_STANDOFF_HPP
#define IDEPNN_STANDOFF_HPP

#include <string>
#include <vector>

#include "idepnn/corpus.hpp"

namespace idepnn {

// Builds a Document from standoff annotation over pre-parsed sentences.
//   a1 entity lines:   T<id>\t<TYPE> <start> <end>\t<text>
//   a2 relation lines: R<id>\t<LABEL> <role1>:T<i> <role2>:T<j>
// Each entity's character range maps to the minimal token span covering it;
// every token must carry a character span. Offsets count Unicode scalar
// values, matching the TokenRange convention.
// Throws DataError when an entity is not coverable by tokens of a single
// sentence or a relation argument dangles.
Document import_standoff(const std::string& doc_id, const std::string& text,
                         const std::string& a1, const std::string& a2,
                         std::vector<Sentence> sentences);

}  // namespace idepnn

#endif
