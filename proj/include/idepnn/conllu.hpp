#ifndef IDEPNN_CONLLU_HPP
#define IDEPNN_CONLLU_HPP

#include <string>
#include <vector>

#include "idepnn/corpus.hpp"

namespace idepnn {

// Parses 10-column CoNLL-U text. Sentences are blank-line separated, comment
// lines start with '#'. Multiword-token ranges ("3-4") and empty nodes
// ("5.1") are skipped; only the basic HEAD/DEPREL tree is read. A MISC entry
// `TokenRange=<start>-<end>` fills the token's character span.
// Throws DataError with sentence ordinal and line number on malformed input.
std::vector<Sentence> parse_conllu(const std::string& text);

}  // namespace idepnn

#endif
