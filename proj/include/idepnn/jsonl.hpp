#ifndef IDEPNN_JSONL_HPP
#define IDEPNN_JSONL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "idepnn/corpus.hpp"

namespace idepnn {

// Canonical corpus format: one document per line,
//   {"id", "sentences":[{"tokens":[{"form","pos","head","deprel","start","end"}]}],
//    "mentions":[{"id","sentence","first","last","etype"}],
//    "relations":[{"e1","e2","label"}]}
// start/end are optional. Every document is validated on load; errors carry
// the line number or document id.
Corpus load_jsonl(std::istream& in);
Corpus load_jsonl_file(const std::string& path);
Corpus load_jsonl_text(const std::string& text);

void save_jsonl(const Corpus& corpus, std::ostream& out);
void save_jsonl_file(const Corpus& corpus, const std::string& path);

// Schema file: {"labels":[{"label","role1","role2"}]}
RelationSchema load_schema_file(const std::string& path);
RelationSchema schema_from_json_text(const std::string& text);

// Candidate list: one {"doc","e1","e2","label","sentence_distance"} per line.
void save_candidates_jsonl(const std::vector<CandidatePair>& candidates, std::ostream& out);
std::vector<CandidatePair> load_candidates_jsonl(std::istream& in);

}  // namespace idepnn

#endif
