#include "idepnn/standoff.hpp"

#include <sstream>

#include "idepnn/errors.hpp"

namespace idepnn {

namespace {

struct RawEntity {
  std::string id;
  std::string etype;
  long start = 0;
  long end = 0;
};

// "T1\tBacteria 0 10\tBifidobacterium"
RawEntity parse_entity_line(const std::string& line, int line_no) {
  const std::string where = "a1 line " + std::to_string(line_no);
  const std::size_t tab1 = line.find('\t');
  if (tab1 == std::string::npos || line.empty() || line[0] != 'T') {
    throw DataError(where + ": expected 'T<id>\\t<TYPE> <start> <end>\\t<text>'");
  }
  std::size_t tab2 = line.find('\t', tab1 + 1);
  if (tab2 == std::string::npos) tab2 = line.size();
  RawEntity ent;
  ent.id = line.substr(0, tab1);
  const std::string middle = line.substr(tab1 + 1, tab2 - tab1 - 1);
  if (middle.find(';') != std::string::npos) {
    throw DataError(where + ": discontinuous span on entity " + ent.id + " not supported");
  }
  std::istringstream mid(middle);
  if (!(mid >> ent.etype >> ent.start >> ent.end) || ent.end < ent.start) {
    throw DataError(where + ": malformed offsets on entity " + ent.id);
  }
  return ent;
}

// "Bacteria:T1" -> "T1"
std::string strip_role(const std::string& arg, const std::string& where) {
  const std::size_t colon = arg.find(':');
  if (colon == std::string::npos || colon + 1 >= arg.size()) {
    throw DataError(where + ": expected '<role>:T<id>', got '" + arg + "'");
  }
  return arg.substr(colon + 1);
}

}  // namespace

Document import_standoff(const std::string& doc_id, const std::string& text,
                         const std::string& a1, const std::string& a2,
                         std::vector<Sentence> sentences) {
  Document doc;
  doc.id = doc_id;
  doc.text = text;
  doc.sentences = std::move(sentences);
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    doc.sentences[i].doc_index = static_cast<int>(i);
    for (const Token& t : doc.sentences[i].tokens) {
      if (!t.has_span()) {
        throw DataError("doc " + doc_id + ": token " + std::to_string(t.index) +
                        " of sentence " + std::to_string(i) +
                        " lacks a character span; standoff alignment needs TokenRange");
      }
    }
  }

  std::istringstream ents(a1);
  std::string line;
  int line_no = 0;
  while (std::getline(ents, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const RawEntity ent = parse_entity_line(line, line_no);

    // Minimal token span: all tokens overlapping [start, end), one sentence.
    int sent = -1, first = 0, last = 0;
    long covered_start = 0, covered_end = 0;
    for (const Sentence& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        if (t.char_start < ent.end && ent.start < t.char_end) {
          if (sent == -1) {
            sent = s.doc_index;
            first = last = t.index;
            covered_start = t.char_start;
            covered_end = t.char_end;
          } else if (sent != s.doc_index) {
            throw DataError("doc " + doc_id + ": entity " + ent.id +
                            " crosses sentence boundaries (tokenization mismatch)");
          } else {
            last = t.index;
            covered_end = t.char_end;
          }
        }
      }
    }
    if (sent == -1 || covered_start > ent.start || covered_end < ent.end) {
      throw DataError("doc " + doc_id + ": entity " + ent.id + " at [" +
                      std::to_string(ent.start) + ", " + std::to_string(ent.end) +
                      ") not coverable by tokens (tokenization mismatch)");
    }
    EntityMention m;
    m.id = ent.id;
    m.sentence = sent;
    m.first = first;
    m.last = last;
    m.etype = ent.etype;
    doc.mentions.push_back(std::move(m));
  }

  std::istringstream rels(a2);
  line_no = 0;
  while (std::getline(rels, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "a2 line " + std::to_string(line_no);
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line[0] != 'R') {
      throw DataError(where + ": expected 'R<id>\\t<LABEL> <role1>:T<i> <role2>:T<j>'");
    }
    std::istringstream body(line.substr(tab + 1));
    std::string label, arg1, arg2;
    if (!(body >> label >> arg1 >> arg2)) {
      throw DataError(where + ": malformed relation body");
    }
    RelationInstance rel;
    rel.label = label;
    rel.e1 = strip_role(arg1, where);
    rel.e2 = strip_role(arg2, where);
    for (const std::string& ref : {rel.e1, rel.e2}) {
      if (!doc.find_mention(ref)) {
        throw DataError(where + ": relation argument " + ref + " does not match any entity");
      }
    }
    doc.gold_relations.push_back(std::move(rel));
  }

  validate_document(doc);
  return doc;
}

}  // namespace idepnn
