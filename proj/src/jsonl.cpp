#include "idepnn/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idepnn/errors.hpp"

namespace idepnn {

using nlohmann::json;

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

Document document_from_json(const json& j, int line_no) {
  const std::string where = "line " + std::to_string(line_no);
  try {
    Document doc;
    doc.id = j.at("id").get<std::string>();
    if (j.contains("text")) doc.text = j.at("text").get<std::string>();
    for (const json& js : j.at("sentences")) {
      Sentence s;
      s.doc_index = static_cast<int>(doc.sentences.size());
      for (const json& jt : js.at("tokens")) {
        Token t;
        t.index = static_cast<int>(s.tokens.size()) + 1;
        t.surface = jt.at("form").get<std::string>();
        t.pos = jt.value("pos", "_");
        t.head = jt.at("head").get<int>();
        t.deprel = jt.at("deprel").get<std::string>();
        t.char_start = jt.value("start", -1L);
        t.char_end = jt.value("end", -1L);
        s.tokens.push_back(std::move(t));
      }
      doc.sentences.push_back(std::move(s));
    }
    if (j.contains("mentions")) {
      for (const json& jm : j.at("mentions")) {
        EntityMention m;
        m.id = jm.at("id").get<std::string>();
        m.sentence = jm.at("sentence").get<int>();
        m.first = jm.at("first").get<int>();
        m.last = jm.at("last").get<int>();
        m.etype = jm.at("etype").get<std::string>();
        doc.mentions.push_back(std::move(m));
      }
    }
    if (j.contains("relations")) {
      for (const json& jr : j.at("relations")) {
        RelationInstance r;
        r.e1 = jr.at("e1").get<std::string>();
        r.e2 = jr.at("e2").get<std::string>();
        r.label = jr.at("label").get<std::string>();
        doc.gold_relations.push_back(std::move(r));
      }
    }
    return doc;
  } catch (const json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
}

json document_to_json(const Document& doc) {
  json j;
  j["id"] = doc.id;
  if (!doc.text.empty()) j["text"] = doc.text;
  j["sentences"] = json::array();
  for (const Sentence& s : doc.sentences) {
    json js;
    js["tokens"] = json::array();
    for (const Token& t : s.tokens) {
      json jt;
      jt["form"] = t.surface;
      jt["pos"] = t.pos;
      jt["head"] = t.head;
      jt["deprel"] = t.deprel;
      if (t.has_span()) {
        jt["start"] = t.char_start;
        jt["end"] = t.char_end;
      }
      js["tokens"].push_back(std::move(jt));
    }
    j["sentences"].push_back(std::move(js));
  }
  j["mentions"] = json::array();
  for (const EntityMention& m : doc.mentions) {
    j["mentions"].push_back(
        {{"id", m.id}, {"sentence", m.sentence}, {"first", m.first}, {"last", m.last}, {"etype", m.etype}});
  }
  j["relations"] = json::array();
  for (const RelationInstance& r : doc.gold_relations) {
    j["relations"].push_back({{"e1", r.e1}, {"e2", r.e2}, {"label", r.label}});
  }
  return j;
}

}  // namespace

Corpus load_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    Document doc = document_from_json(j, line_no);
    validate_document(doc);
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_jsonl_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load_jsonl(in);
}

Corpus load_jsonl_text(const std::string& text) {
  std::istringstream in(text);
  return load_jsonl(in);
}

void save_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const Document& doc : corpus.docs) {
    out << document_to_json(doc).dump() << '\n';
  }
}

void save_jsonl_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  save_jsonl(corpus, out);
}

RelationSchema schema_from_json_text(const std::string& text) {
  RelationSchema schema;
  try {
    const json j = json::parse(text);
    for (const json& je : j.at("labels")) {
      schema.entries.push_back({je.at("label").get<std::string>(),
                                je.at("role1").get<std::string>(),
                                je.at("role2").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  schema.validate();
  return schema;
}

RelationSchema load_schema_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return schema_from_json_text(buf.str());
}

void save_candidates_jsonl(const std::vector<CandidatePair>& candidates, std::ostream& out) {
  for (const CandidatePair& c : candidates) {
    const json j = {{"doc", c.doc_id},
                    {"e1", c.e1},
                    {"e2", c.e2},
                    {"label", c.label},
                    {"sentence_distance", c.sentence_distance}};
    out << j.dump() << '\n';
  }
}

std::vector<CandidatePair> load_candidates_jsonl(std::istream& in) {
  std::vector<CandidatePair> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      CandidatePair c;
      c.doc_id = j.at("doc").get<std::string>();
      c.e1 = j.at("e1").get<std::string>();
      c.e2 = j.at("e2").get<std::string>();
      c.label = j.at("label").get<std::string>();
      c.sentence_distance = j.at("sentence_distance").get<int>();
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw DataError("candidates line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace idepnn
