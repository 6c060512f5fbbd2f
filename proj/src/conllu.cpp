#include "idepnn/conllu.hpp"

#include <sstream>

#include "idepnn/errors.hpp"

namespace idepnn {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  int value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

bool is_blank(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

// MISC column: '|'-separated key=value entries.
void parse_misc(const std::string& misc, Token& tok, const std::string& where) {
  std::size_t pos = 0;
  while (pos < misc.size()) {
    std::size_t bar = misc.find('|', pos);
    if (bar == std::string::npos) bar = misc.size();
    const std::string item = misc.substr(pos, bar - pos);
    pos = bar + 1;
    const std::string key = "TokenRange=";
    if (item.rfind(key, 0) != 0) continue;
    const std::string range = item.substr(key.size());
    const std::size_t dash = range.find('-');
    int a = 0, b = 0;
    if (dash == std::string::npos || !parse_int(range.substr(0, dash), a) ||
        !parse_int(range.substr(dash + 1), b) || b < a) {
      throw DataError(where + ": malformed TokenRange '" + range + "'");
    }
    tok.char_start = a;
    tok.char_end = b;
  }
}

}  // namespace

std::vector<Sentence> parse_conllu(const std::string& text) {
  std::vector<Sentence> sentences;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Sentence current;
  int sentence_start_line = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) return;
    const std::string where = "sentence " + std::to_string(sentences.size() + 1) + " (line " +
                              std::to_string(sentence_start_line) + ")";
    current.doc_index = static_cast<int>(sentences.size());
    validate_sentence(current, where);
    sentences.push_back(std::move(current));
    current = Sentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;

    const std::string where = "line " + std::to_string(line_no);
    const std::vector<std::string> cols = split_tabs(line);
    if (cols.size() < 10) {
      throw DataError(where + ": expected 10 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    // Multiword-token ranges and empty nodes carry no basic tree information.
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
      continue;
    }
    if (current.tokens.empty()) sentence_start_line = line_no;

    Token tok;
    if (!parse_int(cols[0], tok.index)) {
      throw DataError(where + ": non-integer ID '" + cols[0] + "'");
    }
    if (tok.index != static_cast<int>(current.tokens.size()) + 1) {
      throw DataError(where + ": ID " + cols[0] + " out of sequence");
    }
    tok.surface = cols[1];
    tok.pos = cols[3] != "_" ? cols[3] : cols[4];
    if (!parse_int(cols[6], tok.head)) {
      throw DataError(where + ": non-integer HEAD '" + cols[6] + "'");
    }
    tok.deprel = cols[7];
    parse_misc(cols[9], tok, where);
    current.tokens.push_back(std::move(tok));
  }
  flush();
  return sentences;
}

}  // namespace idepnn
