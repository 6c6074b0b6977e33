#include "hardsynth/textnorm.hpp"

#include <cctype>

namespace hardsynth {

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;  // non-ASCII bytes pass through
}

bool is_space(unsigned char c) { return std::isspace(c); }

}  // namespace

std::string normalize(const std::string& text, const NormPolicy& policy) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = text[i];
    if (policy.strip_punct) {
      if (c == '-') {
        out.push_back(' ');
        continue;
      }
      if (c == '\'') {
        // intra-word apostrophe only
        bool prev_ok = i > 0 && is_word_char(text[i - 1]);
        bool next_ok = i + 1 < text.size() && is_word_char(text[i + 1]);
        if (prev_ok && next_ok) out.push_back(c);
        continue;
      }
      if (c < 0x80 && std::ispunct(c)) continue;
    }
    if (policy.lowercase && c < 0x80) c = std::tolower(c);
    out.push_back(char(c));
  }

  if (!policy.collapse_whitespace) return out;

  std::string collapsed;
  collapsed.reserve(out.size());
  bool pending_space = false;
  for (unsigned char c : out) {
    if (is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(char(c));
  }
  return collapsed;
}

std::vector<std::string> char_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  tokens.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    unsigned char c = text[i];
    if (c >= 0xF0)
      len = 4;
    else if (c >= 0xE0)
      len = 3;
    else if (c >= 0xC0)
      len = 2;
    if (i + len > text.size()) len = 1;  // tolerate malformed tails
    tokens.push_back(text.substr(i, len));
    i += len;
  }
  return tokens;
}

std::vector<std::string> word_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (is_space(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(char(c));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace hardsynth
