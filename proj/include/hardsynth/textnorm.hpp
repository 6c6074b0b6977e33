#ifndef HARDSYNTH_TEXTNORM_HPP
#define HARDSYNTH_TEXTNORM_HPP

#include <string>
#include <vector>

namespace hardsynth {

// Text normalization applied before any CER/WER computation.
// Idempotent: normalize(normalize(t)) == normalize(t).
struct NormPolicy {
  bool lowercase = true;
  // Drops punctuation, keeping apostrophes between word characters and
  // turning hyphens into spaces.
  bool strip_punct = true;
  bool collapse_whitespace = true;
};

std::string normalize(const std::string& text, const NormPolicy& policy = {});

// Splits a UTF-8 string into codepoint-sized tokens (spaces included).
std::vector<std::string> char_tokens(const std::string& text);

// Whitespace-delimited word tokens.
std::vector<std::string> word_tokens(const std::string& text);

}  // namespace hardsynth

#endif
