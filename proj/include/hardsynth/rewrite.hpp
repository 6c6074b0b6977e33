#ifndef HARDSYNTH_REWRITE_HPP
#define HARDSYNTH_REWRITE_HPP

#include <string>
#include <vector>

#include "hardsynth/clients.hpp"
#include "hardsynth/textnorm.hpp"

namespace hardsynth {

struct RewritePair {
  std::string id;
  std::string original;
  std::string rewritten;  // non-empty single line when ok
  bool ok = false;
  std::string reason;  // set when rejected

  bool operator==(const RewritePair&) const = default;
};

struct RewriteFilters {
  bool reject_identical = true;
  double length_ratio_min = 0.3;
  double length_ratio_max = 3.0;
};

// Zero-shot rewriting prompt; {sentence} substituted literally.
std::string build_prompt(const std::string& sentence);

// Strips surrounding quotes and leading "Rewritten sentence:" / "Sentence:"
// labels, keeps the first non-empty line, then normalizes. Idempotent.
std::string postprocess_response(const std::string& raw,
                                 const NormPolicy& policy = {});

std::vector<RewritePair> rewrite_corpus(
    const std::vector<std::pair<std::string, std::string>>& texts,
    LlmClient& llm, const NormPolicy& policy = {},
    const RewriteFilters& filters = {}, int parallelism = 1,
    double max_failure_frac = 0.01);

// Line-delimited JSON: {id, original, rewritten, status, reason?}.
std::vector<RewritePair> load_rewrite_manifest(const std::string& path);
void write_rewrite_manifest(const std::vector<RewritePair>& pairs,
                            const std::string& path);

}  // namespace hardsynth

#endif
