#ifndef HARDSYNTH_HARD_SELECT_HPP
#define HARDSYNTH_HARD_SELECT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hardsynth/clients.hpp"
#include "hardsynth/corpus.hpp"
#include "hardsynth/metrics.hpp"

namespace hardsynth {

struct ScoredUtterance {
  Utterance utterance;
  std::string hypothesis;
  double cer = 0.0;

  bool operator==(const ScoredUtterance&) const = default;
};

// Hard audio prompts: sorted by descending cer, ties by ascending id,
// total duration within the budget, every clip strictly longer than
// min_duration_s.
struct PromptSet {
  std::vector<ScoredUtterance> prompts;
  double budget_hours = 0.0;
  double min_duration_s = 0.0;

  double total_duration_s() const;
};

struct ScoreFailure {
  std::string id;
  std::string error;
};

struct ScoreResult {
  std::vector<ScoredUtterance> scored;  // successes, input order
  std::vector<ScoreFailure> failures;
};

// Transcribes every utterance with the weak ASR and computes per-utterance
// CER. Per-utterance failures are collected; throws ExcessiveFailuresError
// when the failure fraction exceeds max_failure_frac.
ScoreResult score_corpus(const Corpus& corpus, AsrClient& weak,
                         const NormPolicy& policy = {}, int parallelism = 1,
                         double max_failure_frac = 0.01);

PromptSet select_hard_prompts(const std::vector<ScoredUtterance>& scored,
                              double min_duration_s = 3.0,
                              double budget_hours = 20.0);

// Same duration filter and prefix-budget rule, but ordered by a seeded
// uniform shuffle instead of CER.
PromptSet select_random_prompts(const std::vector<ScoredUtterance>& scored,
                                double min_duration_s, double budget_hours,
                                std::uint64_t seed);

// Scored manifest persistence: manifest record + {cer, hypothesis}.
std::vector<ScoredUtterance> load_scored_manifest(const std::string& path);
void write_scored_manifest(const std::vector<ScoredUtterance>& scored,
                           const std::string& path);

}  // namespace hardsynth

#endif
