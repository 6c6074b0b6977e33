#ifndef HARDSYNTH_EVAL_HPP
#define HARDSYNTH_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardsynth/clients.hpp"
#include "hardsynth/corpus.hpp"
#include "hardsynth/metrics.hpp"

namespace hardsynth {

struct GroupWer {
  double wer = 0.0;
  std::uint64_t n_ref_words = 0;
};

struct EvalReport {
  double overall_wer = 0.0;  // micro-average over all pairs
  std::map<std::string, GroupWer> per_speaker;
  std::map<std::string, GroupWer> per_gender;  // keys "m", "f", "u"
  // WER_male - WER_female in percentage points; absent when either gender
  // has zero reference words.
  std::optional<double> gender_gap_pp;
  // Population variance of per-speaker WERs, percentage points squared.
  double speaker_variance_pp2 = 0.0;
  std::uint64_t n_utterances = 0;
};

EvalReport wer_report(
    const std::vector<std::pair<Utterance, std::string>>& pairs,
    const NormPolicy& policy = {}, bool absolute_gender_gap = false);

// Mean absolute words-per-second difference between generated audio and its
// prompt.
double speaking_speed_delta(
    const std::vector<std::pair<Utterance, Utterance>>& pairs,
    const NormPolicy& policy = {});

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

struct SimilarityReport {
  double mean_sim_spk = 0.0;
  double mean_mos = 0.0;
  std::uint64_t n_pairs = 0;
};

// pairs of (generated audio_ref, prompt audio_ref)
SimilarityReport similarity_report(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    ScorerClient& scorer, int parallelism = 1, double max_failure_frac = 0.01);

void write_eval_json(const EvalReport& r, const std::string& path);
void write_eval_csv(const EvalReport& r, const std::string& path);

}  // namespace hardsynth

#endif
