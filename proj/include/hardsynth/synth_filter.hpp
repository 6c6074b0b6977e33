#ifndef HARDSYNTH_SYNTH_FILTER_HPP
#define HARDSYNTH_SYNTH_FILTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hardsynth/clients.hpp"
#include "hardsynth/corpus.hpp"
#include "hardsynth/hard_select.hpp"

namespace hardsynth {

struct SynthesisJob {
  std::string job_id;       // "syn-" + source text id
  std::string target_text;  // accepted rewrite
  ScoredUtterance prompt;
};

struct SyntheticSample {
  Utterance utterance;  // origin=synthetic, prompt_id set
  std::string target_text;
  std::string strong_hypothesis;
  double cer = 0.0;
  bool kept = false;
};

enum class PairingStrategy { kUniformRandom, kRoundRobin };

// One job per text. uniform_random draws prompts with replacement from the
// seed; round_robin cycles prompts in descending-cer order.
std::vector<SynthesisJob> assign_prompts(
    const std::vector<std::pair<std::string, std::string>>& texts,
    const PromptSet& prompts, PairingStrategy strategy, std::uint64_t seed);

struct SynthesisResult {
  std::vector<Utterance> utterances;          // ordered by job_id
  std::vector<std::string> target_texts;      // parallel to utterances
  std::vector<ScoreFailure> failures;
};

// Resumable: jobs whose output WAV already exists and parses are skipped.
SynthesisResult run_synthesis(const std::vector<SynthesisJob>& jobs,
                              TtsClient& tts, const std::string& out_dir,
                              int parallelism = 1,
                              double max_failure_frac = 0.01);

// Transcribes each sample with the strong ASR; kept iff cer <= gamma
// (boundary kept, "exceeding" is strict).
std::vector<SyntheticSample> filter_synthetic(
    const std::vector<Utterance>& utterances,
    const std::vector<std::string>& target_texts, AsrClient& strong,
    double gamma = 0.10, const NormPolicy& policy = {}, int parallelism = 1,
    double max_failure_frac = 0.01);

// Synthetic manifest: manifest record + {target_text, cer, kept}.
std::vector<SyntheticSample> load_synthetic_manifest(const std::string& path);
void write_synthetic_manifest(const std::vector<SyntheticSample>& samples,
                              const std::string& path);

}  // namespace hardsynth

#endif
