#ifndef HARDSYNTH_CONFIG_HPP
#define HARDSYNTH_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "hardsynth/clients.hpp"
#include "hardsynth/rewrite.hpp"
#include "hardsynth/synth_filter.hpp"
#include "hardsynth/textnorm.hpp"

namespace hardsynth {

enum class PromptStrategy { kHard, kRandom };
enum class Transport { kMock, kHttp, kSubprocess };

struct ClientConfig {
  Transport transport = Transport::kMock;
  std::string endpoint;  // http transport
  std::string command;   // subprocess transport
  // Mock knobs.
  std::string llm_mode = "paraphrase";  // "identity" | "paraphrase"
  bool emit_posteriors = false;
};

struct PipelineConfig {
  // paths
  std::string real_manifest;
  std::string work_dir;

  NormPolicy norm;

  // selection
  double budget_hours = 20.0;
  double min_prompt_s = 3.0;
  PromptStrategy strategy = PromptStrategy::kHard;

  // rewrite
  bool rewrite_enabled = true;
  RewriteFilters rewrite_filters;

  // synthesis
  PairingStrategy pairing = PairingStrategy::kUniformRandom;

  // filter
  double gamma = 0.10;

  ClientConfig weak_asr;
  ClientConfig strong_asr;
  ClientConfig llm;
  ClientConfig tts;
  ClientConfig scorer;

  int parallelism = 1;
  std::uint64_t seed = 0;
};

// Parses and validates the JSON config file. Defaults applied; unknown keys
// rejected with a nearest-key suggestion; every violation names the key
// path. Environment variables HARDSYNTH_{WEAK_ASR,STRONG_ASR,LLM,TTS,
// SCORER}_ENDPOINT override client endpoints only.
PipelineConfig validate_config(const std::string& path);
PipelineConfig parse_config_json(const std::string& json_text);

std::unique_ptr<AsrClient> make_asr_client(const ClientConfig& c, AsrRole role,
                                           std::uint64_t seed);
std::unique_ptr<LlmClient> make_llm_client(const ClientConfig& c,
                                           std::uint64_t seed);
std::unique_ptr<TtsClient> make_tts_client(const ClientConfig& c,
                                           std::uint64_t seed,
                                           double min_prompt_s);
std::unique_ptr<ScorerClient> make_scorer_client(const ClientConfig& c);

}  // namespace hardsynth

#endif
