#include "hardsynth/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <vector>

#include "json.hpp"

#include "hardsynth/errors.hpp"
#include "hardsynth/metrics.hpp"

namespace hardsynth {

using nlohmann::json;

namespace {

std::string nearest_key(const std::string& key,
                        const std::vector<std::string>& known) {
  std::string best;
  std::uint64_t best_dist = std::numeric_limits<std::uint64_t>::max();
  for (const auto& k : known) {
    const auto d = edit_distance(char_tokens(key), char_tokens(k)).distance();
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  // only suggest plausible typos
  if (best_dist > std::max<std::uint64_t>(2, key.size() / 2)) return "";
  return best;
}

void reject_unknown_keys(const json& obj, const std::string& prefix,
                         const std::vector<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string msg = "unknown key '" + prefix + key + "'";
    const std::string suggestion = nearest_key(key, known);
    if (!suggestion.empty()) msg += " (did you mean '" + suggestion + "'?)";
    throw ConfigError(msg);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& prefix, const char* key,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value type for '" + prefix + key + "'");
  }
}

Transport transport_from_string(const std::string& s, const std::string& where) {
  if (s == "mock") return Transport::kMock;
  if (s == "http") return Transport::kHttp;
  if (s == "subprocess") return Transport::kSubprocess;
  throw ConfigError("bad transport '" + s + "' at " + where +
                    " (want mock|http|subprocess)");
}

ClientConfig parse_client(const json& obj, const std::string& prefix) {
  reject_unknown_keys(obj, prefix,
                      {"transport", "endpoint", "command", "llm_mode",
                       "emit_posteriors"});
  ClientConfig c;
  c.transport = transport_from_string(
      get_or<std::string>(obj, prefix, "transport", "mock"), prefix);
  c.endpoint = get_or<std::string>(obj, prefix, "endpoint", "");
  c.command = get_or<std::string>(obj, prefix, "command", "");
  c.llm_mode = get_or<std::string>(obj, prefix, "llm_mode", "paraphrase");
  c.emit_posteriors = get_or<bool>(obj, prefix, "emit_posteriors", false);
  if (c.transport == Transport::kHttp && c.endpoint.empty())
    throw ConfigError("'" + prefix + "endpoint' required for http transport");
  if (c.transport == Transport::kSubprocess && c.command.empty())
    throw ConfigError("'" + prefix + "command' required for subprocess transport");
  if (c.llm_mode != "identity" && c.llm_mode != "paraphrase")
    throw ConfigError("bad '" + prefix + "llm_mode' (want identity|paraphrase)");
  return c;
}

void apply_env_endpoint(ClientConfig& c, const char* var) {
  const char* v = std::getenv(var);
  if (v && *v) {
    c.endpoint = v;
    c.transport = Transport::kHttp;
  }
}

}  // namespace

PipelineConfig parse_config_json(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw ConfigError("config is not a JSON object");

  reject_unknown_keys(root, "",
                      {"paths", "norm", "selection", "rewrite", "synthesis",
                       "filter", "clients", "parallelism", "seed"});

  PipelineConfig cfg;

  if (!root.contains("paths") || !root["paths"].is_object())
    throw ConfigError("missing required object 'paths'");
  const json& paths = root["paths"];
  reject_unknown_keys(paths, "paths.", {"real_manifest", "work_dir"});
  if (!paths.contains("real_manifest"))
    throw ConfigError("missing required key 'paths.real_manifest'");
  if (!paths.contains("work_dir"))
    throw ConfigError("missing required key 'paths.work_dir'");
  cfg.real_manifest = paths.at("real_manifest").get<std::string>();
  cfg.work_dir = paths.at("work_dir").get<std::string>();

  if (root.contains("norm")) {
    const json& n = root["norm"];
    reject_unknown_keys(n, "norm.",
                        {"lowercase", "strip_punct", "collapse_whitespace"});
    cfg.norm.lowercase = get_or<bool>(n, "norm.", "lowercase", true);
    cfg.norm.strip_punct = get_or<bool>(n, "norm.", "strip_punct", true);
    cfg.norm.collapse_whitespace =
        get_or<bool>(n, "norm.", "collapse_whitespace", true);
  }

  if (root.contains("selection")) {
    const json& s = root["selection"];
    reject_unknown_keys(s, "selection.",
                        {"budget_hours", "min_prompt_s", "strategy"});
    cfg.budget_hours = get_or<double>(s, "selection.", "budget_hours", 20.0);
    cfg.min_prompt_s = get_or<double>(s, "selection.", "min_prompt_s", 3.0);
    const std::string strategy =
        get_or<std::string>(s, "selection.", "strategy", "hard");
    if (strategy == "hard")
      cfg.strategy = PromptStrategy::kHard;
    else if (strategy == "random")
      cfg.strategy = PromptStrategy::kRandom;
    else
      throw ConfigError("bad 'selection.strategy' (want hard|random)");
  }

  if (root.contains("rewrite")) {
    const json& r = root["rewrite"];
    reject_unknown_keys(r, "rewrite.",
                        {"enabled", "reject_identical", "length_ratio_min",
                         "length_ratio_max"});
    cfg.rewrite_enabled = get_or<bool>(r, "rewrite.", "enabled", true);
    cfg.rewrite_filters.reject_identical =
        get_or<bool>(r, "rewrite.", "reject_identical", true);
    cfg.rewrite_filters.length_ratio_min =
        get_or<double>(r, "rewrite.", "length_ratio_min", 0.3);
    cfg.rewrite_filters.length_ratio_max =
        get_or<double>(r, "rewrite.", "length_ratio_max", 3.0);
  }

  if (root.contains("synthesis")) {
    const json& s = root["synthesis"];
    reject_unknown_keys(s, "synthesis.", {"pairing"});
    const std::string pairing =
        get_or<std::string>(s, "synthesis.", "pairing", "uniform_random");
    if (pairing == "uniform_random")
      cfg.pairing = PairingStrategy::kUniformRandom;
    else if (pairing == "round_robin")
      cfg.pairing = PairingStrategy::kRoundRobin;
    else
      throw ConfigError(
          "bad 'synthesis.pairing' (want uniform_random|round_robin)");
  }

  if (root.contains("filter")) {
    const json& f = root["filter"];
    reject_unknown_keys(f, "filter.", {"gamma"});
    cfg.gamma = get_or<double>(f, "filter.", "gamma", 0.10);
  }

  if (root.contains("clients")) {
    const json& c = root["clients"];
    reject_unknown_keys(c, "clients.",
                        {"weak_asr", "strong_asr", "llm", "tts", "scorer"});
    if (c.contains("weak_asr"))
      cfg.weak_asr = parse_client(c["weak_asr"], "clients.weak_asr.");
    if (c.contains("strong_asr"))
      cfg.strong_asr = parse_client(c["strong_asr"], "clients.strong_asr.");
    if (c.contains("llm")) cfg.llm = parse_client(c["llm"], "clients.llm.");
    if (c.contains("tts")) cfg.tts = parse_client(c["tts"], "clients.tts.");
    if (c.contains("scorer"))
      cfg.scorer = parse_client(c["scorer"], "clients.scorer.");
  }

  cfg.parallelism = get_or<int>(root, "", "parallelism", 1);
  cfg.seed = get_or<std::uint64_t>(root, "", "seed", 0);

  // environment overrides: client endpoints only
  apply_env_endpoint(cfg.weak_asr, "HARDSYNTH_WEAK_ASR_ENDPOINT");
  apply_env_endpoint(cfg.strong_asr, "HARDSYNTH_STRONG_ASR_ENDPOINT");
  apply_env_endpoint(cfg.llm, "HARDSYNTH_LLM_ENDPOINT");
  apply_env_endpoint(cfg.tts, "HARDSYNTH_TTS_ENDPOINT");
  apply_env_endpoint(cfg.scorer, "HARDSYNTH_SCORER_ENDPOINT");

  if (cfg.gamma < 0.0) throw ConfigError("'filter.gamma' must be >= 0");
  if (!(cfg.budget_hours > 0.0))
    throw ConfigError("'selection.budget_hours' must be > 0");
  if (cfg.min_prompt_s < 0.0)
    throw ConfigError("'selection.min_prompt_s' must be >= 0");
  if (cfg.parallelism < 1) throw ConfigError("'parallelism' must be >= 1");

  return cfg;
}

PipelineConfig validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

std::unique_ptr<AsrClient> make_asr_client(const ClientConfig& c, AsrRole role,
                                           std::uint64_t seed) {
  switch (c.transport) {
    case Transport::kMock: {
      MockAsrClient::Options opts;
      opts.role = role;
      opts.seed = seed;
      opts.emit_posteriors = c.emit_posteriors;
      return std::make_unique<MockAsrClient>(opts);
    }
    case Transport::kHttp:
      return std::make_unique<HttpAsrClient>(c.endpoint, role);
    case Transport::kSubprocess:
      return std::make_unique<SubprocessAsrClient>(c.command, role);
  }
  throw ConfigError("unreachable transport");
}

std::unique_ptr<LlmClient> make_llm_client(const ClientConfig& c,
                                           std::uint64_t seed) {
  switch (c.transport) {
    case Transport::kMock:
      return std::make_unique<MockLlmClient>(
          c.llm_mode == "identity" ? MockLlmClient::Mode::kIdentity
                                   : MockLlmClient::Mode::kParaphrase,
          seed);
    case Transport::kHttp:
      return std::make_unique<HttpLlmClient>(c.endpoint);
    case Transport::kSubprocess:
      return std::make_unique<SubprocessLlmClient>(c.command);
  }
  throw ConfigError("unreachable transport");
}

std::unique_ptr<TtsClient> make_tts_client(const ClientConfig& c,
                                           std::uint64_t seed,
                                           double min_prompt_s) {
  switch (c.transport) {
    case Transport::kMock: {
      MockTtsClient::Options opts;
      opts.seed = seed;
      opts.min_prompt_s = min_prompt_s;
      return std::make_unique<MockTtsClient>(opts);
    }
    case Transport::kHttp:
      return std::make_unique<HttpTtsClient>(c.endpoint);
    case Transport::kSubprocess:
      throw ConfigError("subprocess transport not supported for tts");
  }
  throw ConfigError("unreachable transport");
}

std::unique_ptr<ScorerClient> make_scorer_client(const ClientConfig& c) {
  switch (c.transport) {
    case Transport::kMock:
      return std::make_unique<MockScorerClient>();
    case Transport::kHttp:
      return std::make_unique<HttpScorerClient>(c.endpoint);
    case Transport::kSubprocess:
      throw ConfigError("subprocess transport not supported for scorer");
  }
  throw ConfigError("unreachable transport");
}

}  // namespace hardsynth
