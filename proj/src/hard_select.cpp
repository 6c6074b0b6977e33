#include "hardsynth/hard_select.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "json.hpp"

#include "hardsynth/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardsynth {

using nlohmann::json;

double PromptSet::total_duration_s() const {
  double total = 0.0;
  for (const auto& p : prompts) total += p.utterance.duration_s;
  return total;
}

ScoreResult score_corpus(const Corpus& corpus, AsrClient& weak,
                         const NormPolicy& policy, int parallelism,
                         double max_failure_frac) {
  const std::size_t n = corpus.utterances.size();
  std::vector<ScoredUtterance> scored(n);
  std::vector<char> success(n, 0);
  std::vector<std::string> errors(n);

  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallelism, 1))
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    const Utterance& u = corpus.utterances[std::size_t(i)];
    try {
      const TranscribeResult t = weak.transcribe(u.audio_ref);
      ScoredUtterance s;
      s.utterance = u;
      s.hypothesis = t.text;
      s.cer = cer(u.transcript, t.text, policy);
      scored[std::size_t(i)] = std::move(s);
      success[std::size_t(i)] = 1;
    } catch (const std::exception& e) {
      errors[std::size_t(i)] = e.what();
    }
  }

  ScoreResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (success[i])
      result.scored.push_back(std::move(scored[i]));
    else
      result.failures.push_back({corpus.utterances[i].id, errors[i]});
  }
  if (n > 0 && double(result.failures.size()) / double(n) > max_failure_frac)
    throw ExcessiveFailuresError(
        std::to_string(result.failures.size()) + " of " + std::to_string(n) +
        " utterances failed to score (limit " +
        std::to_string(max_failure_frac) + ")");
  return result;
}

namespace {

// Duration filter (strictly longer than min) followed by the greedy budget
// prefix: stop at the first utterance that would overflow.
std::vector<ScoredUtterance> budget_prefix(std::vector<ScoredUtterance> ordered,
                                           double min_duration_s,
                                           double budget_hours) {
  const double budget_s = budget_hours * 3600.0;
  std::vector<ScoredUtterance> prompts;
  double total = 0.0;
  for (auto& s : ordered) {
    if (total + s.utterance.duration_s > budget_s) break;
    total += s.utterance.duration_s;
    prompts.push_back(std::move(s));
  }
  (void)min_duration_s;
  return prompts;
}

std::vector<ScoredUtterance> eligible(const std::vector<ScoredUtterance>& scored,
                                      double min_duration_s) {
  std::vector<ScoredUtterance> out;
  for (const auto& s : scored)
    if (s.utterance.duration_s > min_duration_s) out.push_back(s);
  return out;
}

}  // namespace

PromptSet select_hard_prompts(const std::vector<ScoredUtterance>& scored,
                              double min_duration_s, double budget_hours) {
  std::vector<ScoredUtterance> ordered = eligible(scored, min_duration_s);
  std::sort(ordered.begin(), ordered.end(),
            [](const ScoredUtterance& a, const ScoredUtterance& b) {
              if (a.cer != b.cer) return a.cer > b.cer;
              return a.utterance.id < b.utterance.id;
            });
  return PromptSet{budget_prefix(std::move(ordered), min_duration_s, budget_hours),
                   budget_hours, min_duration_s};
}

PromptSet select_random_prompts(const std::vector<ScoredUtterance>& scored,
                                double min_duration_s, double budget_hours,
                                std::uint64_t seed) {
  std::vector<ScoredUtterance> ordered = eligible(scored, min_duration_s);
  // Hand-rolled Fisher-Yates: std::shuffle's draws are implementation-defined
  // and the output must be reproducible across platforms.
  std::mt19937_64 gen(seed);
  for (std::size_t i = ordered.size(); i > 1; --i) {
    const std::size_t j = std::size_t(gen() % i);
    std::swap(ordered[i - 1], ordered[j]);
  }
  return PromptSet{budget_prefix(std::move(ordered), min_duration_s, budget_hours),
                   budget_hours, min_duration_s};
}

std::vector<ScoredUtterance> load_scored_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scored manifest: " + path);
  std::vector<ScoredUtterance> scored;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ManifestError(path + ":" + std::to_string(line_no) +
                          ": malformed scored manifest line");
    ScoredUtterance s;
    try {
      s.utterance.id = j.at("id").get<std::string>();
      s.utterance.audio_ref = j.at("audio").get<std::string>();
      s.utterance.duration_s = j.at("duration_s").get<double>();
      s.utterance.transcript = j.at("text").get<std::string>();
      s.utterance.speaker_id = j.at("speaker").get<std::string>();
      s.utterance.gender = gender_from_string(j.at("gender").get<std::string>());
      s.utterance.origin = origin_from_string(j.at("origin").get<std::string>());
      if (j.contains("prompt_id"))
        s.utterance.prompt_id = j.at("prompt_id").get<std::string>();
      s.hypothesis = j.at("hypothesis").get<std::string>();
      s.cer = j.at("cer").get<double>();
    } catch (const json::exception& e) {
      throw ManifestError(path + ":" + std::to_string(line_no) + ": " +
                          e.what());
    }
    scored.push_back(std::move(s));
  }
  return scored;
}

void write_scored_manifest(const std::vector<ScoredUtterance>& scored,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& s : scored) {
    json j;
    j["id"] = s.utterance.id;
    j["audio"] = s.utterance.audio_ref;
    j["duration_s"] = s.utterance.duration_s;
    j["text"] = s.utterance.transcript;
    j["speaker"] = s.utterance.speaker_id;
    j["gender"] = to_string(s.utterance.gender);
    j["origin"] = to_string(s.utterance.origin);
    if (s.utterance.prompt_id) j["prompt_id"] = *s.utterance.prompt_id;
    j["hypothesis"] = s.hypothesis;
    j["cer"] = s.cer;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
