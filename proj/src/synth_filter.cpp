#include "hardsynth/synth_filter.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "hardsynth/errors.hpp"
#include "hardsynth/wav.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardsynth {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<SynthesisJob> assign_prompts(
    const std::vector<std::pair<std::string, std::string>>& texts,
    const PromptSet& prompts, PairingStrategy strategy, std::uint64_t seed) {
  if (prompts.prompts.empty())
    throw EmptyPromptSetError("cannot assign prompts from an empty prompt set");

  std::vector<SynthesisJob> jobs;
  jobs.reserve(texts.size());
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    SynthesisJob job;
    job.job_id = "syn-" + texts[i].first;
    job.target_text = texts[i].second;
    const std::size_t k = strategy == PairingStrategy::kRoundRobin
                              ? i % prompts.prompts.size()
                              : std::size_t(gen() % prompts.prompts.size());
    job.prompt = prompts.prompts[k];
    jobs.push_back(std::move(job));
  }
  return jobs;
}

SynthesisResult run_synthesis(const std::vector<SynthesisJob>& jobs,
                              TtsClient& tts, const std::string& out_dir,
                              int parallelism, double max_failure_frac) {
  fs::create_directories(out_dir);
  {
    // fail before any client call if the directory is not writable
    const std::string probe = (fs::path(out_dir) / ".write_probe").string();
    std::ofstream test(probe, std::ios::trunc);
    if (!test) throw IoError("output directory not writable: " + out_dir);
    test.close();
    std::error_code ec;
    fs::remove(probe, ec);
  }

  const std::size_t n = jobs.size();
  std::vector<Utterance> utterances(n);
  std::vector<std::string> targets(n);
  std::vector<char> success(n, 0);
  std::vector<std::string> errors(n);

  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallelism, 1))
#endif
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const std::size_t i = std::size_t(idx);
    const SynthesisJob& job = jobs[i];
    const std::string out_path =
        (fs::path(out_dir) / (job.job_id + ".wav")).string();
    try {
      bool have_output = false;
      if (fs::exists(out_path)) {
        try {
          read_wav_info(out_path);
          have_output = true;  // resumable: reuse validated output
        } catch (const Error&) {
          have_output = false;
        }
      }
      if (!have_output)
        tts.synthesize(job.prompt.utterance.audio_ref,
                       job.prompt.utterance.transcript, job.target_text,
                       out_path);

      Utterance u;
      u.id = job.job_id;
      u.audio_ref = out_path;
      u.duration_s = read_wav_info(out_path).duration_s();
      u.transcript = job.target_text;
      u.speaker_id = job.prompt.utterance.speaker_id;
      u.gender = job.prompt.utterance.gender;
      u.origin = Origin::kSynthetic;
      u.prompt_id = job.prompt.utterance.id;
      utterances[i] = std::move(u);
      targets[i] = job.target_text;
      success[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  SynthesisResult result;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i)
    if (success[i]) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return utterances[a].id < utterances[b].id;
  });
  for (std::size_t i : order) {
    result.utterances.push_back(std::move(utterances[i]));
    result.target_texts.push_back(std::move(targets[i]));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!success[i]) result.failures.push_back({jobs[i].job_id, errors[i]});

  if (n > 0 && double(result.failures.size()) / double(n) > max_failure_frac)
    throw ExcessiveFailuresError(std::to_string(result.failures.size()) +
                                 " of " + std::to_string(n) +
                                 " synthesis jobs failed");
  return result;
}

std::vector<SyntheticSample> filter_synthetic(
    const std::vector<Utterance>& utterances,
    const std::vector<std::string>& target_texts, AsrClient& strong,
    double gamma, const NormPolicy& policy, int parallelism,
    double max_failure_frac) {
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
  if (utterances.size() != target_texts.size())
    throw DimensionError("utterances and target_texts differ in length");

  const std::size_t n = utterances.size();
  std::vector<SyntheticSample> samples(n);
  std::vector<char> success(n, 0);
  std::vector<std::string> errors(n);

  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallelism, 1))
#endif
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const std::size_t i = std::size_t(idx);
    try {
      SyntheticSample s;
      s.utterance = utterances[i];
      s.target_text = target_texts[i];
      s.strong_hypothesis = strong.transcribe(utterances[i].audio_ref).text;
      s.cer = cer(s.target_text, s.strong_hypothesis, policy);
      s.kept = s.cer <= gamma;  // "exceeding" is strict, boundary kept
      samples[i] = std::move(s);
      success[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::vector<SyntheticSample> result;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (success[i])
      result.push_back(std::move(samples[i]));
    else
      ++failures;
  }
  if (n > 0 && double(failures) / double(n) > max_failure_frac)
    throw ExcessiveFailuresError(std::to_string(failures) + " of " +
                                 std::to_string(n) +
                                 " filter transcriptions failed");
  return result;
}

std::vector<SyntheticSample> load_synthetic_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synthetic manifest: " + path);
  std::vector<SyntheticSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ManifestError(path + ":" + std::to_string(line_no) +
                          ": malformed synthetic manifest line");
    SyntheticSample s;
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
      s.target_text = j.at("target_text").get<std::string>();
      s.strong_hypothesis = j.value("hypothesis", std::string());
      s.cer = j.at("cer").get<double>();
      s.kept = j.at("kept").get<bool>();
    } catch (const json::exception& e) {
      throw ManifestError(path + ":" + std::to_string(line_no) + ": " +
                          e.what());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_synthetic_manifest(const std::vector<SyntheticSample>& samples,
                              const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& s : samples) {
    json j;
    j["id"] = s.utterance.id;
    j["audio"] = s.utterance.audio_ref;
    j["duration_s"] = s.utterance.duration_s;
    j["text"] = s.utterance.transcript;
    j["speaker"] = s.utterance.speaker_id;
    j["gender"] = to_string(s.utterance.gender);
    j["origin"] = to_string(s.utterance.origin);
    if (s.utterance.prompt_id) j["prompt_id"] = *s.utterance.prompt_id;
    j["target_text"] = s.target_text;
    j["hypothesis"] = s.strong_hypothesis;
    j["cer"] = s.cer;
    j["kept"] = s.kept;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
