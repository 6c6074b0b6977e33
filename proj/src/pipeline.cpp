#include "hardsynth/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>

#include "json.hpp"

#include "hardsynth/corpus.hpp"
#include "hardsynth/errors.hpp"
#include "hardsynth/eval.hpp"
#include "hardsynth/hard_select.hpp"
#include "hardsynth/mix_stats.hpp"
#include "hardsynth/rewrite.hpp"
#include "hardsynth/synth_filter.hpp"

namespace hardsynth {

using nlohmann::json;
namespace fs = std::filesystem;

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kScore: return "score";
    case Stage::kSelect: return "select";
    case Stage::kRewrite: return "rewrite";
    case Stage::kSynth: return "synth";
    case Stage::kFilter: return "filter";
    case Stage::kMix: return "mix";
    case Stage::kStats: return "stats";
    case Stage::kEval: return "eval";
  }
  return "?";
}

Stage stage_from_name(const std::string& name) {
  static const std::map<std::string, Stage> table = {
      {"score", Stage::kScore},   {"select", Stage::kSelect},
      {"rewrite", Stage::kRewrite}, {"synth", Stage::kSynth},
      {"filter", Stage::kFilter}, {"mix", Stage::kMix},
      {"stats", Stage::kStats},   {"eval", Stage::kEval},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown stage '" + name + "'");
  return it->second;
}

std::string stage_artifact(const PipelineConfig& config,
                           const std::string& name) {
  return (fs::path(config.work_dir) / name).string();
}

namespace {

void require_input(const std::string& path, const std::string& stage) {
  if (!fs::exists(path))
    throw IoError("stage '" + stage + "' input missing: " + path);
}

// Write through a temp file and rename so an interrupted stage never leaves
// a partially written artifact visible.
void atomic_write(const std::string& path,
                  const std::function<void(const std::string&)>& writer) {
  const std::string tmp = path + ".tmp";
  writer(tmp);
  fs::rename(tmp, path);
}

std::string state_path(const PipelineConfig& config, Stage stage) {
  return (fs::path(config.work_dir) / "state" /
          (std::string(stage_name(stage)) + ".json"))
      .string();
}

bool stage_completed(const PipelineConfig& config, Stage stage,
                     const std::vector<std::string>& inputs) {
  std::ifstream in(state_path(config, stage));
  if (!in) return false;
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return false;

  const json& digests = j.value("inputs", json::object());
  for (const auto& path : inputs) {
    if (!fs::exists(path)) return false;
    const std::string key = fs::path(path).filename().string();
    if (!digests.contains(key)) return false;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  (unsigned long long)file_digest(path));
    if (digests.at(key).get<std::string>() != buf) return false;
  }
  for (const auto& out : j.value("outputs", std::vector<std::string>()))
    if (!fs::exists(out)) return false;
  return true;
}

void record_completion(const PipelineConfig& config, Stage stage,
                       const std::vector<std::string>& inputs,
                       const std::vector<std::string>& outputs) {
  json j;
  json digests = json::object();
  for (const auto& path : inputs) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  (unsigned long long)file_digest(path));
    digests[fs::path(path).filename().string()] = buf;
  }
  j["inputs"] = digests;
  j["outputs"] = outputs;
  fs::create_directories(fs::path(config.work_dir) / "state");
  atomic_write(state_path(config, stage), [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + tmp);
  });
}

CallLogger stage_logger(const PipelineConfig& config, Stage stage,
                        std::shared_ptr<std::ofstream>& stream) {
  fs::create_directories(fs::path(config.work_dir) / "logs");
  const std::string path =
      (fs::path(config.work_dir) / "logs" /
       (std::string(stage_name(stage)) + ".log.jsonl"))
          .string();
  stream = std::make_shared<std::ofstream>(path, std::ios::app);
  return [stream](const std::string& line) { *stream << line << "\n"; };
}

std::vector<std::pair<std::string, std::string>> accepted_rewrites(
    const std::vector<RewritePair>& pairs) {
  std::vector<std::pair<std::string, std::string>> texts;
  for (const auto& p : pairs)
    if (p.ok) texts.emplace_back(p.id, p.rewritten);
  return texts;
}

struct StageIo {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

StageIo stage_io(const PipelineConfig& c, Stage stage) {
  const auto a = [&](const std::string& n) { return stage_artifact(c, n); };
  switch (stage) {
    case Stage::kScore:
      return {{c.real_manifest}, {a("scored.jsonl")}};
    case Stage::kSelect:
      return {{a("scored.jsonl")}, {a("prompts.jsonl")}};
    case Stage::kRewrite:
      return {{c.real_manifest}, {a("rewrites.jsonl")}};
    case Stage::kSynth:
      return {{a("rewrites.jsonl"), a("prompts.jsonl")}, {a("synth_raw.jsonl")}};
    case Stage::kFilter:
      return {{a("synth_raw.jsonl")},
              {a("synth_filtered.jsonl"), a("synthetic.jsonl")}};
    case Stage::kMix:
      return {{c.real_manifest, a("synthetic.jsonl")}, {a("mixed.jsonl")}};
    case Stage::kStats:
      return {{a("synthetic.jsonl"), c.real_manifest},
              {a("stats.json"), a("stats.csv")}};
    case Stage::kEval:
      return {{a("synthetic.jsonl"), c.real_manifest},
              {a("eval_report.json"), a("eval_speakers.csv")}};
  }
  throw Error("unreachable stage");
}

void run_score(const PipelineConfig& c, const StageIo& io) {
  const Corpus corpus = load_manifest(c.real_manifest);
  std::shared_ptr<std::ofstream> log;
  auto weak = make_asr_client(c.weak_asr, AsrRole::kWeak, c.seed);
  weak->set_logger(stage_logger(c, Stage::kScore, log));
  const ScoreResult result =
      score_corpus(corpus, *weak, c.norm, c.parallelism);
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_scored_manifest(result.scored, tmp);
  });
}

void run_select(const PipelineConfig& c, const StageIo& io) {
  const auto scored = load_scored_manifest(io.inputs[0]);
  const PromptSet prompts =
      c.strategy == PromptStrategy::kHard
          ? select_hard_prompts(scored, c.min_prompt_s, c.budget_hours)
          : select_random_prompts(scored, c.min_prompt_s, c.budget_hours,
                                  c.seed);
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_scored_manifest(prompts.prompts, tmp);
  });
}

void run_rewrite(const PipelineConfig& c, const StageIo& io) {
  const Corpus corpus = load_manifest(c.real_manifest);
  std::vector<RewritePair> pairs;
  if (!c.rewrite_enabled) {
    // synthesis targets are the original transcripts
    for (const auto& u : corpus.utterances) {
      RewritePair p;
      p.id = u.id;
      p.original = u.transcript;
      p.rewritten = normalize(u.transcript, c.norm);
      p.ok = !p.rewritten.empty();
      if (!p.ok) p.reason = "empty";
      pairs.push_back(std::move(p));
    }
  } else {
    std::vector<std::pair<std::string, std::string>> texts;
    for (const auto& u : corpus.utterances)
      texts.emplace_back(u.id, u.transcript);
    std::shared_ptr<std::ofstream> log;
    auto llm = make_llm_client(c.llm, c.seed);
    llm->set_logger(stage_logger(c, Stage::kRewrite, log));
    pairs = rewrite_corpus(texts, *llm, c.norm, c.rewrite_filters,
                           c.parallelism);
  }
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_rewrite_manifest(pairs, tmp);
  });
}

void run_synth(const PipelineConfig& c, const StageIo& io) {
  const auto texts = accepted_rewrites(load_rewrite_manifest(io.inputs[0]));
  PromptSet prompts;
  prompts.prompts = load_scored_manifest(io.inputs[1]);
  prompts.budget_hours = c.budget_hours;
  prompts.min_duration_s = c.min_prompt_s;

  std::vector<Utterance> utterances;
  if (!texts.empty() && !prompts.prompts.empty()) {
    const auto jobs = assign_prompts(texts, prompts, c.pairing, c.seed);
    std::shared_ptr<std::ofstream> log;
    auto tts = make_tts_client(c.tts, c.seed, c.min_prompt_s);
    tts->set_logger(stage_logger(c, Stage::kSynth, log));
    const SynthesisResult result = run_synthesis(
        jobs, *tts, stage_artifact(c, "synth"), c.parallelism);
    utterances = result.utterances;
  }
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_manifest(make_corpus(utterances), tmp);
  });
}

void run_filter(const PipelineConfig& c, const StageIo& io) {
  const Corpus raw = load_manifest(io.inputs[0]);
  std::vector<std::string> targets;
  for (const auto& u : raw.utterances) targets.push_back(u.transcript);

  std::vector<SyntheticSample> samples;
  if (!raw.utterances.empty()) {
    std::shared_ptr<std::ofstream> log;
    auto strong = make_asr_client(c.strong_asr, AsrRole::kStrong, c.seed);
    strong->set_logger(stage_logger(c, Stage::kFilter, log));
    samples = filter_synthetic(raw.utterances, targets, *strong, c.gamma,
                               c.norm, c.parallelism);
  }
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_synthetic_manifest(samples, tmp);
  });
  std::vector<Utterance> kept;
  for (const auto& s : samples)
    if (s.kept) kept.push_back(s.utterance);
  atomic_write(io.outputs[1], [&](const std::string& tmp) {
    write_manifest(make_corpus(kept), tmp);
  });
}

void run_mix(const PipelineConfig& c, const StageIo& io) {
  const Corpus real = load_manifest(c.real_manifest);
  const Corpus synthetic = load_manifest(io.inputs[1]);
  const Corpus mixed = mix(real, synthetic);
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_manifest(mixed, tmp);
  });
}

void run_stats(const PipelineConfig& c, const StageIo& io) {
  const Corpus synthetic = load_manifest(io.inputs[0]);
  const Corpus real = load_manifest(c.real_manifest);
  const DatasetStats s = stats(synthetic, real, c.norm);
  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    write_stats_json(s, tmp);
  });
  atomic_write(io.outputs[1], [&](const std::string& tmp) {
    write_stats_csv(s, tmp);
  });
}

void run_eval(const PipelineConfig& c, const StageIo& io) {
  const Corpus synthetic = load_manifest(io.inputs[0]);
  const Corpus real = load_manifest(c.real_manifest);

  json report;
  if (synthetic.utterances.empty()) {
    report["n_utterances"] = 0;
    atomic_write(io.outputs[0], [&](const std::string& tmp) {
      std::ofstream out(tmp, std::ios::trunc);
      out << report.dump(2) << "\n";
      if (!out) throw IoError("write failed: " + tmp);
    });
    atomic_write(io.outputs[1], [&](const std::string& tmp) {
      std::ofstream out(tmp, std::ios::trunc);
      out << "speaker,wer,n_ref_words\n";
      if (!out) throw IoError("write failed: " + tmp);
    });
    return;
  }

  std::shared_ptr<std::ofstream> log;
  auto strong = make_asr_client(c.strong_asr, AsrRole::kStrong, c.seed);
  strong->set_logger(stage_logger(c, Stage::kEval, log));

  std::vector<std::pair<Utterance, std::string>> pairs;
  for (const auto& u : synthetic.utterances)
    pairs.emplace_back(u, strong->transcribe(u.audio_ref).text);
  const EvalReport wr = wer_report(pairs, c.norm);

  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : real.utterances) by_id[u.id] = &u;

  std::vector<std::pair<Utterance, Utterance>> speed_pairs;
  std::vector<std::pair<std::string, std::string>> audio_pairs;
  for (const auto& u : synthetic.utterances) {
    if (!u.prompt_id) continue;
    const auto it = by_id.find(*u.prompt_id);
    if (it == by_id.end()) continue;
    speed_pairs.emplace_back(u, *it->second);
    audio_pairs.emplace_back(u.audio_ref, it->second->audio_ref);
  }

  report["overall_wer"] = wr.overall_wer;
  report["n_utterances"] = wr.n_utterances;
  report["speaker_variance_pp2"] = wr.speaker_variance_pp2;
  if (wr.gender_gap_pp)
    report["gender_gap_pp"] = *wr.gender_gap_pp;
  else
    report["gender_gap_pp"] = nullptr;
  {
    json sp = json::object();
    for (const auto& [id, g] : wr.per_speaker)
      sp[id] = {{"wer", g.wer}, {"n_ref_words", g.n_ref_words}};
    report["per_speaker"] = sp;
    json ge = json::object();
    for (const auto& [id, g] : wr.per_gender)
      ge[id] = {{"wer", g.wer}, {"n_ref_words", g.n_ref_words}};
    report["per_gender"] = ge;
  }
  if (!speed_pairs.empty())
    report["delta_speed_words_per_s"] = speaking_speed_delta(speed_pairs, c.norm);
  if (!audio_pairs.empty()) {
    auto scorer = make_scorer_client(c.scorer);
    const SimilarityReport sim =
        similarity_report(audio_pairs, *scorer, c.parallelism);
    report["mean_sim_spk"] = sim.mean_sim_spk;
    report["mean_mos"] = sim.mean_mos;
  }

  atomic_write(io.outputs[0], [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::trunc);
    out << report.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + tmp);
  });
  atomic_write(io.outputs[1], [&](const std::string& tmp) {
    write_eval_csv(wr, tmp);
  });
}

}  // namespace

StageOutcome run_stage(Stage stage, const PipelineConfig& config) {
  fs::create_directories(config.work_dir);
  const StageIo io = stage_io(config, stage);
  for (const auto& input : io.inputs) require_input(input, stage_name(stage));

  StageOutcome outcome{stage, false, io.outputs};
  if (stage_completed(config, stage, io.inputs)) {
    outcome.skipped = true;
    return outcome;
  }

  switch (stage) {
    case Stage::kScore: run_score(config, io); break;
    case Stage::kSelect: run_select(config, io); break;
    case Stage::kRewrite: run_rewrite(config, io); break;
    case Stage::kSynth: run_synth(config, io); break;
    case Stage::kFilter: run_filter(config, io); break;
    case Stage::kMix: run_mix(config, io); break;
    case Stage::kStats: run_stats(config, io); break;
    case Stage::kEval: run_eval(config, io); break;
  }

  record_completion(config, stage, io.inputs, io.outputs);
  return outcome;
}

std::vector<StageOutcome> run_pipeline(const PipelineConfig& config) {
  std::vector<StageOutcome> outcomes;
  for (Stage stage : {Stage::kScore, Stage::kSelect, Stage::kRewrite,
                      Stage::kSynth, Stage::kFilter, Stage::kMix,
                      Stage::kStats, Stage::kEval})
    outcomes.push_back(run_stage(stage, config));
  return outcomes;
}

}  // namespace hardsynth
