#ifndef HARDSYNTH_PIPELINE_HPP
#define HARDSYNTH_PIPELINE_HPP

#include <functional>
#include <string>
#include <vector>

#include "hardsynth/config.hpp"

namespace hardsynth {

// Pipeline stages in execution order.
enum class Stage { kScore, kSelect, kRewrite, kSynth, kFilter, kMix, kStats, kEval };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);

struct StageOutcome {
  Stage stage;
  bool skipped = false;  // completed before with unchanged inputs
  std::vector<std::string> artifacts;
};

// Runs one stage. Outputs are written atomically (temp file + rename) and a
// completion record with input digests makes reruns with unchanged inputs a
// no-op. Throws on missing inputs / stage failure.
StageOutcome run_stage(Stage stage, const PipelineConfig& config);

// score -> select -> rewrite -> synth -> filter -> mix -> stats -> eval
std::vector<StageOutcome> run_pipeline(const PipelineConfig& config);

// Artifact paths inside the work dir.
std::string stage_artifact(const PipelineConfig& config, const std::string& name);

}  // namespace hardsynth

#endif
