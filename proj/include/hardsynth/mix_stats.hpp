#ifndef HARDSYNTH_MIX_STATS_HPP
#define HARDSYNTH_MIX_STATS_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "hardsynth/corpus.hpp"
#include "hardsynth/textnorm.hpp"

namespace hardsynth {

struct DurationBin {
  double start_s = 0.0;  // right-open [start, end)
  double end_s = 0.0;
  std::uint64_t count = 0;

  bool operator==(const DurationBin&) const = default;
};

struct DatasetStats {
  std::uint64_t n_utterances = 0;
  double total_hours = 0.0;
  std::vector<DurationBin> duration_histogram;  // 1 s bins
  double new_vocab_fraction = 0.0;  // |V_target \ V_reference| / |V_target|
  std::uint64_t vocab_size = 0;     // |V_target|
};

// Union of disjoint corpora; throws IdCollisionError naming the id.
Corpus mix(const Corpus& real, const Corpus& synthetic);

DatasetStats stats(const Corpus& target, const Corpus& reference_vocab_source,
                   const NormPolicy& policy = {});

void write_stats_json(const DatasetStats& s, const std::string& path);
void write_stats_csv(const DatasetStats& s, const std::string& path);

}  // namespace hardsynth

#endif
