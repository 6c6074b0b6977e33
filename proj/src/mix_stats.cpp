#include "hardsynth/mix_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "json.hpp"

#include "hardsynth/errors.hpp"

namespace hardsynth {

using nlohmann::json;

Corpus mix(const Corpus& real, const Corpus& synthetic) {
  std::unordered_set<std::string> ids;
  for (const auto& u : real.utterances) ids.insert(u.id);
  for (const auto& u : synthetic.utterances)
    if (ids.count(u.id))
      throw IdCollisionError("id collision on '" + u.id + "'");

  std::vector<Utterance> merged = real.utterances;
  merged.insert(merged.end(), synthetic.utterances.begin(),
                synthetic.utterances.end());
  return make_corpus(std::move(merged), "mixed");
}

namespace {

std::set<std::string> vocabulary(const Corpus& c, const NormPolicy& policy) {
  std::set<std::string> vocab;
  for (const auto& u : c.utterances)
    for (auto& w : word_tokens(normalize(u.transcript, policy)))
      vocab.insert(std::move(w));
  return vocab;
}

}  // namespace

DatasetStats stats(const Corpus& target, const Corpus& reference_vocab_source,
                   const NormPolicy& policy) {
  DatasetStats s;
  s.n_utterances = target.utterances.size();
  s.total_hours = target.total_duration_s() / 3600.0;

  // 1 s right-open bins [n, n+1)
  double max_dur = 0.0;
  for (const auto& u : target.utterances)
    max_dur = std::max(max_dur, u.duration_s);
  const std::size_t n_bins =
      target.utterances.empty() ? 0 : std::size_t(std::floor(max_dur)) + 1;
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (const auto& u : target.utterances)
    ++counts[std::size_t(std::floor(u.duration_s))];
  for (std::size_t b = 0; b < n_bins; ++b)
    s.duration_histogram.push_back({double(b), double(b + 1), counts[b]});

  const std::set<std::string> target_vocab = vocabulary(target, policy);
  const std::set<std::string> ref_vocab =
      vocabulary(reference_vocab_source, policy);
  s.vocab_size = target_vocab.size();
  if (!target_vocab.empty()) {
    std::uint64_t fresh = 0;
    for (const auto& w : target_vocab)
      if (!ref_vocab.count(w)) ++fresh;
    s.new_vocab_fraction = double(fresh) / double(target_vocab.size());
  }
  return s;
}

void write_stats_json(const DatasetStats& s, const std::string& path) {
  json j;
  j["n_utterances"] = s.n_utterances;
  j["total_hours"] = s.total_hours;
  j["vocab_size"] = s.vocab_size;
  j["new_vocab_fraction"] = s.new_vocab_fraction;
  json bins = json::array();
  for (const auto& b : s.duration_histogram)
    bins.push_back({{"bin_start_s", b.start_s},
                    {"bin_end_s", b.end_s},
                    {"count", b.count}});
  j["duration_histogram"] = bins;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_stats_csv(const DatasetStats& s, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "bin_start,bin_end,count\n";
  for (const auto& b : s.duration_histogram)
    out << b.start_s << "," << b.end_s << "," << b.count << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
