#include "hardsynth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "hardsynth/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardsynth {

using nlohmann::json;

namespace {

struct GroupTotals {
  std::uint64_t errors = 0;
  std::uint64_t ref_words = 0;

  double wer() const {
    return ref_words ? double(errors) / double(ref_words) : 0.0;
  }
};

}  // namespace

EvalReport wer_report(
    const std::vector<std::pair<Utterance, std::string>>& pairs,
    const NormPolicy& policy, bool absolute_gender_gap) {
  if (pairs.empty()) throw EmptyInputError("wer_report: no pairs");

  GroupTotals overall;
  std::map<std::string, GroupTotals> by_speaker;
  std::map<std::string, GroupTotals> by_gender;

  for (const auto& [u, hyp] : pairs) {
    const AlignmentCounts c =
        align_counts(u.transcript, hyp, TokenUnit::kWord, policy);
    overall.errors += c.distance();
    overall.ref_words += c.ref_len;
    auto& sp = by_speaker[u.speaker_id];
    sp.errors += c.distance();
    sp.ref_words += c.ref_len;
    auto& g = by_gender[to_string(u.gender)];
    g.errors += c.distance();
    g.ref_words += c.ref_len;
  }
  if (overall.ref_words == 0)
    throw EmptyReferenceError("wer_report: all references empty");

  EvalReport r;
  r.n_utterances = pairs.size();
  r.overall_wer = overall.wer();
  for (const auto& [id, t] : by_speaker)
    r.per_speaker[id] = {t.wer(), t.ref_words};
  for (const auto& [g, t] : by_gender) r.per_gender[g] = {t.wer(), t.ref_words};

  const auto m = by_gender.find("m");
  const auto f = by_gender.find("f");
  if (m != by_gender.end() && f != by_gender.end() &&
      m->second.ref_words > 0 && f->second.ref_words > 0) {
    double gap = (m->second.wer() - f->second.wer()) * 100.0;
    if (absolute_gender_gap) gap = std::abs(gap);
    r.gender_gap_pp = gap;
  }

  // population variance of per-speaker WERs in percentage points
  double mean = 0.0;
  for (const auto& [id, t] : r.per_speaker) mean += t.wer * 100.0;
  mean /= double(r.per_speaker.size());
  double var = 0.0;
  for (const auto& [id, t] : r.per_speaker) {
    const double d = t.wer * 100.0 - mean;
    var += d * d;
  }
  r.speaker_variance_pp2 = var / double(r.per_speaker.size());
  return r;
}

double speaking_speed_delta(
    const std::vector<std::pair<Utterance, Utterance>>& pairs,
    const NormPolicy& policy) {
  if (pairs.empty()) throw EmptyInputError("speaking_speed_delta: no pairs");
  double total = 0.0;
  for (const auto& [gen, prompt] : pairs) {
    if (gen.duration_s <= 0.0 || prompt.duration_s <= 0.0)
      throw ZeroDurationError("speaking_speed_delta: zero duration");
    const double sg =
        double(word_tokens(normalize(gen.transcript, policy)).size()) /
        gen.duration_s;
    const double sp =
        double(word_tokens(normalize(prompt.transcript, policy)).size()) /
        prompt.duration_s;
    total += std::abs(sg - sp);
  }
  return total / double(pairs.size());
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw DimensionError("cosine_similarity: dimensions " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw ZeroNormError("cosine_similarity: zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityReport similarity_report(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    ScorerClient& scorer, int parallelism, double max_failure_frac) {
  if (pairs.empty()) throw EmptyInputError("similarity_report: no pairs");

  const std::size_t n = pairs.size();
  std::vector<double> sims(n, 0.0), moses(n, 0.0);
  std::vector<char> success(n, 0);

  const std::int64_t count = std::int64_t(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallelism, 1))
#endif
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const std::size_t i = std::size_t(idx);
    try {
      sims[i] = cosine_similarity(scorer.embed(pairs[i].first),
                                  scorer.embed(pairs[i].second));
      moses[i] = scorer.mos(pairs[i].first);
      success[i] = 1;
    } catch (const std::exception&) {
    }
  }

  SimilarityReport r;
  for (std::size_t i = 0; i < n; ++i) {
    if (!success[i]) continue;
    r.mean_sim_spk += sims[i];
    r.mean_mos += moses[i];
    ++r.n_pairs;
  }
  const std::size_t failures = n - std::size_t(r.n_pairs);
  if (double(failures) / double(n) > max_failure_frac)
    throw ExcessiveFailuresError(std::to_string(failures) + " of " +
                                 std::to_string(n) + " scorer calls failed");
  r.mean_sim_spk /= double(r.n_pairs);
  r.mean_mos /= double(r.n_pairs);
  return r;
}

void write_eval_json(const EvalReport& r, const std::string& path) {
  json j;
  j["overall_wer"] = r.overall_wer;
  j["n_utterances"] = r.n_utterances;
  j["speaker_variance_pp2"] = r.speaker_variance_pp2;
  if (r.gender_gap_pp)
    j["gender_gap_pp"] = *r.gender_gap_pp;
  else
    j["gender_gap_pp"] = nullptr;
  json sp = json::object();
  for (const auto& [id, g] : r.per_speaker)
    sp[id] = {{"wer", g.wer}, {"n_ref_words", g.n_ref_words}};
  j["per_speaker"] = sp;
  json ge = json::object();
  for (const auto& [id, g] : r.per_gender)
    ge[id] = {{"wer", g.wer}, {"n_ref_words", g.n_ref_words}};
  j["per_gender"] = ge;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_eval_csv(const EvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "speaker,wer,n_ref_words\n";
  for (const auto& [id, g] : r.per_speaker)
    out << id << "," << g.wer << "," << g.n_ref_words << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
