#include "hardsynth/metrics.hpp"

#include <algorithm>

#include "hardsynth/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardsynth {

double AlignmentCounts::error_rate() const {
  if (ref_len == 0) throw EmptyReferenceError("error_rate: empty reference");
  return double(distance()) / double(ref_len);
}

namespace {

struct Cell {
  std::uint64_t dist = 0;
  std::uint64_t subs = 0;
  std::uint64_t dels = 0;
  std::uint64_t ins = 0;
};

}  // namespace

AlignmentCounts edit_distance(const std::vector<std::string>& ref,
                              const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();

  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, 0, 0, j};

  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, 0, i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool match = ref[i - 1] == hyp[j - 1];
      // diagonal preferred on ties: substitutions over insert+delete pairs
      Cell best = prev[j - 1];
      if (!match) {
        ++best.dist;
        ++best.subs;
      }
      if (prev[j].dist + 1 < best.dist) {
        best = prev[j];
        ++best.dist;
        ++best.dels;
      }
      if (cur[j - 1].dist + 1 < best.dist) {
        best = cur[j - 1];
        ++best.dist;
        ++best.ins;
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }

  return {prev[m].subs, prev[m].dels, prev[m].ins, n};
}

AlignmentCounts align_counts(const std::string& ref, const std::string& hyp,
                             TokenUnit unit, const NormPolicy& policy) {
  const std::string nref = normalize(ref, policy);
  const std::string nhyp = normalize(hyp, policy);
  if (unit == TokenUnit::kChar)
    return edit_distance(char_tokens(nref), char_tokens(nhyp));
  return edit_distance(word_tokens(nref), word_tokens(nhyp));
}

double cer(const std::string& ref, const std::string& hyp,
           const NormPolicy& policy) {
  return align_counts(ref, hyp, TokenUnit::kChar, policy).error_rate();
}

double wer(const std::string& ref, const std::string& hyp,
           const NormPolicy& policy) {
  return align_counts(ref, hyp, TokenUnit::kWord, policy).error_rate();
}

std::vector<AlignmentCounts> score_pairs_serial(
    const std::vector<TextPair>& pairs, TokenUnit unit,
    const NormPolicy& policy) {
  std::vector<AlignmentCounts> counts(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    counts[i] = align_counts(pairs[i].first, pairs[i].second, unit, policy);
  return counts;
}

std::vector<AlignmentCounts> score_pairs_parallel(
    const std::vector<TextPair>& pairs, TokenUnit unit,
    const NormPolicy& policy) {
  std::vector<AlignmentCounts> counts(pairs.size());
  const std::int64_t n = std::int64_t(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::int64_t i = 0; i < n; ++i)
    counts[i] = align_counts(pairs[i].first, pairs[i].second, unit, policy);
  return counts;
}

double corpus_error_rate(const std::vector<AlignmentCounts>& counts) {
  std::uint64_t errors = 0, ref_total = 0;
  for (const auto& c : counts) {
    errors += c.distance();
    ref_total += c.ref_len;
  }
  if (ref_total == 0)
    throw EmptyReferenceError("corpus_error_rate: all references empty");
  return double(errors) / double(ref_total);
}

double corpus_error_rate(const std::vector<TextPair>& pairs, TokenUnit unit,
                         const NormPolicy& policy) {
  return corpus_error_rate(score_pairs_parallel(pairs, unit, policy));
}

}  // namespace hardsynth
