#ifndef HARDSYNTH_METRICS_HPP
#define HARDSYNTH_METRICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hardsynth/textnorm.hpp"

namespace hardsynth {

// Minimal unit-cost alignment between a reference and hypothesis token
// sequence. distance() = S + D + I is minimal; among minimal alignments,
// substitutions are preferred over insert+delete pairs.
struct AlignmentCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t ref_len = 0;

  std::uint64_t distance() const {
    return substitutions + deletions + insertions;
  }
  double error_rate() const;  // throws EmptyReferenceError when ref_len == 0

  bool operator==(const AlignmentCounts&) const = default;
};

enum class TokenUnit { kChar, kWord };

AlignmentCounts edit_distance(const std::vector<std::string>& ref,
                              const std::vector<std::string>& hyp);

AlignmentCounts align_counts(const std::string& ref, const std::string& hyp,
                             TokenUnit unit, const NormPolicy& policy = {});

// Character error rate over normalized text (spaces count as characters).
// May exceed 1.0. Throws EmptyReferenceError when the normalized ref is empty.
double cer(const std::string& ref, const std::string& hyp,
           const NormPolicy& policy = {});

// Word error rate over whitespace-delimited tokens of normalized text.
double wer(const std::string& ref, const std::string& hyp,
           const NormPolicy& policy = {});

using TextPair = std::pair<std::string, std::string>;  // (ref, hyp)

// Batch alignment of many pairs. The serial version is the reference
// implementation; the parallel version runs the same kernel under OpenMP
// and must produce identical output.
std::vector<AlignmentCounts> score_pairs_serial(
    const std::vector<TextPair>& pairs, TokenUnit unit,
    const NormPolicy& policy = {});
std::vector<AlignmentCounts> score_pairs_parallel(
    const std::vector<TextPair>& pairs, TokenUnit unit,
    const NormPolicy& policy = {});

// Micro-averaged corpus rate: sum(S+D+I) / sum(ref_len).
// Throws EmptyReferenceError when every normalized reference is empty.
double corpus_error_rate(const std::vector<TextPair>& pairs, TokenUnit unit,
                         const NormPolicy& policy = {});
double corpus_error_rate(const std::vector<AlignmentCounts>& counts);

}  // namespace hardsynth

#endif
