#ifndef HARDSYNTH_CTC_HPP
#define HARDSYNTH_CTC_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hardsynth {

// Frame-level label log-probabilities, row-major T x V.
struct PosteriorMatrix {
  std::size_t frames = 0;
  std::size_t vocab = 0;
  std::vector<float> logprobs;  // frames * vocab
  std::uint32_t blank_index = 0;
  std::vector<std::string> labels;  // vocab entries, index order

  float at(std::size_t t, std::size_t v) const {
    return logprobs[t * vocab + v];
  }
};

// Checks dimensions; with validate_rows, additionally requires each row to
// logsumexp to 0 within 1e-3.
void validate(const PosteriorMatrix& m, bool validate_rows = false);

// Per-frame argmax (ties to the lowest index), collapse consecutive
// duplicates, drop blanks, join labels with no separator.
std::string greedy_decode(const PosteriorMatrix& m);

// Argmax path of a matrix; exposed for tests and diagnostics.
std::vector<std::uint32_t> argmax_path(const PosteriorMatrix& m);

// Collapse+deblank of an explicit label-index path.
std::string collapse_path(const std::vector<std::uint32_t>& path,
                          std::uint32_t blank_index,
                          const std::vector<std::string>& labels);

// CTCL binary format: "CTCL" magic, LE u32 T, V, blank_index, then T*V LE
// f32 row-major. Labels live in a JSON sidecar "<file>.labels.json".
PosteriorMatrix load_posteriors(const std::string& path);
void save_posteriors(const PosteriorMatrix& m, const std::string& path);

}  // namespace hardsynth

#endif
