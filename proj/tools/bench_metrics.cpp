// Benchmark comparing the serial reference batch scorer against the
// OpenMP-parallel kernel on random string pairs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hardsynth/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hardsynth;

namespace {

std::vector<TextPair> random_pairs(std::size_t n, std::size_t max_len,
                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto random_text = [&]() {
    const std::size_t len = gen() % max_len;
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
      const int c = int(gen() % 27);
      s.push_back(c == 26 ? ' ' : char('a' + c));
    }
    return s;
  };
  std::vector<TextPair> pairs(n);
  for (auto& p : pairs) p = {random_text(), random_text()};
  return pairs;
}

double time_ms(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_pairs = argc > 1 ? std::stoul(argv[1]) : 20000;
  const std::size_t max_len = argc > 2 ? std::stoul(argv[2]) : 120;

  const auto pairs = random_pairs(n_pairs, max_len, 42);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not available, parallel kernel runs serially\n");
#endif
  std::printf("pairs: %zu, max length: %zu\n", n_pairs, max_len);

  for (const auto unit : {TokenUnit::kChar, TokenUnit::kWord}) {
    const char* name = unit == TokenUnit::kChar ? "char" : "word";
    std::vector<AlignmentCounts> serial, parallel;
    const double serial_ms =
        time_ms([&] { serial = score_pairs_serial(pairs, unit); });
    const double parallel_ms =
        time_ms([&] { parallel = score_pairs_parallel(pairs, unit); });
    const bool equal = serial == parallel;
    std::printf("%s: serial %8.1f ms, parallel %8.1f ms, speedup %.2fx, %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                equal ? "outputs identical" : "OUTPUT MISMATCH");
    if (!equal) return 1;
  }
  return 0;
}
