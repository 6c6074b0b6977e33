#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>

#include "hardsynth/ctc.hpp"
#include "hardsynth/errors.hpp"

#include "test_util.hpp"

using namespace hardsynth;

namespace {

const std::vector<std::string> kLabels = {"<b>", "a", "b", "c"};

PosteriorMatrix from_path(const std::vector<std::uint32_t>& path,
                          std::size_t vocab) {
  PosteriorMatrix m;
  m.frames = path.size();
  m.vocab = vocab;
  m.blank_index = 0;
  m.labels.assign(kLabels.begin(), kLabels.begin() + std::ptrdiff_t(vocab));
  m.logprobs.assign(m.frames * m.vocab, -10.0f);
  for (std::size_t t = 0; t < path.size(); ++t)
    m.logprobs[t * vocab + path[t]] = 0.0f;
  return m;
}

// Test-side collapse oracle: walk the path, emit a label whenever it differs
// from its predecessor, then drop blanks.
std::string oracle_collapse(const std::vector<std::uint32_t>& path) {
  std::string out;
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (t > 0 && path[t] == path[t - 1]) continue;
    if (path[t] != 0) out += kLabels[path[t]];
  }
  return out;
}

PosteriorMatrix random_matrix(std::mt19937_64& gen, std::size_t frames,
                              std::size_t vocab) {
  PosteriorMatrix m;
  m.frames = frames;
  m.vocab = vocab;
  m.blank_index = 0;
  m.labels.assign(kLabels.begin(), kLabels.begin() + std::ptrdiff_t(vocab));
  m.logprobs.resize(frames * vocab);
  std::uniform_real_distribution<float> dist(-8.0f, 0.0f);
  for (auto& v : m.logprobs) v = dist(gen);
  return m;
}

}  // namespace

TEST_CASE("decode of empty matrix is empty string") {
  PosteriorMatrix m;
  m.vocab = 3;
  m.blank_index = 0;
  m.labels = {"<b>", "a", "b"};
  CHECK(greedy_decode(m) == "");
}

TEST_CASE("collapse examples") {
  // blank, a, a, blank, a, b
  CHECK(greedy_decode(from_path({0, 1, 1, 0, 1, 2}, 3)) == "aab");
  CHECK(greedy_decode(from_path({0, 0, 0}, 3)) == "");
  CHECK(greedy_decode(from_path({1, 1, 1}, 3)) == "a");
}

TEST_CASE("argmax ties resolve to the lowest index") {
  PosteriorMatrix m;
  m.frames = 1;
  m.vocab = 3;
  m.blank_index = 2;  // keep blank away from the tied pair
  m.labels = {"a", "b", "<b>"};
  m.logprobs = {-1.0f, -1.0f, -5.0f};
  CHECK(greedy_decode(m) == "a");
}

TEST_CASE("dimension mismatch is rejected") {
  PosteriorMatrix m;
  m.frames = 2;
  m.vocab = 3;
  m.blank_index = 0;
  m.labels = {"<b>", "a", "b"};
  m.logprobs.assign(5, 0.0f);  // should be 6
  CHECK_THROWS_AS(greedy_decode(m), DimensionError);
}

TEST_CASE("exhaustive agreement with collapse oracle, paths <= 8, vocab <= 4") {
  for (std::size_t vocab = 1; vocab <= 4; ++vocab) {
    for (std::size_t len = 0; len <= 8; ++len) {
      std::uint64_t total = 1;
      for (std::size_t i = 0; i < len; ++i) total *= vocab;
      for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<std::uint32_t> path(len);
        std::uint64_t c = code;
        for (std::size_t i = 0; i < len; ++i) {
          path[i] = std::uint32_t(c % vocab);
          c /= vocab;
        }
        REQUIRE(greedy_decode(from_path(path, vocab)) == oracle_collapse(path));
      }
    }
  }
}

TEST_CASE("frame duplication invariance on random matrices") {
  std::mt19937_64 gen(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t frames = 1 + gen() % 10;
    const std::size_t vocab = 2 + gen() % 3;
    const PosteriorMatrix m = random_matrix(gen, frames, vocab);
    const std::string base = greedy_decode(m);

    const std::size_t dup = gen() % frames;
    PosteriorMatrix m2 = m;
    m2.frames = frames + 1;
    m2.logprobs.insert(
        m2.logprobs.begin() + std::ptrdiff_t((dup + 1) * vocab),
        m.logprobs.begin() + std::ptrdiff_t(dup * vocab),
        m.logprobs.begin() + std::ptrdiff_t((dup + 1) * vocab));
    CHECK(greedy_decode(m2) == base);
  }
}

TEST_CASE("blank insertion leaves decode unchanged or splits a repeat") {
  // enumerated against the oracle: insert a blank frame at every position of
  // every path of length <= 6 over vocab 4
  const std::size_t vocab = 4, max_len = 6;
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= vocab;
    for (std::uint64_t code = 0; code < total; ++code) {
      std::vector<std::uint32_t> path(len);
      std::uint64_t c = code;
      for (std::size_t i = 0; i < len; ++i) {
        path[i] = std::uint32_t(c % vocab);
        c /= vocab;
      }
      for (std::size_t pos = 0; pos <= len; ++pos) {
        std::vector<std::uint32_t> with_blank = path;
        with_blank.insert(with_blank.begin() + std::ptrdiff_t(pos), 0);
        REQUIRE(greedy_decode(from_path(with_blank, vocab)) ==
                oracle_collapse(with_blank));
      }
    }
  }
}

TEST_CASE("CTCL round-trip") {
  hstest::TempDir dir("ctcl");
  std::mt19937_64 gen(5);

  SUBCASE("empty matrix") {
    PosteriorMatrix m;
    m.frames = 0;
    m.vocab = 3;
    m.blank_index = 0;
    m.labels = {"<b>", "a", "b"};
    save_posteriors(m, dir.file("e.ctcl"));
    const PosteriorMatrix back = load_posteriors(dir.file("e.ctcl"));
    CHECK(back.frames == 0);
    CHECK(back.vocab == 3);
    CHECK(back.labels == m.labels);
  }

  SUBCASE("random 5x4 matrix is bit-identical") {
    const PosteriorMatrix m = random_matrix(gen, 5, 4);
    save_posteriors(m, dir.file("r.ctcl"));
    const PosteriorMatrix back = load_posteriors(dir.file("r.ctcl"));
    CHECK(back.frames == m.frames);
    CHECK(back.vocab == m.vocab);
    CHECK(back.blank_index == m.blank_index);
    CHECK(back.logprobs == m.logprobs);
    CHECK(back.labels == m.labels);
  }
}

TEST_CASE("CTCL format errors") {
  hstest::TempDir dir("ctcl_bad");

  SUBCASE("bad magic") {
    std::ofstream out(dir.file("bad.ctcl"), std::ios::binary);
    out << "NOPE\x01\x02\x03\x04";
    out.close();
    CHECK_THROWS_AS(load_posteriors(dir.file("bad.ctcl")), FormatError);
  }

  SUBCASE("truncated payload") {
    std::mt19937_64 gen(6);
    const PosteriorMatrix m = random_matrix(gen, 4, 3);
    save_posteriors(m, dir.file("t.ctcl"));
    std::ifstream in(dir.file("t.ctcl"), std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(dir.file("t.ctcl"), std::ios::binary | std::ios::trunc);
    out.write(data.data(), std::streamsize(data.size() - 7));
    out.close();
    CHECK_THROWS_AS(load_posteriors(dir.file("t.ctcl")), FormatError);
  }

  SUBCASE("blank index out of range") {
    std::mt19937_64 gen(8);
    PosteriorMatrix m = random_matrix(gen, 2, 3);
    m.blank_index = 7;
    CHECK_THROWS_AS(save_posteriors(m, dir.file("b.ctcl")), FormatError);
  }
}

TEST_CASE("row normalization validation") {
  PosteriorMatrix m;
  m.frames = 1;
  m.vocab = 2;
  m.blank_index = 0;
  m.labels = {"<b>", "a"};
  const float half = std::log(0.5f);
  m.logprobs = {half, half};
  CHECK_NOTHROW(validate(m, /*validate_rows=*/true));
  m.logprobs = {-0.1f, -0.1f};
  CHECK_THROWS_AS(validate(m, true), FormatError);
}
