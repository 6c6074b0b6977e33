#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hardsynth/errors.hpp"
#include "hardsynth/metrics.hpp"
#include "hardsynth/textnorm.hpp"

#include "test_util.hpp"

using namespace hardsynth;

TEST_CASE("normalize default policy") {
  CHECK(normalize("The Girl, hesitated.") == "the girl hesitated");
  CHECK(normalize("half-smiling") == "half smiling");
  CHECK(normalize("it's  a   test") == "it's a test");
  CHECK(normalize("") == "");
  CHECK(normalize("  leading and trailing  ") == "leading and trailing");
}

TEST_CASE("normalize is idempotent on random inputs") {
  std::mt19937_64 gen(7);
  const std::string charset = "abcXYZ '-.,;!?\t  ";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const std::size_t len = gen() % 40;
    for (std::size_t k = 0; k < len; ++k) s.push_back(charset[gen() % charset.size()]);
    const std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("normalize policy toggles") {
  NormPolicy keep_case;
  keep_case.lowercase = false;
  CHECK(normalize("Hello, World", keep_case) == "Hello World");

  NormPolicy keep_punct;
  keep_punct.strip_punct = false;
  CHECK(normalize("Hello, World", keep_punct) == "hello, world");
}

TEST_CASE("edit_distance basics") {
  const auto id = edit_distance(char_tokens("abc"), char_tokens("abc"));
  CHECK(id.substitutions == 0);
  CHECK(id.deletions == 0);
  CHECK(id.insertions == 0);
  CHECK(id.ref_len == 3);

  CHECK(edit_distance(char_tokens("kitten"), char_tokens("sitting")).distance() == 3);

  const auto ins = edit_distance(char_tokens(""), char_tokens("ab"));
  CHECK(ins.insertions == 2);
  CHECK(ins.distance() == 2);

  const auto del = edit_distance(char_tokens("ab"), char_tokens(""));
  CHECK(del.deletions == 2);
  CHECK(del.distance() == 2);
}

TEST_CASE("substitutions preferred over insert+delete pairs") {
  const auto c = edit_distance(char_tokens("abc"), char_tokens("axc"));
  CHECK(c.substitutions == 1);
  CHECK(c.insertions == 0);
  CHECK(c.deletions == 0);
}

TEST_CASE("cer examples") {
  CHECK(cer("abc", "abc") == 0.0);
  CHECK(cer("abcde", "abcd") == doctest::Approx(0.2));
  CHECK(cer("a", "abc") == doctest::Approx(2.0));  // CER can exceed 1
  CHECK_THROWS_AS(cer("", "abc"), EmptyReferenceError);
  CHECK_THROWS_AS(cer("...", "abc"), EmptyReferenceError);  // empty after norm
}

TEST_CASE("cer counts spaces as characters") {
  // "a b" vs "ab": deleting the space is one error over three ref chars
  CHECK(cer("a b", "ab") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("wer examples") {
  CHECK(wer("a b c", "a x c") == doctest::Approx(1.0 / 3.0));
  CHECK(wer("same text", "same text") == 0.0);
  CHECK(wer("hello world", "") == doctest::Approx(1.0));
}

TEST_CASE("corpus_error_rate") {
  CHECK(corpus_error_rate({{"ab", "ab"}, {"ab", "ab"}}, TokenUnit::kChar) == 0.0);
  CHECK(corpus_error_rate({{"ab", "ab"}, {"ab", "aa"}}, TokenUnit::kChar) ==
        doctest::Approx(0.25));
  // single pair equals per-pair rate exactly
  const std::string ref = "the cat sat", hyp = "the bat sat down";
  CHECK(corpus_error_rate({{ref, hyp}}, TokenUnit::kWord) == wer(ref, hyp));
  CHECK(corpus_error_rate({{ref, hyp}}, TokenUnit::kChar) == cer(ref, hyp));
  CHECK_THROWS_AS(corpus_error_rate({{"", ""}}, TokenUnit::kChar),
                  EmptyReferenceError);
}

TEST_CASE("metric properties against oracle on random pairs") {
  std::mt19937_64 gen(1234);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = hstest::random_text(gen, 30);
    const std::string b = hstest::random_text(gen, 30);
    const auto ta = char_tokens(a), tb = char_tokens(b);
    const auto ab = edit_distance(ta, tb);
    const auto ba = edit_distance(tb, ta);
    // oracle agreement
    CHECK(ab.distance() == hstest::oracle_edit_distance(ta, tb));
    // symmetry
    CHECK(ab.distance() == ba.distance());
    // identity
    CHECK(edit_distance(ta, ta).distance() == 0);
    // length bounds
    const auto lo = ta.size() > tb.size() ? ta.size() - tb.size()
                                          : tb.size() - ta.size();
    CHECK(ab.distance() >= lo);
    CHECK(ab.distance() <= std::max(ta.size(), tb.size()));
  }
}

TEST_CASE("triangle inequality") {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 500; ++i) {
    const auto a = char_tokens(hstest::random_text(gen, 15));
    const auto b = char_tokens(hstest::random_text(gen, 15));
    const auto c = char_tokens(hstest::random_text(gen, 15));
    CHECK(edit_distance(a, c).distance() <=
          edit_distance(a, b).distance() + edit_distance(b, c).distance());
  }
}

TEST_CASE("parallel batch kernel matches serial reference") {
  std::mt19937_64 gen(555);
  std::vector<TextPair> pairs;
  for (int i = 0; i < 3000; ++i)
    pairs.emplace_back(hstest::random_text(gen, 40),
                       hstest::random_text(gen, 40));
  for (const auto unit : {TokenUnit::kChar, TokenUnit::kWord}) {
    const auto serial = score_pairs_serial(pairs, unit);
    const auto parallel = score_pairs_parallel(pairs, unit);
    REQUIRE(serial.size() == parallel.size());
    CHECK(serial == parallel);
  }
}
