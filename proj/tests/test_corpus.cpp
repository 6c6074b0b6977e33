#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "hardsynth/corpus.hpp"
#include "hardsynth/errors.hpp"
#include "hardsynth/wav.hpp"

#include "test_util.hpp"

using namespace hardsynth;

namespace {

Utterance utt(const std::string& id, const std::string& text = "hello world",
              double dur = 4.0) {
  Utterance u;
  u.id = id;
  u.audio_ref = "/audio/" + id + ".wav";
  u.duration_s = dur;
  u.transcript = text;
  u.speaker_id = "spk1";
  u.gender = Gender::kFemale;
  u.origin = Origin::kReal;
  return u;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST_CASE("empty manifest loads as empty corpus") {
  hstest::TempDir dir("corpus_empty");
  write_lines(dir.file("m.jsonl"), {});
  const Corpus c = load_manifest(dir.file("m.jsonl"));
  CHECK(c.utterances.empty());
  CHECK(c.total_duration_s() == 0.0);
}

TEST_CASE("records are sorted by id on load") {
  hstest::TempDir dir("corpus_sort");
  const char* rec =
      R"({"id":"%s","audio":"a.wav","duration_s":1.5,"text":"x y","speaker":"s","gender":"f","origin":"real"})";
  std::vector<std::string> lines;
  for (const char* id : {"u2", "u1", "u3"}) {
    char buf[256];
    std::snprintf(buf, sizeof buf, rec, id);
    lines.push_back(buf);
  }
  write_lines(dir.file("m.jsonl"), lines);
  const Corpus c = load_manifest(dir.file("m.jsonl"));
  REQUIRE(c.utterances.size() == 3);
  CHECK(c.utterances[0].id == "u1");
  CHECK(c.utterances[1].id == "u2");
  CHECK(c.utterances[2].id == "u3");
}

TEST_CASE("duplicate id is rejected naming the id") {
  hstest::TempDir dir("corpus_dup");
  const std::string rec =
      R"({"id":"u1","audio":"a.wav","duration_s":1.5,"text":"x","speaker":"s","gender":"f","origin":"real"})";
  write_lines(dir.file("m.jsonl"), {rec, rec});
  CHECK_THROWS_WITH_AS(load_manifest(dir.file("m.jsonl")),
                       doctest::Contains("u1"), DuplicateIdError);
}

TEST_CASE("malformed line names the line number") {
  hstest::TempDir dir("corpus_bad");
  const std::string rec =
      R"({"id":"u1","audio":"a.wav","duration_s":1.5,"text":"x","speaker":"s","gender":"f","origin":"real"})";
  write_lines(dir.file("m.jsonl"), {rec, "{not json"});
  CHECK_THROWS_WITH_AS(load_manifest(dir.file("m.jsonl")),
                       doctest::Contains(":2"), ManifestError);
}

TEST_CASE("missing required field names the field") {
  hstest::TempDir dir("corpus_missing");
  write_lines(dir.file("m.jsonl"),
              {R"({"id":"u1","audio":"a.wav","duration_s":1.5,"text":"x","speaker":"s","gender":"f"})"});
  CHECK_THROWS_WITH_AS(load_manifest(dir.file("m.jsonl")),
                       doctest::Contains("origin"), ManifestError);
}

TEST_CASE("synthetic utterance requires prompt_id") {
  Utterance u = utt("syn-1");
  u.origin = Origin::kSynthetic;
  CHECK_THROWS_AS(make_corpus({u}), ManifestError);
  u.prompt_id = "u9";
  CHECK_NOTHROW(make_corpus({u}));
}

TEST_CASE("round-trip identity") {
  hstest::TempDir dir("corpus_rt");

  SUBCASE("empty corpus") {
    const Corpus c = make_corpus({});
    write_manifest(c, dir.file("m.jsonl"));
    CHECK(load_manifest(dir.file("m.jsonl")) == c);
  }

  SUBCASE("mixed corpus") {
    Utterance s = utt("syn-9", "rewritten words here");
    s.origin = Origin::kSynthetic;
    s.prompt_id = "u1";
    s.gender = Gender::kUnknown;
    const Corpus c = make_corpus({utt("u1"), utt("u2", "another line", 2.25), s});
    write_manifest(c, dir.file("m.jsonl"));
    CHECK(load_manifest(dir.file("m.jsonl")) == c);
  }

  SUBCASE("non-ASCII transcript round-trips byte-identical") {
    const Corpus c = make_corpus({utt("u1", "a na\xc3\xafve test")});
    write_manifest(c, dir.file("m.jsonl"));
    const Corpus back = load_manifest(dir.file("m.jsonl"));
    REQUIRE(back.utterances.size() == 1);
    CHECK(back.utterances[0].transcript == "a na\xc3\xafve test");
  }
}

TEST_CASE("load is insensitive to record order") {
  hstest::TempDir dir("corpus_order");
  const Corpus c = make_corpus({utt("u1"), utt("u2"), utt("u3")});
  write_manifest(c, dir.file("fwd.jsonl"));

  std::ifstream in(dir.file("fwd.jsonl"));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  std::reverse(lines.begin(), lines.end());
  write_lines(dir.file("rev.jsonl"), lines);

  CHECK(load_manifest(dir.file("rev.jsonl")) == c);
}

TEST_CASE("audio duration validation against WAV header") {
  hstest::TempDir dir("corpus_wav");
  const std::string wav = dir.file("u1.wav");
  write_wav(wav, tone_samples(1.5));

  Utterance u = utt("u1", "x", 1.5);
  u.audio_ref = wav;
  write_manifest(make_corpus({u}), dir.file("m.jsonl"));
  CHECK_NOTHROW(load_manifest(dir.file("m.jsonl"), /*validate_audio=*/true));

  u.duration_s = 1.7;
  write_manifest(make_corpus({u}), dir.file("m2.jsonl"));
  CHECK_THROWS_AS(load_manifest(dir.file("m2.jsonl"), true), ManifestError);
}

TEST_CASE("wav header round-trip with comment chunk") {
  hstest::TempDir dir("wav_rt");
  const std::string path = dir.file("t.wav");
  write_wav(path, tone_samples(0.5), 16000, std::string("{\"k\":1}"));
  const WavInfo info = read_wav_info(path);
  CHECK(info.sample_rate == 16000);
  CHECK(info.channels == 1);
  CHECK(info.bits_per_sample == 16);
  CHECK(info.duration_s() == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(info.comment.has_value());
  CHECK(*info.comment == "{\"k\":1}");
}

TEST_CASE("truncated wav is a FormatError") {
  hstest::TempDir dir("wav_trunc");
  const std::string path = dir.file("t.wav");
  write_wav(path, tone_samples(0.2));
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), std::streamsize(data.size() / 2));
  out.close();
  CHECK_THROWS_AS(read_wav_info(path), FormatError);
}
