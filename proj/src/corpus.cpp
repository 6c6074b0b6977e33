#include "hardsynth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "hardsynth/errors.hpp"
#include "hardsynth/wav.hpp"

namespace hardsynth {

using nlohmann::json;

std::string to_string(Gender g) {
  switch (g) {
    case Gender::kMale: return "m";
    case Gender::kFemale: return "f";
    default: return "u";
  }
}

std::string to_string(Origin o) {
  return o == Origin::kReal ? "real" : "synthetic";
}

Gender gender_from_string(const std::string& s) {
  if (s == "m") return Gender::kMale;
  if (s == "f") return Gender::kFemale;
  if (s == "u") return Gender::kUnknown;
  throw ManifestError("bad gender value '" + s + "' (want m|f|u)");
}

Origin origin_from_string(const std::string& s) {
  if (s == "real") return Origin::kReal;
  if (s == "synthetic") return Origin::kSynthetic;
  throw ManifestError("bad origin value '" + s + "' (want real|synthetic)");
}

double Corpus::total_duration_s() const {
  double total = 0.0;
  for (const auto& u : utterances) total += u.duration_s;
  return total;
}

namespace {

void check_utterance(const Utterance& u) {
  if (u.id.empty()) throw ManifestError("empty id");
  if (!(u.duration_s > 0.0))
    throw ManifestError("duration_s must be > 0 for id '" + u.id + "'");
  if (u.transcript.empty())
    throw ManifestError("empty transcript for id '" + u.id + "'");
  if (u.origin == Origin::kSynthetic && !u.prompt_id)
    throw ManifestError("synthetic utterance '" + u.id +
                        "' is missing prompt_id");
}

json to_json(const Utterance& u) {
  json j;
  j["id"] = u.id;
  j["audio"] = u.audio_ref;
  j["duration_s"] = u.duration_s;
  j["text"] = u.transcript;
  j["speaker"] = u.speaker_id;
  j["gender"] = to_string(u.gender);
  j["origin"] = to_string(u.origin);
  if (u.prompt_id) j["prompt_id"] = *u.prompt_id;
  return j;
}

template <typename T>
T require_field(const json& j, const char* key) {
  if (!j.contains(key))
    throw ManifestError(std::string("missing required field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ManifestError(std::string("bad type for field '") + key + "'");
  }
}

Utterance utterance_from_json(const json& j) {
  Utterance u;
  u.id = require_field<std::string>(j, "id");
  u.audio_ref = require_field<std::string>(j, "audio");
  u.duration_s = require_field<double>(j, "duration_s");
  u.transcript = require_field<std::string>(j, "text");
  u.speaker_id = require_field<std::string>(j, "speaker");
  u.gender = gender_from_string(require_field<std::string>(j, "gender"));
  u.origin = origin_from_string(require_field<std::string>(j, "origin"));
  if (j.contains("prompt_id")) u.prompt_id = j.at("prompt_id").get<std::string>();
  check_utterance(u);
  return u;
}

}  // namespace

Corpus make_corpus(std::vector<Utterance> utterances, std::string name) {
  std::sort(utterances.begin(), utterances.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  std::unordered_set<std::string> seen;
  for (const auto& u : utterances) {
    check_utterance(u);
    if (!seen.insert(u.id).second)
      throw DuplicateIdError("duplicate id '" + u.id + "'");
  }
  return Corpus{std::move(name), std::move(utterances)};
}

Corpus load_manifest(const std::string& path, bool validate_audio) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  std::vector<Utterance> utterances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ManifestError(path + ":" + std::to_string(line_no) +
                          ": malformed manifest line");
    try {
      utterances.push_back(utterance_from_json(j));
    } catch (const DuplicateIdError&) {
      throw;
    } catch (const Error& e) {
      throw ManifestError(path + ":" + std::to_string(line_no) + ": " +
                          e.what());
    }
  }

  Corpus corpus = make_corpus(std::move(utterances), path);
  if (validate_audio) {
    for (const auto& u : corpus.utterances) {
      const WavInfo info = read_wav_info(u.audio_ref);
      if (std::abs(info.duration_s() - u.duration_s) > 0.010)
        throw ManifestError("duration mismatch for '" + u.id + "': manifest " +
                            std::to_string(u.duration_s) + "s vs audio " +
                            std::to_string(info.duration_s()) + "s");
    }
  }
  return corpus;
}

void write_manifest(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& u : corpus.utterances) out << to_json(u).dump() << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hardsynth
