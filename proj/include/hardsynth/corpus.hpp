#ifndef HARDSYNTH_CORPUS_HPP
#define HARDSYNTH_CORPUS_HPP

#include <optional>
#include <string>
#include <vector>

namespace hardsynth {

enum class Gender { kMale, kFemale, kUnknown };
enum class Origin { kReal, kSynthetic };

std::string to_string(Gender g);
std::string to_string(Origin o);
Gender gender_from_string(const std::string& s);  // "m" | "f" | "u"
Origin origin_from_string(const std::string& s);  // "real" | "synthetic"

struct Utterance {
  std::string id;
  std::string audio_ref;
  double duration_s = 0.0;
  std::string transcript;
  std::string speaker_id;
  Gender gender = Gender::kUnknown;
  Origin origin = Origin::kReal;
  // Required when origin == synthetic: id of the hard prompt utterance.
  std::optional<std::string> prompt_id;

  bool operator==(const Utterance&) const = default;
};

// Immutable after load; iteration order is ascending id. The name is a
// display label and does not participate in equality or persistence.
struct Corpus {
  std::string name;
  std::vector<Utterance> utterances;

  double total_duration_s() const;
  bool operator==(const Corpus& other) const {
    return utterances == other.utterances;
  }
};

// Sorts by id and enforces the corpus invariants (unique ids, positive
// durations, synthetic utterances carry prompt_id).
Corpus make_corpus(std::vector<Utterance> utterances, std::string name = {});

// Line-delimited JSON manifest, one record per utterance.
// With validate_audio set, each record's duration_s is cross-checked against
// the WAV header within 10 ms.
Corpus load_manifest(const std::string& path, bool validate_audio = false);
void write_manifest(const Corpus& corpus, const std::string& path);

}  // namespace hardsynth

#endif
