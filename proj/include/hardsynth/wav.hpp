#ifndef HARDSYNTH_WAV_HPP
#define HARDSYNTH_WAV_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hardsynth {

// RIFF WAV, 16 kHz mono 16-bit PCM. The optional comment is a free-form
// string stored in a LIST/INFO ICMT chunk; the mock clients use it to carry
// JSON metadata through the synthesis loop.
struct WavInfo {
  std::uint32_t sample_rate = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint64_t n_samples = 0;  // per channel
  std::optional<std::string> comment;

  double duration_s() const {
    return sample_rate ? double(n_samples) / sample_rate : 0.0;
  }
};

WavInfo read_wav_info(const std::string& path);

void write_wav(const std::string& path, const std::vector<std::int16_t>& samples,
               std::uint32_t sample_rate = 16000,
               const std::optional<std::string>& comment = std::nullopt);

// Deterministic tone pattern used by the mock TTS.
std::vector<std::int16_t> tone_samples(double duration_s,
                                       std::uint32_t sample_rate = 16000,
                                       double freq_hz = 440.0);

}  // namespace hardsynth

#endif
