#include "hardsynth/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "hardsynth/errors.hpp"

namespace hardsynth {

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t off) {
  return std::uint32_t(std::uint8_t(s[off])) |
         std::uint32_t(std::uint8_t(s[off + 1])) << 8 |
         std::uint32_t(std::uint8_t(s[off + 2])) << 16 |
         std::uint32_t(std::uint8_t(s[off + 3])) << 24;
}

std::uint16_t get_u16(const std::string& s, std::size_t off) {
  return std::uint16_t(std::uint8_t(s[off]) | (std::uint8_t(s[off + 1]) << 8));
}

}  // namespace

void write_wav(const std::string& path, const std::vector<std::int16_t>& samples,
               std::uint32_t sample_rate,
               const std::optional<std::string>& comment) {
  std::string body;

  // fmt
  body += "fmt ";
  put_u32(body, 16);
  put_u16(body, 1);  // PCM
  put_u16(body, 1);  // mono
  put_u32(body, sample_rate);
  put_u32(body, sample_rate * 2);  // byte rate
  put_u16(body, 2);                // block align
  put_u16(body, 16);               // bits per sample

  if (comment) {
    std::string icmt = *comment;
    icmt.push_back('\0');
    if (icmt.size() % 2) icmt.push_back('\0');
    body += "LIST";
    put_u32(body, std::uint32_t(4 + 8 + icmt.size()));
    body += "INFO";
    body += "ICMT";
    put_u32(body, std::uint32_t(icmt.size()));
    body += icmt;
  }

  body += "data";
  put_u32(body, std::uint32_t(samples.size() * 2));
  for (std::int16_t s : samples) put_u16(body, std::uint16_t(s));

  std::string file;
  file += "RIFF";
  put_u32(file, std::uint32_t(4 + body.size()));
  file += "WAVE";
  file += body;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(file.data(), std::streamsize(file.size()));
  if (!out) throw IoError("write failed: " + path);
}

WavInfo read_wav_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 ||
      data.compare(8, 4, "WAVE") != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  WavInfo info;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string id = data.substr(pos, 4);
    const std::uint32_t size = get_u32(data, pos + 4);
    const std::size_t payload = pos + 8;
    if (payload + size > data.size())
      throw FormatError("truncated chunk '" + id + "' in " + path);

    if (id == "fmt ") {
      if (size < 16) throw FormatError("short fmt chunk in " + path);
      const std::uint16_t format = get_u16(data, payload);
      if (format != 1) throw FormatError("non-PCM WAV: " + path);
      info.channels = get_u16(data, payload + 2);
      info.sample_rate = get_u32(data, payload + 4);
      info.bits_per_sample = get_u16(data, payload + 14);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data before fmt in " + path);
      const std::uint32_t bytes_per_frame =
          info.channels * (info.bits_per_sample / 8);
      if (bytes_per_frame == 0) throw FormatError("bad fmt in " + path);
      info.n_samples = size / bytes_per_frame;
      have_data = true;
    } else if (id == "LIST" && size >= 4 &&
               data.compare(payload, 4, "INFO") == 0) {
      std::size_t p = payload + 4;
      const std::size_t end = payload + size;
      while (p + 8 <= end) {
        const std::string sub = data.substr(p, 4);
        const std::uint32_t ssize = get_u32(data, p + 4);
        if (p + 8 + ssize > end) break;
        if (sub == "ICMT") {
          std::string c = data.substr(p + 8, ssize);
          while (!c.empty() && c.back() == '\0') c.pop_back();
          info.comment = c;
        }
        p += 8 + ssize + (ssize % 2);
      }
    }
    pos = payload + size + (size % 2);
  }

  if (!have_fmt || !have_data)
    throw FormatError("missing fmt/data chunk in " + path);
  return info;
}

std::vector<std::int16_t> tone_samples(double duration_s,
                                       std::uint32_t sample_rate,
                                       double freq_hz) {
  const std::size_t n = std::size_t(std::llround(duration_s * sample_rate));
  std::vector<std::int16_t> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = double(i) / sample_rate;
    samples[i] = std::int16_t(8000.0 * std::sin(2.0 * M_PI * freq_hz * t));
  }
  return samples;
}

}  // namespace hardsynth
