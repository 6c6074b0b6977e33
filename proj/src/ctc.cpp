#include "hardsynth/ctc.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "hardsynth/errors.hpp"

namespace hardsynth {

void validate(const PosteriorMatrix& m, bool validate_rows) {
  if (m.logprobs.size() != m.frames * m.vocab)
    throw DimensionError("posterior matrix: " +
                         std::to_string(m.logprobs.size()) + " values for " +
                         std::to_string(m.frames) + "x" +
                         std::to_string(m.vocab));
  if (m.vocab == 0 && m.frames > 0)
    throw DimensionError("posterior matrix with empty vocabulary");
  if (m.vocab > 0 && m.blank_index >= m.vocab)
    throw FormatError("blank_index " + std::to_string(m.blank_index) +
                      " out of range [0," + std::to_string(m.vocab) + ")");
  if (!m.labels.empty() && m.labels.size() != m.vocab)
    throw DimensionError("label table has " + std::to_string(m.labels.size()) +
                         " entries, vocab is " + std::to_string(m.vocab));
  if (validate_rows) {
    for (std::size_t t = 0; t < m.frames; ++t) {
      double lse = -INFINITY;
      for (std::size_t v = 0; v < m.vocab; ++v) {
        const double x = m.at(t, v);
        if (lse == -INFINITY)
          lse = x;
        else if (x > lse)
          lse = x + std::log1p(std::exp(lse - x));
        else
          lse = lse + std::log1p(std::exp(x - lse));
      }
      if (std::abs(lse) > 1e-3)
        throw FormatError("row " + std::to_string(t) +
                          " is not log-normalized (logsumexp=" +
                          std::to_string(lse) + ")");
    }
  }
}

std::vector<std::uint32_t> argmax_path(const PosteriorMatrix& m) {
  validate(m);
  std::vector<std::uint32_t> path(m.frames);
  for (std::size_t t = 0; t < m.frames; ++t) {
    std::uint32_t best = 0;
    float best_val = m.at(t, 0);
    for (std::size_t v = 1; v < m.vocab; ++v) {
      // strict > keeps ties at the lowest index
      if (m.at(t, v) > best_val) {
        best_val = m.at(t, v);
        best = std::uint32_t(v);
      }
    }
    path[t] = best;
  }
  return path;
}

std::string collapse_path(const std::vector<std::uint32_t>& path,
                          std::uint32_t blank_index,
                          const std::vector<std::string>& labels) {
  std::string out;
  std::uint32_t prev = blank_index;
  bool first = true;
  for (std::uint32_t idx : path) {
    if ((first || idx != prev) && idx != blank_index) {
      if (idx >= labels.size())
        throw DimensionError("label index " + std::to_string(idx) +
                             " outside label table");
      out += labels[idx];
    }
    prev = idx;
    first = false;
  }
  return out;
}

std::string greedy_decode(const PosteriorMatrix& m) {
  if (m.frames == 0) return "";
  return collapse_path(argmax_path(m), m.blank_index, m.labels);
}

namespace {

constexpr char kMagic[4] = {'C', 'T', 'C', 'L'};

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("truncated CTCL file: " + path);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

std::string labels_sidecar(const std::string& path) {
  return path + ".labels.json";
}

}  // namespace

PosteriorMatrix load_posteriors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in " + path);

  PosteriorMatrix m;
  m.frames = read_u32(in, path);
  m.vocab = read_u32(in, path);
  m.blank_index = read_u32(in, path);

  m.logprobs.resize(m.frames * m.vocab);
  in.read(reinterpret_cast<char*>(m.logprobs.data()),
          std::streamsize(m.logprobs.size() * sizeof(float)));
  if (std::size_t(in.gcount()) != m.logprobs.size() * sizeof(float))
    throw FormatError("truncated CTCL payload in " + path);

  std::ifstream lin(labels_sidecar(path));
  if (lin) {
    nlohmann::json j = nlohmann::json::parse(lin, nullptr, false);
    if (j.is_discarded() || !j.is_array())
      throw FormatError("bad labels sidecar for " + path);
    m.labels = j.get<std::vector<std::string>>();
  }

  validate(m);
  return m;
}

void save_posteriors(const PosteriorMatrix& m, const std::string& path) {
  validate(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, std::uint32_t(m.frames));
  write_u32(out, std::uint32_t(m.vocab));
  write_u32(out, m.blank_index);
  out.write(reinterpret_cast<const char*>(m.logprobs.data()),
            std::streamsize(m.logprobs.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path);

  if (!m.labels.empty()) {
    std::ofstream lout(labels_sidecar(path), std::ios::trunc);
    lout << nlohmann::json(m.labels).dump() << "\n";
    if (!lout) throw IoError("write failed: " + labels_sidecar(path));
  }
}

}  // namespace hardsynth
