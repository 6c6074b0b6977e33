#include "hardsynth/clients.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hardsynth/ctc.hpp"
#include "hardsynth/errors.hpp"
#include "hardsynth/textnorm.hpp"
#include "hardsynth/wav.hpp"

// cpp-httplib is header-only; keep it out of public headers.
#include "httplib.h"

namespace hardsynth {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// digests / logging

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return fnv1a64(data);
}

void ClientBase::log_call(const std::string& client, std::uint64_t input_digest,
                          double ms) const {
  if (!logger_) return;
  json j;
  j["client"] = client;
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)input_digest);
  j["input_digest"] = buf;
  j["ms"] = ms;
  std::lock_guard<std::mutex> lock(log_mutex_);
  logger_(j.dump());
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string file_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

}  // namespace

// ---------------------------------------------------------------------------
// mock WAV metadata

void write_mock_wav(const std::string& path, const MockWavMeta& meta,
                    double duration_s) {
  json j;
  j["id"] = meta.id;
  j["text"] = meta.text;
  j["difficulty"] = meta.difficulty;
  j["speed"] = meta.speed_words_per_s;
  write_wav(path, tone_samples(duration_s), 16000, j.dump());
}

MockWavMeta read_mock_wav_meta(const std::string& path) {
  const WavInfo info = read_wav_info(path);
  MockWavMeta meta;
  meta.id = file_stem(path);
  if (info.comment) {
    json j = json::parse(*info.comment, nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      meta.id = j.value("id", meta.id);
      meta.text = j.value("text", std::string());
      meta.difficulty = j.value("difficulty", 0.0);
      meta.speed_words_per_s = j.value("speed", 2.0);
    }
  }
  return meta;
}

// ---------------------------------------------------------------------------
// mock corruption channel

std::string corrupt_text(const std::string& text, double difficulty,
                         std::uint64_t seed) {
  if (difficulty <= 0.0) return text;
  std::uint64_t state = seed;
  auto uniform = [&state]() {
    return double(splitmix64(state) >> 11) * 0x1.0p-53;
  };
  auto letter = [&state]() {
    return char('a' + splitmix64(state) % 26);
  };

  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const double u = uniform();
    if (u < 0.5 * difficulty) {
      char r = letter();
      while (r == c) r = letter();
      out.push_back(r);  // substitution
    } else if (u < 0.7 * difficulty) {
      // deletion
    } else if (u < 0.9 * difficulty) {
      out.push_back(c);
      out.push_back(letter());  // insertion
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// mock ASR

namespace {

// One-hot posterior matrix whose greedy decode reproduces the hypothesis.
PosteriorMatrix hypothesis_posteriors(const std::string& hypothesis) {
  const std::vector<std::string> chars = char_tokens(hypothesis);
  std::vector<std::string> labels = {"<b>"};
  {
    std::vector<std::string> distinct = chars;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    labels.insert(labels.end(), distinct.begin(), distinct.end());
  }
  std::map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    index[labels[i]] = std::uint32_t(i);

  std::vector<std::uint32_t> path;
  for (const auto& c : chars) {
    path.push_back(index[c]);
    path.push_back(index[c]);
    path.push_back(0);
  }
  if (path.empty()) path.push_back(0);

  PosteriorMatrix m;
  m.frames = path.size();
  m.vocab = labels.size();
  m.blank_index = 0;
  m.labels = labels;
  m.logprobs.assign(m.frames * m.vocab, -20.0f);
  for (std::size_t t = 0; t < path.size(); ++t)
    m.logprobs[t * m.vocab + path[t]] = 0.0f;
  return m;
}

}  // namespace

TranscribeResult MockAsrClient::transcribe(const std::string& audio_ref) {
  Timer timer;
  const MockWavMeta meta = read_mock_wav_meta(audio_ref);
  const std::uint64_t chan_seed = fnv1a64(meta.id) ^ opts_.seed;
  TranscribeResult result;
  result.text = corrupt_text(meta.text, meta.difficulty, chan_seed);

  if (opts_.emit_posteriors && opts_.role == AsrRole::kWeak) {
    const std::string out = audio_ref + ".ctcl";
    save_posteriors(hypothesis_posteriors(result.text), out);
    result.posterior_path = out;
  }

  log_call("mock_asr", file_digest(audio_ref), timer.ms());
  return result;
}

// ---------------------------------------------------------------------------
// mock LLM

namespace {

const std::map<std::string, std::string>& synonym_table() {
  static const std::map<std::string, std::string> table = {
      {"hesitated", "paused"},   {"moment", "instant"},
      {"girl", "lady"},          {"glorious", "splendid"},
      {"dangerous", "perilous"}, {"mission", "task"},
      {"sea", "ocean"},          {"said", "remarked"},
      {"little", "small"},       {"big", "large"},
      {"house", "dwelling"},     {"man", "gentleman"},
      {"woman", "lady"},         {"good", "fine"},
      {"great", "grand"},        {"old", "aged"},
      {"began", "started"},      {"quickly", "swiftly"},
      {"looked", "gazed"},       {"walked", "strolled"},
  };
  return table;
}

// The sentence is the part after the final "Sentence: " label when the
// rewriting prompt template is present.
std::string extract_sentence(const std::string& prompt) {
  const std::string label = "Sentence: ";
  const std::size_t pos = prompt.rfind(label);
  if (pos == std::string::npos) return prompt;
  return prompt.substr(pos + label.size());
}

}  // namespace

std::string MockLlmClient::complete(const std::string& prompt) {
  Timer timer;
  if (prompt.empty()) throw InvalidRequestError("empty prompt");
  const std::string sentence = extract_sentence(prompt);
  if (mode_ == Mode::kIdentity) {
    log_call("mock_llm", fnv1a64(prompt), timer.ms());
    return sentence;
  }

  std::uint64_t state = fnv1a64(sentence) ^ seed_;
  auto uniform = [&state]() {
    return double(splitmix64(state) >> 11) * 0x1.0p-53;
  };

  std::vector<std::string> words = word_tokens(sentence);
  const auto& synonyms = synonym_table();
  for (auto& w : words) {
    auto it = synonyms.find(w);
    if (it != synonyms.end() && uniform() < 0.8) w = it->second;
  }
  // clause reorder: rotate the tail to the front
  if (words.size() >= 6 && uniform() < 0.5) {
    const std::size_t k = words.size() / 3;
    std::rotate(words.begin(), words.end() - std::ptrdiff_t(k), words.end());
  }

  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  if (!out.empty()) {
    out[0] = char(std::toupper((unsigned char)out[0]));
    out.push_back('.');
  }
  log_call("mock_llm", fnv1a64(prompt), timer.ms());
  return out;
}

// ---------------------------------------------------------------------------
// mock TTS

std::string MockTtsClient::synthesize(const std::string& prompt_audio,
                                      const std::string& prompt_text,
                                      const std::string& target_text,
                                      const std::string& out_path) {
  Timer timer;
  if (target_text.empty()) throw InvalidRequestError("empty target_text");

  const WavInfo info = read_wav_info(prompt_audio);
  if (info.duration_s() < opts_.min_prompt_s)
    throw InvalidRequestError("prompt audio shorter than " +
                              std::to_string(opts_.min_prompt_s) + " s");

  MockWavMeta prompt_meta = read_mock_wav_meta(prompt_audio);
  double speed = prompt_meta.speed_words_per_s;
  if (speed <= 0.0) {
    const std::size_t words = word_tokens(prompt_text).size();
    speed = words > 0 ? double(words) / info.duration_s() : 2.0;
  }

  MockWavMeta out_meta;
  out_meta.id = file_stem(out_path);
  out_meta.text = target_text;
  out_meta.difficulty = prompt_meta.difficulty;
  out_meta.speed_words_per_s = speed;
  const double duration = double(word_tokens(target_text).size()) / speed;
  write_mock_wav(out_path, out_meta, duration);

  log_call("mock_tts", fnv1a64(prompt_audio + "|" + target_text), timer.ms());
  return out_path;
}

// ---------------------------------------------------------------------------
// mock scorer

std::vector<double> MockScorerClient::embed(const std::string& audio_ref) {
  Timer timer;
  std::uint64_t state = file_digest(audio_ref);
  std::vector<double> v(kDim);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = double(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
    norm2 += x * x;
  }
  const double norm = std::sqrt(norm2);
  for (auto& x : v) x /= norm;
  log_call("mock_scorer.embed", state, timer.ms());
  return v;
}

double MockScorerClient::mos(const std::string& audio_ref) {
  Timer timer;
  log_call("mock_scorer.mos", file_digest(audio_ref), timer.ms());
  return 3.0;
}

// ---------------------------------------------------------------------------
// HTTP transport

namespace {

const char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::string& in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= in.size()) {
    const std::uint32_t v = std::uint8_t(in[i]) << 16 |
                            std::uint8_t(in[i + 1]) << 8 |
                            std::uint8_t(in[i + 2]);
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
    i += 3;
  }
  const std::size_t rem = in.size() - i;
  if (rem == 1) {
    const std::uint32_t v = std::uint8_t(in[i]) << 16;
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out += "==";
  } else if (rem == 2) {
    const std::uint32_t v =
        std::uint8_t(in[i]) << 16 | std::uint8_t(in[i + 1]) << 8;
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string b64_decode(const std::string& in) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  int buf = 0, bits = 0;
  for (char c : in) {
    const int v = val(c);
    if (v < 0) continue;
    buf = buf << 6 | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(char((buf >> bits) & 0xff));
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

struct Endpoint {
  std::string host_port;  // scheme://host:port
  std::string path;
};

Endpoint split_endpoint(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw ConfigError("bad endpoint (no scheme): " + endpoint);
  const std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

// POST with bounded retry on transport failures; backend (non-2xx) errors
// are not retried.
json post_json(const std::string& endpoint, const json& request,
               const RetryPolicy& retry) {
  const Endpoint ep = split_endpoint(endpoint);
  const std::string body = request.dump();

  int backoff = retry.backoff_ms;
  std::string last_error;
  for (int attempt = 1; attempt <= retry.attempts; ++attempt) {
    httplib::Client client(ep.host_port);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(300, 0);
    auto res = client.Post(ep.path, body, "application/json");
    if (res) {
      if (res->status < 200 || res->status >= 300)
        throw BackendError("backend returned HTTP " +
                               std::to_string(res->status) + " from " +
                               endpoint,
                           res->body);
      json j = json::parse(res->body, nullptr, false);
      if (j.is_discarded())
        throw BackendError("non-JSON response from " + endpoint, res->body);
      return j;
    }
    last_error = httplib::to_string(res.error());
    if (attempt < retry.attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw TransportError("transport failure talking to " + endpoint + " (" +
                           last_error + ") after " +
                           std::to_string(retry.attempts) + " attempts",
                       retry.attempts);
}

}  // namespace

HttpAsrClient::HttpAsrClient(std::string endpoint, AsrRole role,
                             RetryPolicy retry)
    : endpoint_(std::move(endpoint)), role_(role), retry_(retry) {}

TranscribeResult HttpAsrClient::transcribe(const std::string& audio_ref) {
  Timer timer;
  const std::string audio = read_file(audio_ref);
  json req;
  req["audio_b64"] = b64_encode(audio);
  const json res = post_json(endpoint_, req, retry_);
  TranscribeResult result;
  result.text = res.value("text", std::string());
  if (res.contains("posterior_b64")) {
    const std::string path = audio_ref + ".ctcl";
    write_file(path, b64_decode(res.at("posterior_b64").get<std::string>()));
    result.posterior_path = path;
  }
  log_call("http_asr", fnv1a64(audio), timer.ms());
  return result;
}

HttpLlmClient::HttpLlmClient(std::string endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {}

std::string HttpLlmClient::complete(const std::string& prompt) {
  Timer timer;
  if (prompt.empty()) throw InvalidRequestError("empty prompt");
  json req;
  req["text"] = prompt;
  const json res = post_json(endpoint_, req, retry_);
  log_call("http_llm", fnv1a64(prompt), timer.ms());
  return res.value("text", std::string());
}

HttpTtsClient::HttpTtsClient(std::string endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {}

std::string HttpTtsClient::synthesize(const std::string& prompt_audio,
                                      const std::string& prompt_text,
                                      const std::string& target_text,
                                      const std::string& out_path) {
  Timer timer;
  if (target_text.empty()) throw InvalidRequestError("empty target_text");
  json req;
  req["prompt_audio_b64"] = b64_encode(read_file(prompt_audio));
  req["prompt_text"] = prompt_text;
  req["target_text"] = target_text;
  const json res = post_json(endpoint_, req, retry_);
  if (!res.contains("audio_b64"))
    throw BackendError("TTS response missing audio_b64", res.dump());
  write_file(out_path, b64_decode(res.at("audio_b64").get<std::string>()));
  log_call("http_tts", fnv1a64(prompt_audio + "|" + target_text), timer.ms());
  return out_path;
}

HttpScorerClient::HttpScorerClient(std::string endpoint, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {}

std::vector<double> HttpScorerClient::embed(const std::string& audio_ref) {
  Timer timer;
  json req;
  req["op"] = "embed";
  req["audio_b64"] = b64_encode(read_file(audio_ref));
  const json res = post_json(endpoint_, req, retry_);
  if (!res.contains("vector"))
    throw BackendError("scorer response missing vector", res.dump());
  auto v = res.at("vector").get<std::vector<double>>();
  log_call("http_scorer.embed", file_digest(audio_ref), timer.ms());
  return v;
}

double HttpScorerClient::mos(const std::string& audio_ref) {
  Timer timer;
  json req;
  req["op"] = "mos";
  req["audio_b64"] = b64_encode(read_file(audio_ref));
  const json res = post_json(endpoint_, req, retry_);
  if (!res.contains("score"))
    throw BackendError("scorer response missing score", res.dump());
  const double s = res.at("score").get<double>();
  log_call("http_scorer.mos", file_digest(audio_ref), timer.ms());
  return s;
}

// ---------------------------------------------------------------------------
// subprocess transport

namespace {

json run_subprocess(const std::string& command, const json& request) {
  const auto dir = fs::temp_directory_path();
  const std::uint64_t tag =
      fnv1a64(request.dump()) ^
      std::uint64_t(std::chrono::steady_clock::now().time_since_epoch().count());
  const std::string req_path =
      (dir / ("hardsynth_req_" + std::to_string(tag) + ".json")).string();
  const std::string res_path =
      (dir / ("hardsynth_res_" + std::to_string(tag) + ".json")).string();
  write_file(req_path, request.dump());

  const std::string cmdline =
      command + " < " + req_path + " > " + res_path + " 2>/dev/null";
  const int rc = std::system(cmdline.c_str());

  std::string body;
  try {
    body = read_file(res_path);
  } catch (const IoError&) {
  }
  std::error_code ec;
  fs::remove(req_path, ec);
  fs::remove(res_path, ec);

  if (rc != 0)
    throw BackendError("subprocess '" + command + "' exited with status " +
                           std::to_string(rc),
                       body);
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded())
    throw BackendError("non-JSON output from subprocess '" + command + "'",
                       body);
  return j;
}

}  // namespace

TranscribeResult SubprocessAsrClient::transcribe(const std::string& audio_ref) {
  Timer timer;
  json req;
  req["audio_b64"] = b64_encode(read_file(audio_ref));
  const json res = run_subprocess(command_, req);
  TranscribeResult result;
  result.text = res.value("text", std::string());
  if (res.contains("posterior_b64")) {
    const std::string path = audio_ref + ".ctcl";
    write_file(path, b64_decode(res.at("posterior_b64").get<std::string>()));
    result.posterior_path = path;
  }
  log_call("subprocess_asr", file_digest(audio_ref), timer.ms());
  return result;
}

std::string SubprocessLlmClient::complete(const std::string& prompt) {
  Timer timer;
  if (prompt.empty()) throw InvalidRequestError("empty prompt");
  json req;
  req["text"] = prompt;
  const json res = run_subprocess(command_, req);
  log_call("subprocess_llm", fnv1a64(prompt), timer.ms());
  return res.value("text", std::string());
}

}  // namespace hardsynth
