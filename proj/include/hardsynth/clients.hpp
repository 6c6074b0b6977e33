#ifndef HARDSYNTH_CLIENTS_HPP
#define HARDSYNTH_CLIENTS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hardsynth {

// One JSON line per client call: {"client":..,"input_digest":..,"ms":..}.
using CallLogger = std::function<void(const std::string& json_line)>;

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t file_digest(const std::string& path);

struct RetryPolicy {
  int attempts = 3;
  int backoff_ms = 100;  // doubled per retry
};

class ClientBase {
 public:
  virtual ~ClientBase() = default;
  void set_logger(CallLogger logger) { logger_ = std::move(logger); }

 protected:
  void log_call(const std::string& client, std::uint64_t input_digest,
                double ms) const;

 private:
  CallLogger logger_;
  mutable std::mutex log_mutex_;
};

struct TranscribeResult {
  std::string text;
  std::optional<std::string> posterior_path;  // CTCL file, weak role only
};

enum class AsrRole { kWeak, kStrong };

class AsrClient : public ClientBase {
 public:
  virtual TranscribeResult transcribe(const std::string& audio_ref) = 0;
  virtual AsrRole role() const = 0;
};

class LlmClient : public ClientBase {
 public:
  virtual std::string complete(const std::string& prompt) = 0;
};

class TtsClient : public ClientBase {
 public:
  // Writes a new WAV at out_path and returns out_path.
  virtual std::string synthesize(const std::string& prompt_audio,
                                 const std::string& prompt_text,
                                 const std::string& target_text,
                                 const std::string& out_path) = 0;
};

class ScorerClient : public ClientBase {
 public:
  virtual std::vector<double> embed(const std::string& audio_ref) = 0;
  virtual double mos(const std::string& audio_ref) = 0;
};

// ---------------------------------------------------------------------------
// Mock backends. Pure functions of (input bytes, seed); repeated calls are
// byte-identical. The mock TTS embeds {id, text, difficulty, speed} as JSON
// in the WAV comment chunk and the mock ASR reads it back, closing the loop
// for end-to-end tests without any model.

struct MockWavMeta {
  std::string id;
  std::string text;
  double difficulty = 0.0;    // 0 = transcribed verbatim, 1 = heavily corrupted
  double speed_words_per_s = 2.0;
};

void write_mock_wav(const std::string& path, const MockWavMeta& meta,
                    double duration_s);
MockWavMeta read_mock_wav_meta(const std::string& path);

// Seeded per-character substitution/deletion/insertion channel with error
// probability proportional to difficulty.
std::string corrupt_text(const std::string& text, double difficulty,
                         std::uint64_t seed);

class MockAsrClient : public AsrClient {
 public:
  struct Options {
    AsrRole role = AsrRole::kStrong;
    std::uint64_t seed = 0;
    // Weak role: also export a CTCL posterior file next to the audio.
    bool emit_posteriors = false;
  };
  explicit MockAsrClient(Options opts) : opts_(opts) {}

  TranscribeResult transcribe(const std::string& audio_ref) override;
  AsrRole role() const override { return opts_.role; }

 private:
  Options opts_;
};

class MockLlmClient : public LlmClient {
 public:
  enum class Mode { kIdentity, kParaphrase };
  MockLlmClient(Mode mode, std::uint64_t seed) : mode_(mode), seed_(seed) {}

  std::string complete(const std::string& prompt) override;

 private:
  Mode mode_;
  std::uint64_t seed_;
};

class MockTtsClient : public TtsClient {
 public:
  struct Options {
    std::uint64_t seed = 0;
    double min_prompt_s = 3.0;
  };
  MockTtsClient();
  explicit MockTtsClient(Options opts);

  std::string synthesize(const std::string& prompt_audio,
                         const std::string& prompt_text,
                         const std::string& target_text,
                         const std::string& out_path) override;

 private:
  Options opts_;
};

inline MockTtsClient::MockTtsClient() : opts_() {}
inline MockTtsClient::MockTtsClient(Options opts) : opts_(opts) {}

class MockScorerClient : public ScorerClient {
 public:
  static constexpr std::size_t kDim = 8;
  std::vector<double> embed(const std::string& audio_ref) override;
  double mos(const std::string& audio_ref) override;
};

// ---------------------------------------------------------------------------
// HTTP transport: POST JSON to the endpoint, JSON response back.
// Request/response fields: {audio_b64 | text | prompt_audio_b64, prompt_text,
// target_text | op} -> {text | audio_b64 | vector | score}.

class HttpAsrClient : public AsrClient {
 public:
  HttpAsrClient(std::string endpoint, AsrRole role, RetryPolicy retry = {});
  TranscribeResult transcribe(const std::string& audio_ref) override;
  AsrRole role() const override { return role_; }

 private:
  std::string endpoint_;
  AsrRole role_;
  RetryPolicy retry_;
};

class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(std::string endpoint, RetryPolicy retry = {});
  std::string complete(const std::string& prompt) override;

 private:
  std::string endpoint_;
  RetryPolicy retry_;
};

class HttpTtsClient : public TtsClient {
 public:
  explicit HttpTtsClient(std::string endpoint, RetryPolicy retry = {});
  std::string synthesize(const std::string& prompt_audio,
                         const std::string& prompt_text,
                         const std::string& target_text,
                         const std::string& out_path) override;

 private:
  std::string endpoint_;
  RetryPolicy retry_;
};

class HttpScorerClient : public ScorerClient {
 public:
  explicit HttpScorerClient(std::string endpoint, RetryPolicy retry = {});
  std::vector<double> embed(const std::string& audio_ref) override;
  double mos(const std::string& audio_ref) override;

 private:
  std::string endpoint_;
  RetryPolicy retry_;
};

// ---------------------------------------------------------------------------
// Subprocess transport: one JSON request on stdin, one JSON response on
// stdout, exit 0 on success. Same field names as HTTP.

class SubprocessAsrClient : public AsrClient {
 public:
  SubprocessAsrClient(std::string command, AsrRole role)
      : command_(std::move(command)), role_(role) {}
  TranscribeResult transcribe(const std::string& audio_ref) override;
  AsrRole role() const override { return role_; }

 private:
  std::string command_;
  AsrRole role_;
};

class SubprocessLlmClient : public LlmClient {
 public:
  explicit SubprocessLlmClient(std::string command)
      : command_(std::move(command)) {}
  std::string complete(const std::string& prompt) override;

 private:
  std::string command_;
};

}  // namespace hardsynth

#endif
