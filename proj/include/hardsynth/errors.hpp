#ifndef HARDSYNTH_ERRORS_HPP
#define HARDSYNTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hardsynth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define HARDSYNTH_ERROR(Name)                    \
  struct Name : Error {                          \
    using Error::Error;                          \
  }

HARDSYNTH_ERROR(ManifestError);    // malformed line, missing field
HARDSYNTH_ERROR(DuplicateIdError);
HARDSYNTH_ERROR(IdCollisionError);
HARDSYNTH_ERROR(IoError);
HARDSYNTH_ERROR(FormatError);      // bad magic, truncated payload, bad WAV
HARDSYNTH_ERROR(EmptyReferenceError);
HARDSYNTH_ERROR(DimensionError);
HARDSYNTH_ERROR(ZeroNormError);
HARDSYNTH_ERROR(ZeroDurationError);
HARDSYNTH_ERROR(EmptyInputError);
HARDSYNTH_ERROR(EmptySentenceError);
HARDSYNTH_ERROR(EmptyAfterCleanupError);
HARDSYNTH_ERROR(EmptyPromptSetError);
HARDSYNTH_ERROR(InvalidRequestError);
HARDSYNTH_ERROR(ConfigError);
HARDSYNTH_ERROR(ExcessiveFailuresError);

struct TransportError : Error {
  int attempts = 0;
  TransportError(const std::string& msg, int attempts_)
      : Error(msg), attempts(attempts_) {}
};

struct BackendError : Error {
  std::string payload;
  BackendError(const std::string& msg, std::string payload_ = {})
      : Error(msg), payload(std::move(payload_)) {}
};

#undef HARDSYNTH_ERROR

}  // namespace hardsynth

#endif
