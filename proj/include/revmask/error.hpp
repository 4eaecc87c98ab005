#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revmask {

// Each failure mode that callers are expected to tell apart gets its own kind.
enum class ErrorKind {
  kInvalidArgument,
  kFileNotFound,
  kMalformedHeader,
  kUnsupportedEncoding,
  kIo,
  kClipping,
  kSampleRateMismatch,
  kShapeMismatch,
  kAnechoic,
  kInsufficientDecay,
  kSilentInput,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace revmask
