#include "revmask/error.hpp"

namespace revmask {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kFileNotFound: return "file not found";
    case ErrorKind::kMalformedHeader: return "malformed header";
    case ErrorKind::kUnsupportedEncoding: return "unsupported encoding";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kClipping: return "clipping";
    case ErrorKind::kSampleRateMismatch: return "sample rate mismatch";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kAnechoic: return "anechoic (zero residual energy)";
    case ErrorKind::kInsufficientDecay: return "insufficient decay";
    case ErrorKind::kSilentInput: return "silent input";
    case ErrorKind::kConfig: return "configuration error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace revmask
