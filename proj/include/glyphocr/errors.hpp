#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphocr {

enum class ErrorCode {
  MalformedFile,
  UnsupportedFormat,
  EmptyHistogram,
  GridTooFine,
  MissingBlock,
  DuplicateOrigin,
  ManifestParseError,
  MissingImage,
  UnknownLabel,
  ShapeMismatch,
  OddDimension,
  BadClassId,
  EmptyCorpus,
  CorruptCheckpoint,
  LengthMismatch,
  UncoveredClass,
  BridgeFailure,
  EmptyTruth,
  EmptyList,
  IoError,
  InvalidArgument,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace glyphocr
