#include "glyphocr/errors.hpp"

namespace glyphocr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::GridTooFine: return "GridTooFine";
    case ErrorCode::MissingBlock: return "MissingBlock";
    case ErrorCode::DuplicateOrigin: return "DuplicateOrigin";
    case ErrorCode::ManifestParseError: return "ManifestParseError";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::BadClassId: return "BadClassId";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UncoveredClass: return "UncoveredClass";
    case ErrorCode::BridgeFailure: return "BridgeFailure";
    case ErrorCode::EmptyTruth: return "EmptyTruth";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace glyphocr
