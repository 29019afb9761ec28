#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "glyphocr/corpus.hpp"
#include "glyphocr/network.hpp"

namespace glyphocr {

/// A trained network plus the label map its output classes refer to.
struct Checkpoint {
  NetParams params;
  LabelMap labels;

  bool operator==(const Checkpoint&) const = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout, all little-endian:
//   "GLYPHNET" | u32 version | u32 K
//   f32 payload: conv1 W, conv1 b, conv2 W, conv2 b, dense W, dense b
//   u32 label-map JSON length | label-map JSON (UTF-8)
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint);

/// Throws CorruptCheckpoint on bad magic, version, truncation or trailing
/// bytes, and ShapeMismatch when `expected_classes` disagrees with K.
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes, std::optional<int> expected_classes = std::nullopt);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_classes = std::nullopt);

}  // namespace glyphocr
