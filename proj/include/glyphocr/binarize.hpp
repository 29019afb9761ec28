#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "glyphocr/raster.hpp"

namespace glyphocr {

struct Histogram256 {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
};

Histogram256 histogram(const GrayImage& img);

/// Row-major 0/1 raster; 1 marks glyph stroke (foreground).
class BinaryImage {
 public:
  BinaryImage(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint8_t at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x]; }
  std::size_t foreground_count() const noexcept;

  bool operator==(const BinaryImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

struct OtsuResult {
  int threshold = 0;
  /// W_b * var_b + W_f * var_f at `threshold`, with background = values <= threshold.
  double within_class_variance = 0.0;
  bool degenerate = false;
};

/// Exhaustive sweep over all 256 thresholds. The smallest minimizing
/// threshold wins; a histogram with a single occupied bin v yields v and
/// the degenerate flag.
OtsuResult otsu_threshold(const Histogram256& hist);

/// Within-class variance of one candidate threshold, computed from exact
/// integer moments. Exposed for diagnostics and property tests.
double within_class_variance(const Histogram256& hist, int threshold);

enum class Polarity { dark_foreground, light_foreground, automatic };

std::string_view to_string(Polarity polarity) noexcept;
Polarity parse_polarity(std::string_view text);

/// Picks the concrete polarity `apply_threshold` would use. For `automatic`
/// the foreground is whichever side is the minority (< 0.5 of pixels); if
/// both or neither qualify, dark_foreground.
Polarity resolve_polarity(const GrayImage& img, int threshold, Polarity polarity);

BinaryImage apply_threshold(const GrayImage& img, int threshold, Polarity polarity);

struct Binarization {
  OtsuResult otsu;
  Polarity polarity = Polarity::dark_foreground;  // always resolved
  BinaryImage image;
};

Binarization binarize(const GrayImage& img, Polarity polarity = Polarity::automatic);

/// Renders foreground as black (0) on white (255).
GrayImage render_binary(const BinaryImage& img);

}  // namespace glyphocr
