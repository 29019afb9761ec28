#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace glyphocr {

/// 8-bit single-channel raster, row-major. Immutable once built.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);
  GrayImage(int width, int height, std::uint8_t fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  bool operator==(const GrayImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Interleaved RGB raster, row-major.
class RgbImage {
 public:
  RgbImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::array<std::uint8_t, 3> at(int x, int y) const;

  bool operator==(const RgbImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

using Image = std::variant<RgbImage, GrayImage>;

/// Accepts PNG and binary PGM/PPM (P5/P6, maxval 255). Grayscale sources
/// decode to GrayImage, everything else to RgbImage.
Image decode_image(std::span<const std::uint8_t> bytes);

/// Rec. 601 luma, rounded half-up.
GrayImage to_grayscale(const RgbImage& img);
GrayImage to_grayscale(const Image& img);

std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Image read_image(const std::filesystem::path& path);

}  // namespace glyphocr
