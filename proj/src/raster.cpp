#include "glyphocr/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "glyphocr/errors.hpp"

namespace glyphocr {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::InvalidArgument,
         "image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t pixel_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

constexpr std::array<std::uint8_t, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= kPngMagic.size() && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin());
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::MalformedFile, "png: " + msg);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::MalformedFile, "png: " + msg);
  }
  if (gray) return GrayImage(width, height, std::move(pixels));
  return RgbImage(width, height, std::move(pixels));
}

/// Cursor over a netpbm header: whitespace-separated tokens with '#' comments.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCode::MalformedFile, "pnm: expected a number in header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) fail(ErrorCode::MalformedFile, "pnm: header value out of range");
      ++pos_;
    }
    return value;
  }

  /// Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorCode::MalformedFile, "pnm: missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

Image decode_pnm(std::span<const std::uint8_t> bytes) {
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '5' && kind != '6') {
    fail(ErrorCode::UnsupportedFormat, std::string("pnm variant P") + kind + " (only P5/P6 are read)");
  }
  PnmHeaderReader header(bytes);
  const long width = header.next_number();
  const long height = header.next_number();
  const long maxval = header.next_number();
  if (width < 1 || height < 1) fail(ErrorCode::MalformedFile, "pnm: zero dimension");
  if (maxval != 255) fail(ErrorCode::UnsupportedFormat, "pnm maxval " + std::to_string(maxval));
  const std::size_t offset = header.raster_offset();
  const std::size_t channels = kind == '6' ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (bytes.size() < offset + need) fail(ErrorCode::MalformedFile, "pnm: truncated raster");
  std::vector<std::uint8_t> pixels(bytes.begin() + offset, bytes.begin() + offset + need);
  if (channels == 1) return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
  return RgbImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> pnm_bytes(char kind, int width, int height, std::span<const std::uint8_t> raster) {
  const std::string header = std::string("P") + kind + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count(width, height)) {
    fail(ErrorCode::InvalidArgument, "gray pixel buffer does not match dimensions");
  }
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(pixel_count(width, height), fill);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != 3 * pixel_count(width, height)) {
    fail(ErrorCode::InvalidArgument, "rgb pixel buffer does not match dimensions");
  }
}

std::array<std::uint8_t, 3> RgbImage::at(int x, int y) const {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') return decode_pnm(bytes);
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() < kPngMagic.size() && !bytes.empty() &&
      std::equal(bytes.begin(), bytes.end(), kPngMagic.begin())) {
    fail(ErrorCode::MalformedFile, "png: truncated signature");
  }
  fail(ErrorCode::UnsupportedFormat, "unrecognized image signature");
}

GrayImage to_grayscale(const RgbImage& img) {
  const auto src = img.pixels();
  std::vector<std::uint8_t> out(src.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Integer weights in thousandths; +500 rounds half-up. Max is 255 exactly.
    const unsigned luma = 299u * src[3 * i] + 587u * src[3 * i + 1] + 114u * src[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::min(255u, (luma + 500u) / 1000u));
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage to_grayscale(const Image& img) {
  if (const auto* gray = std::get_if<GrayImage>(&img)) return *gray;
  return to_grayscale(std::get<RgbImage>(img));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  return pnm_bytes('5', img.width(), img.height(), img.pixels());
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  return pnm_bytes('6', img.width(), img.height(), img.pixels());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes);
}

}  // namespace glyphocr
