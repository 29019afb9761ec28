#include "glyphocr/segment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glyphocr/errors.hpp"

namespace glyphocr {

namespace {

// Dense 28 x source weight matrix for one axis.
std::vector<double> axis_weights(int source) {
  std::vector<double> w(static_cast<std::size_t>(kGlyphSide) * source, 0.0);
  auto cell = [&](int o, int i) -> double& { return w[static_cast<std::size_t>(o) * source + i]; };
  // Area weighting: output o covers [o*step, (o+1)*step) of the source axis.
  const double step = static_cast<double>(source) / kGlyphSide;
  for (int o = 0; o < kGlyphSide; ++o) {
    const double lo = o * step;
    const double hi = (o + 1) * step;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(source - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = first; i <= last; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (overlap > 0) cell(o, i) = overlap / step;
    }
  }
  return w;
}

}  // namespace

void GridSpec::validate() const {
  if (rows < 1 || cols < 1) {
    fail(ErrorCode::InvalidArgument, "grid must be at least 1x1, got " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::array<double, kGlyphPixels> resample_to_glyph(std::span<const double> values, int width, int height) {
  if (width < 1 || height < 1 || values.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::ShapeMismatch, "resample source does not match its dimensions");
  }
  const auto wx = axis_weights(width);
  const auto wy = axis_weights(height);

  // Horizontal pass: height x 28.
  std::vector<double> rows(static_cast<std::size_t>(height) * kGlyphSide, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int o = 0; o < kGlyphSide; ++o) {
      double acc = 0.0;
      for (int x = 0; x < width; ++x) {
        const double weight = wx[static_cast<std::size_t>(o) * width + x];
        if (weight != 0.0) acc += weight * values[static_cast<std::size_t>(y) * width + x];
      }
      rows[static_cast<std::size_t>(y) * kGlyphSide + o] = acc;
    }
  }

  std::array<double, kGlyphPixels> out{};
  for (int o = 0; o < kGlyphSide; ++o) {
    for (int x = 0; x < kGlyphSide; ++x) {
      double acc = 0.0;
      for (int y = 0; y < height; ++y) {
        const double weight = wy[static_cast<std::size_t>(o) * height + y];
        if (weight != 0.0) acc += weight * rows[static_cast<std::size_t>(y) * kGlyphSide + x];
      }
      out[static_cast<std::size_t>(o) * kGlyphSide + x] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<GlyphBlock> slice(const BinaryImage& img, GridSpec grid) {
  grid.validate();
  const int cell_w = img.width() / grid.cols;
  const int cell_h = img.height() / grid.rows;
  if (cell_w < 1 || cell_h < 1) {
    fail(ErrorCode::GridTooFine, std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " grid on a " +
                                     std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }

  std::vector<GlyphBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  std::vector<double> cell;
  for (int r = 0; r < grid.rows; ++r) {
    const int y0 = r * cell_h;
    const int h = (r == grid.rows - 1) ? img.height() - y0 : cell_h;
    for (int c = 0; c < grid.cols; ++c) {
      const int x0 = c * cell_w;
      const int w = (c == grid.cols - 1) ? img.width() - x0 : cell_w;
      cell.assign(static_cast<std::size_t>(w) * h, 0.0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) cell[static_cast<std::size_t>(y) * w + x] = img.at(x0 + x, y0 + y);
      }
      GlyphBlock block;
      block.values = resample_to_glyph(cell, w, h);
      block.origin = {r, c};
      blocks.push_back(block);
    }
  }
  return blocks;
}

Tile assemble_tile(std::span<const GlyphBlock> blocks, GridSpec grid, int gutter) {
  grid.validate();
  if (gutter < 0) fail(ErrorCode::InvalidArgument, "gutter must be nonnegative");

  const std::size_t cells = static_cast<std::size_t>(grid.rows) * grid.cols;
  std::vector<const GlyphBlock*> placed(cells, nullptr);
  for (const auto& block : blocks) {
    const auto [r, c] = block.origin;
    if (r < 0 || r >= grid.rows || c < 0 || c >= grid.cols) {
      fail(ErrorCode::InvalidArgument, "block origin (" + std::to_string(r) + "," + std::to_string(c) + ") outside grid");
    }
    auto& slot = placed[static_cast<std::size_t>(r) * grid.cols + c];
    if (slot != nullptr) {
      fail(ErrorCode::DuplicateOrigin, "two blocks at (" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
    slot = &block;
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (placed[i] == nullptr) {
      fail(ErrorCode::MissingBlock, "no block at (" + std::to_string(i / grid.cols) + "," +
                                        std::to_string(i % grid.cols) + ")");
    }
  }

  const int width = grid.cols * kGlyphSide + (grid.cols - 1) * gutter;
  const int height = grid.rows * kGlyphSide + (grid.rows - 1) * gutter;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const GlyphBlock& block = *placed[static_cast<std::size_t>(r) * grid.cols + c];
      const int x0 = c * (kGlyphSide + gutter);
      const int y0 = r * (kGlyphSide + gutter);
      for (int y = 0; y < kGlyphSide; ++y) {
        for (int x = 0; x < kGlyphSide; ++x) {
          bits[static_cast<std::size_t>(y0 + y) * width + x0 + x] = block.at(x, y) >= 0.5 ? 1 : 0;
        }
      }
    }
  }
  return Tile(width, height, std::move(bits));
}

GrayImage render_block(const GlyphBlock& block, bool dark_ink) {
  std::vector<std::uint8_t> pixels(kGlyphPixels);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double ink = dark_ink ? 1.0 - block.values[i] : block.values[i];
    pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(ink, 0.0, 1.0) * 255.0));
  }
  return GrayImage(kGlyphSide, kGlyphSide, std::move(pixels));
}

std::string block_file_name(GridOrigin origin) {
  return "r" + std::to_string(origin.row) + "_c" + std::to_string(origin.col) + ".pgm";
}

std::vector<std::filesystem::path> export_blocks(std::span<const GlyphBlock> blocks,
                                                 const std::filesystem::path& dir, bool dark_ink) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  written.reserve(blocks.size());
  for (const auto& block : blocks) {
    auto path = dir / block_file_name(block.origin);
    write_file(path, encode_pgm(render_block(block, dark_ink)));
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace glyphocr
