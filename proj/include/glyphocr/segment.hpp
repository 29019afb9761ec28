#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glyphocr/binarize.hpp"
#include "glyphocr/raster.hpp"

namespace glyphocr {

inline constexpr int kGlyphSide = 28;
inline constexpr int kGlyphPixels = kGlyphSide * kGlyphSide;

struct GridSpec {
  int rows = 1;
  int cols = 1;

  void validate() const;
};

struct GridOrigin {
  int row = 0;
  int col = 0;

  bool operator==(const GridOrigin&) const = default;
};

/// One character cell normalized to the network input: 28x28 values in [0,1],
/// row-major, 1 meaning stroke.
struct GlyphBlock {
  std::array<double, kGlyphPixels> values{};
  GridOrigin origin;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * kGlyphSide + x]; }
  bool operator==(const GlyphBlock&) const = default;
};

/// The image handed to the external validator: blocks laid out row-major.
using Tile = BinaryImage;

inline constexpr int kDefaultGutter = 1;

/// Rescales a width x height raster of [0,1] values to 28x28 by area-weighted
/// averaging, separably per axis. Mean value is preserved.
std::array<double, kGlyphPixels> resample_to_glyph(std::span<const double> values, int width, int height);

/// Uniform grid slicing. Cells are floor(W/cols) x floor(H/rows); the last
/// column and row absorb the remainder. Throws GridTooFine when a cell would
/// be smaller than one pixel.
std::vector<GlyphBlock> slice(const BinaryImage& img, GridSpec grid);

/// Row-major placement; values >= 0.5 become foreground and gutters are
/// background. Throws DuplicateOrigin / MissingBlock when the blocks do not
/// cover the grid exactly once.
Tile assemble_tile(std::span<const GlyphBlock> blocks, GridSpec grid, int gutter = kDefaultGutter);

/// 8-bit rendering of a block; dark_ink puts strokes at 0 on a 255 ground.
GrayImage render_block(const GlyphBlock& block, bool dark_ink = true);

std::string block_file_name(GridOrigin origin);

/// Writes one `r{row}_c{col}.pgm` per block into `dir` (created if needed).
std::vector<std::filesystem::path> export_blocks(std::span<const GlyphBlock> blocks,
                                                 const std::filesystem::path& dir, bool dark_ink = true);

}  // namespace glyphocr
