#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "glyphocr/corpus.hpp"
#include "glyphocr/errors.hpp"
#include "glyphocr/rng.hpp"
#include "glyphocr/text.hpp"

namespace glyphocr {

namespace {

enum class StrokeKind { segment, arc, dot };

struct Stroke {
  StrokeKind kind;
  double a, b, c, d, e;  // segment: x0 y0 x1 y1; arc: cx cy r from to (rad); dot: cx cy r
};

constexpr double kDeg = std::numbers::pi / 180.0;

constexpr std::array<Stroke, 24> kStrokes = {{
    {StrokeKind::segment, 6, 8, 22, 8, 0},
    {StrokeKind::segment, 6, 14, 22, 14, 0},
    {StrokeKind::segment, 6, 20, 22, 20, 0},
    {StrokeKind::segment, 8, 6, 8, 22, 0},
    {StrokeKind::segment, 14, 6, 14, 22, 0},
    {StrokeKind::segment, 20, 6, 20, 22, 0},
    {StrokeKind::segment, 6, 6, 22, 22, 0},
    {StrokeKind::segment, 22, 6, 6, 22, 0},
    {StrokeKind::arc, 14, 14, 7, 0 * kDeg, 90 * kDeg},
    {StrokeKind::arc, 14, 14, 7, 90 * kDeg, 180 * kDeg},
    {StrokeKind::arc, 14, 14, 7, 180 * kDeg, 270 * kDeg},
    {StrokeKind::arc, 14, 14, 7, 270 * kDeg, 360 * kDeg},
    {StrokeKind::arc, 9, 9, 3.5, 0, 360 * kDeg},
    {StrokeKind::arc, 19, 9, 3.5, 0, 360 * kDeg},
    {StrokeKind::arc, 9, 19, 3.5, 0, 360 * kDeg},
    {StrokeKind::arc, 19, 19, 3.5, 0, 360 * kDeg},
    {StrokeKind::dot, 14, 6, 1.6, 0, 0},
    {StrokeKind::dot, 22, 14, 1.6, 0, 0},
    {StrokeKind::dot, 14, 22, 1.6, 0, 0},
    {StrokeKind::dot, 6, 14, 1.6, 0, 0},
    {StrokeKind::segment, 6, 14, 14, 6, 0},
    {StrokeKind::segment, 14, 22, 22, 14, 0},
    {StrokeKind::segment, 10, 6, 10, 14, 0},
    {StrokeKind::segment, 18, 14, 18, 22, 0},
}};

using Recipe = std::array<int, 3>;

// Stroke triples that pairwise share at most one stroke, picked greedily
// from a fixed shuffle of all triples. Depends on nothing but constants.
const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> table = [] {
    std::vector<Recipe> all;
    const int n = static_cast<int>(kStrokes.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) all.push_back({i, j, k});
    std::mt19937_64 rng(0x5EED'61F0ULL);
    shuffle_in_place(std::span<Recipe>(all), rng);
    std::vector<Recipe> chosen;
    for (const auto& cand : all) {
      const bool distinct = std::all_of(chosen.begin(), chosen.end(), [&](const Recipe& r) {
        int shared = 0;
        for (int s : cand) shared += std::count(r.begin(), r.end(), s) ? 1 : 0;
        return shared <= 1;
      });
      if (distinct) chosen.push_back(cand);
      if (chosen.size() == static_cast<std::size_t>(kMaxSynthClasses)) break;
    }
    if (chosen.size() < static_cast<std::size_t>(kMaxSynthClasses)) fail(ErrorCode::Internal, "not enough glyph recipes");
    return chosen;
  }();
  return table;
}

double segment_distance(double px, double py, double x0, double y0, double x1, double y1) {
  const double vx = x1 - x0;
  const double vy = y1 - y0;
  const double len2 = vx * vx + vy * vy;
  const double t = len2 > 0 ? std::clamp(((px - x0) * vx + (py - y0) * vy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (x0 + t * vx), py - (y0 + t * vy));
}

double stroke_distance(const Stroke& s, double px, double py) {
  switch (s.kind) {
    case StrokeKind::segment:
      return segment_distance(px, py, s.a, s.b, s.c, s.d);
    case StrokeKind::dot:
      return std::max(0.0, std::hypot(px - s.a, py - s.b) - s.c);
    case StrokeKind::arc: {
      // Image y grows downward; angles are measured with y flipped so 0..90
      // is the upper-right quadrant.
      double theta = std::atan2(-(py - s.b), px - s.a);
      if (theta < 0) theta += 2 * std::numbers::pi;
      if (theta >= s.d && theta <= s.e) return std::abs(std::hypot(px - s.a, py - s.b) - s.c);
      const double ex0 = s.a + s.c * std::cos(s.d), ey0 = s.b - s.c * std::sin(s.d);
      const double ex1 = s.a + s.c * std::cos(s.e), ey1 = s.b - s.c * std::sin(s.e);
      return std::min(std::hypot(px - ex0, py - ey0), std::hypot(px - ex1, py - ey1));
    }
  }
  return 1e9;
}

struct Style {
  double half_width;
  double angle;
  double tx, ty;
  double scale;
  double aspect;  // horizontal compression
  double shear;
  double wobble_amp;
  double wobble_phase;
  double dropout;
  double speckle;
};

Style draw_style(KeyedStream& draws, Family family) {
  Style s{};
  s.angle = draws.uniform(-6.0, 6.0) * kDeg;
  s.tx = draws.uniform(-1.5, 1.5);
  s.ty = draws.uniform(-1.5, 1.5);
  s.scale = draws.uniform(0.92, 1.08);
  s.aspect = 1.0;
  if (family == Family::modern) {
    s.half_width = draws.uniform(0.9, 1.3);
  } else {
    // Carved forms: condensed, slanted, thick and worn.
    s.half_width = draws.uniform(2.0, 2.6);
    s.aspect = draws.uniform(0.6, 0.75);
    s.shear = draws.uniform(0.35, 0.5);
    s.wobble_amp = 1.0;
    s.wobble_phase = draws.uniform(0.0, 2 * std::numbers::pi);
    s.dropout = 0.25;
    s.speckle = 0.015;
  }
  return s;
}

GlyphBlock render_glyph(const Recipe& recipe, const Style& style, KeyedStream& draws) {
  constexpr double kMid = kGlyphSide / 2.0;
  const double cs = std::cos(style.angle);
  const double sn = std::sin(style.angle);
  GlyphBlock block;
  for (int y = 0; y < kGlyphSide; ++y) {
    for (int x = 0; x < kGlyphSide; ++x) {
      // Undo the jitter transform to find the canonical point this pixel shows.
      double qx = x + 0.5 - kMid - style.tx;
      double qy = y + 0.5 - kMid - style.ty;
      qx -= style.shear * qy + style.wobble_amp * std::sin(0.6 * qy + style.wobble_phase);
      qx /= style.aspect;
      const double px = kMid + (cs * qx + sn * qy) / style.scale;
      const double py = kMid + (-sn * qx + cs * qy) / style.scale;
      double dist = 1e9;
      for (int s : recipe) dist = std::min(dist, stroke_distance(kStrokes[static_cast<std::size_t>(s)], px, py));
      bool ink = dist <= style.half_width;
      const double roll = draws.uniform();
      if (ink && roll < style.dropout) ink = false;
      if (!ink && roll > 1.0 - style.speckle) ink = true;
      block.values[static_cast<std::size_t>(y) * kGlyphSide + x] = ink ? 1.0 : 0.0;
    }
  }
  return block;
}

// Single-code-point Tamil letters, digits and signs, then Latin capitals.
constexpr std::array<char32_t, 58> kTamil = {
    0x0B85, 0x0B86, 0x0B87, 0x0B88, 0x0B89, 0x0B8A, 0x0B8E, 0x0B8F, 0x0B90, 0x0B92, 0x0B93, 0x0B94,
    0x0B95, 0x0B99, 0x0B9A, 0x0B9E, 0x0B9F, 0x0BA3, 0x0BA4, 0x0BA8, 0x0BAA, 0x0BAE, 0x0BAF, 0x0BB0,
    0x0BB2, 0x0BB5, 0x0BB4, 0x0BB3, 0x0BB1, 0x0BA9, 0x0B9C, 0x0BB6, 0x0BB7, 0x0BB8, 0x0BB9, 0x0B83,
    0x0BD0, 0x0BE6, 0x0BE7, 0x0BE8, 0x0BE9, 0x0BEA, 0x0BEB, 0x0BEC, 0x0BED, 0x0BEE, 0x0BEF, 0x0BF0,
    0x0BF1, 0x0BF2, 0x0BF3, 0x0BF4, 0x0BF5, 0x0BF6, 0x0BF7, 0x0BF8, 0x0BF9, 0x0BFA,
};

}  // namespace

std::string synth_glyph_text(int class_id) {
  if (class_id < 0 || class_id >= kMaxSynthClasses) fail(ErrorCode::BadClassId, "synthetic class " + std::to_string(class_id));
  const auto idx = static_cast<std::size_t>(class_id);
  const char32_t cp = idx < kTamil.size() ? kTamil[idx] : static_cast<char32_t>(U'A' + (idx - kTamil.size()));
  return utf8_encode(std::u32string(1, cp));
}

Corpus synth_corpus(int num_classes, int per_class, std::uint64_t seed, Family family) {
  if (num_classes < 2 || num_classes > kMaxSynthClasses) {
    fail(ErrorCode::InvalidArgument, "synthetic corpus needs 2.." + std::to_string(kMaxSynthClasses) + " classes");
  }
  if (per_class < 0) fail(ErrorCode::InvalidArgument, "per-class count must be >= 0");
  Corpus corpus;
  for (int c = 0; c < num_classes; ++c) corpus.labels.intern(synth_glyph_text(c), family);
  corpus.examples.reserve(static_cast<std::size_t>(num_classes) * per_class);
  for (int c = 0; c < num_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      KeyedStream draws(mix_keys({seed, static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(c),
                                  static_cast<std::uint64_t>(i)}));
      const Style style = draw_style(draws, family);
      corpus.examples.push_back({render_glyph(recipes()[static_cast<std::size_t>(c)], style, draws), c, family});
    }
  }
  return corpus;
}

SynthPage synth_page(const Corpus& corpus, GridSpec grid, int scale, std::uint64_t seed) {
  grid.validate();
  if (scale < 1) fail(ErrorCode::InvalidArgument, "page scale must be >= 1");
  if (corpus.labels.empty()) fail(ErrorCode::EmptyCorpus, "cannot lay out a page from an empty corpus");
  const int k = corpus.labels.size();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    members[static_cast<std::size_t>(corpus.examples[i].class_id)].push_back(i);
  }

  const int side = kGlyphSide * scale;
  const int width = grid.cols * side;
  const int height = grid.rows * side;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height, 255);
  std::string text;
  std::mt19937_64 rng(seed);
  for (int r = 0; r < grid.rows; ++r) {
    if (r > 0) text.push_back('\n');
    for (int c = 0; c < grid.cols; ++c) {
      const int class_id = (r * grid.cols + c) % k;
      const auto& pool = members[static_cast<std::size_t>(class_id)];
      if (pool.empty()) fail(ErrorCode::UncoveredClass, "no example for class " + std::to_string(class_id));
      const auto& block = corpus.examples[pool[uniform_index(rng, pool.size())]].block;
      text += corpus.labels.at(class_id).glyph_text;
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          const double v = block.at(x / scale, y / scale);
          pixels[static_cast<std::size_t>(r * side + y) * width + c * side + x] =
              static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - v)));
        }
      }
    }
  }
  return {GrayImage(width, height, std::move(pixels)), std::move(text)};
}

}  // namespace glyphocr
