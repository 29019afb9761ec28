#include "glyphocr/binarize.hpp"

#include <algorithm>
#include <string>

#include "glyphocr/errors.hpp"

namespace glyphocr {

namespace {

struct Moments {
  std::uint64_t count = 0;
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
};

// count * variance * count, i.e. n*sum(v^2) - sum(v)^2, exact in 128 bits.
double scaled_spread(const Moments& m) {
  if (m.count == 0) return 0.0;
  const unsigned __int128 a = static_cast<unsigned __int128>(m.count) * m.sum_sq;
  const unsigned __int128 b = static_cast<unsigned __int128>(m.sum) * m.sum;
  return static_cast<double>(a - b) / static_cast<double>(m.count);
}

double objective(const Moments& background, const Moments& total) {
  const Moments foreground{total.count - background.count, total.sum - background.sum,
                           total.sum_sq - background.sum_sq};
  return (scaled_spread(background) + scaled_spread(foreground)) / static_cast<double>(total.count);
}

Moments accumulate(const Histogram256& hist, int up_to) {
  Moments m;
  for (int v = 0; v <= up_to; ++v) {
    const std::uint64_t c = hist.counts[v];
    m.count += c;
    m.sum += c * static_cast<std::uint64_t>(v);
    m.sum_sq += c * static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(v);
  }
  return m;
}

constexpr double kTieTolerance = 1e-12;

}  // namespace

Histogram256 histogram(const GrayImage& img) {
  Histogram256 h;
  for (std::uint8_t v : img.pixels()) ++h.counts[v];
  h.total = img.pixels().size();
  return h;
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1) fail(ErrorCode::InvalidArgument, "binary image dimensions must be positive");
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorCode::InvalidArgument, "bit buffer does not match dimensions");
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    fail(ErrorCode::InvalidArgument, "binary image values must be 0 or 1");
  }
}

std::size_t BinaryImage::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double within_class_variance(const Histogram256& hist, int threshold) {
  if (hist.total == 0) fail(ErrorCode::EmptyHistogram, "histogram has no pixels");
  return objective(accumulate(hist, threshold), accumulate(hist, 255));
}

OtsuResult otsu_threshold(const Histogram256& hist) {
  if (hist.total == 0) fail(ErrorCode::EmptyHistogram, "histogram has no pixels");

  int occupied = 0;
  int only_bin = 0;
  for (int v = 0; v < 256; ++v) {
    if (hist.counts[v] != 0) {
      ++occupied;
      only_bin = v;
    }
  }
  if (occupied == 1) return {only_bin, 0.0, true};

  const Moments total = accumulate(hist, 255);
  std::array<double, 256> sweep{};
  Moments background;
  for (int t = 0; t < 256; ++t) {
    const std::uint64_t c = hist.counts[t];
    background.count += c;
    background.sum += c * static_cast<std::uint64_t>(t);
    background.sum_sq += c * static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(t);
    sweep[t] = objective(background, total);
  }
  const double best = *std::min_element(sweep.begin(), sweep.end());
  const double slack = kTieTolerance * std::max(1.0, best);
  for (int t = 0; t < 256; ++t) {
    if (sweep[t] <= best + slack) return {t, sweep[t], false};
  }
  fail(ErrorCode::Internal, "otsu sweep found no minimum");
}

std::string_view to_string(Polarity polarity) noexcept {
  switch (polarity) {
    case Polarity::dark_foreground: return "dark_foreground";
    case Polarity::light_foreground: return "light_foreground";
    case Polarity::automatic: return "auto";
  }
  return "auto";
}

Polarity parse_polarity(std::string_view text) {
  if (text == "dark_foreground" || text == "dark") return Polarity::dark_foreground;
  if (text == "light_foreground" || text == "light") return Polarity::light_foreground;
  if (text == "auto") return Polarity::automatic;
  fail(ErrorCode::InvalidArgument, "unknown polarity '" + std::string(text) + "'");
}

Polarity resolve_polarity(const GrayImage& img, int threshold, Polarity polarity) {
  if (threshold < 0 || threshold > 255) fail(ErrorCode::InvalidArgument, "threshold outside [0,255]");
  if (polarity != Polarity::automatic) return polarity;
  const auto pixels = img.pixels();
  const auto dark = static_cast<std::size_t>(
      std::count_if(pixels.begin(), pixels.end(), [threshold](std::uint8_t v) { return v <= threshold; }));
  const std::size_t light = pixels.size() - dark;
  // Compare 2*count against n to avoid fractions.
  const bool dark_minority = 2 * dark < pixels.size();
  const bool light_minority = 2 * light < pixels.size();
  if (light_minority && !dark_minority) return Polarity::light_foreground;
  return Polarity::dark_foreground;
}

BinaryImage apply_threshold(const GrayImage& img, int threshold, Polarity polarity) {
  const Polarity resolved = resolve_polarity(img, threshold, polarity);
  const auto pixels = img.pixels();
  std::vector<std::uint8_t> bits(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const bool dark = pixels[i] <= threshold;
    bits[i] = (resolved == Polarity::dark_foreground) == dark ? 1 : 0;
  }
  return BinaryImage(img.width(), img.height(), std::move(bits));
}

Binarization binarize(const GrayImage& img, Polarity polarity) {
  const OtsuResult otsu = otsu_threshold(histogram(img));
  const Polarity resolved = resolve_polarity(img, otsu.threshold, polarity);
  return {otsu, resolved, apply_threshold(img, otsu.threshold, resolved)};
}

GrayImage render_binary(const BinaryImage& img) {
  const auto bits = img.bits();
  std::vector<std::uint8_t> pixels(bits.size());
  std::transform(bits.begin(), bits.end(), pixels.begin(),
                 [](std::uint8_t b) { return b ? std::uint8_t{0} : std::uint8_t{255}; });
  return GrayImage(img.width(), img.height(), std::move(pixels));
}

}  // namespace glyphocr
