#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glyphocr {

struct CharScore {
  int correct = 0;
  int total = 0;

  bool operator==(const CharScore&) const = default;
};

/// Left-aligned, per-code-point comparison after removing whitespace from
/// both texts. `total` is the stripped truth length. Throws EmptyTruth.
CharScore score_sample(std::string_view predicted, std::string_view truth);

struct SampleReport {
  std::string sample_id;
  int total_chars = 0;
  int ocr_correct = 0;
  std::optional<int> tts_correct;
  double ocr_accuracy = 0.0;               // percent
  std::optional<double> tts_accuracy;      // percent
  double efficiency = 0.0;                 // percent
};

/// Efficiency is the mean of the two stage accuracies when the audio stage
/// was scored, otherwise the text accuracy alone.
SampleReport make_sample_report(std::string sample_id, int total_chars, int ocr_correct,
                                std::optional<int> tts_correct = std::nullopt);

/// Half-up rounding to one decimal place.
double round_one_decimal(double value);

/// Arithmetic mean, rounded to one decimal. Throws EmptyList, and
/// InvalidArgument for values outside [0, 100].
double combined_efficiency(std::span<const double> efficiencies);

struct CombinedReport {
  std::vector<SampleReport> samples;
  double combined_efficiency = 0.0;
};

CombinedReport combine(std::vector<SampleReport> samples);

inline constexpr std::string_view kEfficiencyRule =
    "efficiency = (text_accuracy + audio_accuracy) / 2 when audio is scored, else text_accuracy";

std::string report_json(const CombinedReport& report);
std::string report_table(const CombinedReport& report);

/// Writes the JSON to `path` and the table next to it with a `.txt`
/// extension. Returns the total bytes written.
std::size_t emit_report(const CombinedReport& report, const std::filesystem::path& path);

}  // namespace glyphocr
