#include "glyphocr/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "glyphocr/errors.hpp"
#include "glyphocr/raster.hpp"
#include "glyphocr/text.hpp"

namespace glyphocr {

namespace {

// Guards half-up rounding against representation error (77.65 is stored as
// 77.6499999...).
constexpr double kRoundingSlack = 1e-9;

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", round_one_decimal(v));
  return buf;
}

double percent(int correct, int total) { return 100.0 * correct / total; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace

CharScore score_sample(std::string_view predicted, std::string_view truth) {
  const std::u32string t = strip_whitespace(utf8_decode(truth));
  if (t.empty()) fail(ErrorCode::EmptyTruth, "truth text has no characters");
  const std::u32string p = strip_whitespace(utf8_decode(predicted));
  CharScore score{0, static_cast<int>(t.size())};
  const std::size_t n = std::min(p.size(), t.size());
  for (std::size_t i = 0; i < n; ++i) score.correct += p[i] == t[i] ? 1 : 0;
  return score;
}

SampleReport make_sample_report(std::string sample_id, int total_chars, int ocr_correct, std::optional<int> tts_correct) {
  if (total_chars < 1) fail(ErrorCode::InvalidArgument, "total_chars must be >= 1");
  auto in_range = [&](int c) { return c >= 0 && c <= total_chars; };
  if (!in_range(ocr_correct) || (tts_correct && !in_range(*tts_correct))) {
    fail(ErrorCode::InvalidArgument, "correct counts must lie in [0, total_chars]");
  }
  SampleReport r;
  r.sample_id = std::move(sample_id);
  r.total_chars = total_chars;
  r.ocr_correct = ocr_correct;
  r.tts_correct = tts_correct;
  r.ocr_accuracy = percent(ocr_correct, total_chars);
  if (tts_correct) {
    r.tts_accuracy = percent(*tts_correct, total_chars);
    r.efficiency = 100.0 * (ocr_correct + *tts_correct) / (2.0 * total_chars);
  } else {
    r.efficiency = r.ocr_accuracy;
  }
  return r;
}

double round_one_decimal(double value) { return std::floor(value * 10.0 + 0.5 + kRoundingSlack) / 10.0; }

double combined_efficiency(std::span<const double> efficiencies) {
  if (efficiencies.empty()) fail(ErrorCode::EmptyList, "no sample efficiencies");
  for (double e : efficiencies) {
    if (!(e >= 0.0 && e <= 100.0)) fail(ErrorCode::InvalidArgument, "efficiency outside [0,100]");
  }
  // Sorting first makes the floating-point sum independent of input order.
  std::vector<double> sorted(efficiencies.begin(), efficiencies.end());
  std::sort(sorted.begin(), sorted.end());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  return round_one_decimal(mean);
}

CombinedReport combine(std::vector<SampleReport> samples) {
  std::vector<double> eff;
  eff.reserve(samples.size());
  for (const auto& s : samples) eff.push_back(s.efficiency);
  CombinedReport report;
  report.combined_efficiency = combined_efficiency(eff);
  report.samples = std::move(samples);
  return report;
}

std::string report_json(const CombinedReport& report) {
  using nlohmann::ordered_json;
  ordered_json samples = ordered_json::array();
  for (const auto& s : report.samples) {
    ordered_json item;
    item["sample_id"] = s.sample_id;
    item["total_chars"] = s.total_chars;
    item["ocr_accuracy"] = s.ocr_accuracy;
    item["tts_accuracy"] = s.tts_accuracy ? ordered_json(*s.tts_accuracy) : ordered_json(nullptr);
    item["efficiency"] = s.efficiency;
    samples.push_back(std::move(item));
  }
  ordered_json j;
  j["samples"] = std::move(samples);
  j["combined_efficiency"] = report.combined_efficiency;
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string report_table(const CombinedReport& report) {
  std::size_t id_width = std::string_view("sample").size();
  for (const auto& s : report.samples) id_width = std::max(id_width, s.sample_id.size());

  std::string out = "# " + std::string(kEfficiencyRule) + "\n";
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s %8s %8s %8s %10s\n", static_cast<int>(id_width), "sample", "chars", "text%",
                "audio%", "efficiency");
  out += line;
  for (const auto& s : report.samples) {
    const std::string audio = s.tts_accuracy ? fixed1(*s.tts_accuracy) : "-";
    std::snprintf(line, sizeof(line), "%-*s %8d %8s %8s %10s\n", static_cast<int>(id_width), s.sample_id.c_str(),
                  s.total_chars, fixed1(s.ocr_accuracy).c_str(), audio.c_str(), fixed1(s.efficiency).c_str());
    out += line;
  }
  out += "combined efficiency: " + fixed1(report.combined_efficiency) + "\n";
  return out;
}

std::size_t emit_report(const CombinedReport& report, const std::filesystem::path& path) {
  const std::string json = report_json(report);
  const std::string table = report_table(report);
  auto table_path = path;
  table_path.replace_extension(".txt");
  if (table_path == path) table_path += ".table.txt";
  write_text(path, json);
  write_text(table_path, table);
  return json.size() + table.size();
}

}  // namespace glyphocr
