#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "glyphocr/errors.hpp"
#include "glyphocr/evalkit.hpp"
#include "test_support.hpp"

using namespace glyphocr;

namespace {

const std::vector<double> kSixSamples{79.1, 79.7, 81.3, 75.0, 71.1, 80.0};

CombinedReport six_sample_report() {
  std::vector<SampleReport> samples;
  for (std::size_t i = 0; i < kSixSamples.size(); ++i) {
    // 1000 characters per sample: text accuracy equals the reference efficiency.
    const int correct = static_cast<int>(std::lround(kSixSamples[i] * 10));
    samples.push_back(make_sample_report("sample" + std::to_string(i + 1), 1000, correct));
  }
  return combine(std::move(samples));
}

}  // namespace

TEST(Score, Examples) {
  EXPECT_EQ(score_sample("abcdefghij", "abcdefghij"), (CharScore{10, 10}));
  EXPECT_EQ(score_sample("", "abcd"), (CharScore{0, 4}));
  EXPECT_EQ(score_sample("abxd", "abcd"), (CharScore{3, 4}));
  EXPECT_EQ(score_sample("a b\ncd", " abcd\t"), (CharScore{4, 4}));
  EXPECT_EQ(score_sample("abcdef", "abc"), (CharScore{3, 3}));
  try {
    score_sample("x", " \n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyTruth);
  }
}

TEST(Score, CountsCodePointsNotBytes) {
  // Two-byte code points: one wrong character costs exactly one position.
  const std::string truth = "\xc3\xa9\xc3\xa8";
  const std::string predicted = "\xc3\xa9\xc3\xaa";
  EXPECT_EQ(score_sample(predicted, truth), (CharScore{1, 2}));
}

TEST(Efficiency, ReferenceTable) {
  // Independent mean of the six reference per-sample efficiencies.
  double sum = 0;
  for (double v : kSixSamples) sum += v;
  EXPECT_NEAR(sum / 6, 77.7, 0.05);
  EXPECT_DOUBLE_EQ(combined_efficiency(kSixSamples), 77.7);
  EXPECT_DOUBLE_EQ(six_sample_report().combined_efficiency, 77.7);
}

TEST(Efficiency, SmallExamples) {
  EXPECT_DOUBLE_EQ(combined_efficiency(std::vector<double>{42.3}), 42.3);
  EXPECT_DOUBLE_EQ(combined_efficiency(std::vector<double>{0, 100}), 50.0);
  EXPECT_DOUBLE_EQ(combined_efficiency(std::vector<double>{0.05}), 0.1);
  try {
    combined_efficiency(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyList);
  }
  EXPECT_THROW(combined_efficiency(std::vector<double>{101}), Error);
}

TEST(Efficiency, IdenticalValuesAndPermutationProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = static_cast<double>(rng() % 1001) / 10.0;
    const std::size_t n = 1 + rng() % 20;
    EXPECT_DOUBLE_EQ(combined_efficiency(std::vector<double>(n, v)), v);

    std::vector<double> values(n);
    for (auto& x : values) x = static_cast<double>(rng() % 100001) / 1000.0;
    const double base = combined_efficiency(values);
    std::shuffle(values.begin(), values.end(), rng);
    EXPECT_EQ(combined_efficiency(values), base);
  }
}

TEST(SampleReport, EfficiencyRule) {
  const auto text_only = make_sample_report("a", 10, 7);
  EXPECT_DOUBLE_EQ(text_only.ocr_accuracy, 70.0);
  EXPECT_DOUBLE_EQ(text_only.efficiency, 70.0);
  EXPECT_FALSE(text_only.tts_accuracy.has_value());
  const auto both = make_sample_report("b", 10, 7, 9);
  EXPECT_DOUBLE_EQ(*both.tts_accuracy, 90.0);
  EXPECT_DOUBLE_EQ(both.efficiency, 80.0);
  EXPECT_THROW(make_sample_report("c", 10, 11), Error);
  EXPECT_THROW(make_sample_report("d", 0, 0), Error);
}

TEST(Report, DeterministicAndReadable) {
  testing_support::TempDir dir;
  const auto report = six_sample_report();
  const std::size_t n1 = emit_report(report, dir / "one.json");
  const std::size_t n2 = emit_report(report, dir / "two.json");
  EXPECT_EQ(n1, n2);
  EXPECT_EQ(testing_support::slurp(dir / "one.json"), testing_support::slurp(dir / "two.json"));
  EXPECT_EQ(testing_support::slurp(dir / "one.txt"), testing_support::slurp(dir / "two.txt"));
  const std::string table = testing_support::slurp(dir / "one.txt");
  EXPECT_NE(table.find("combined efficiency: 77.7"), std::string::npos);
  EXPECT_NE(table.find(std::string(kEfficiencyRule)), std::string::npos);
  EXPECT_EQ(n1, testing_support::slurp(dir / "one.json").size() + table.size());
  EXPECT_NE(report_json(report).find("\"combined_efficiency\": 77.7"), std::string::npos);

  const auto single = combine({make_sample_report("only", 4, 3)});
  const std::string t = report_table(single);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 4);  // rule, header, one row, combined line
}
