#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "glyphocr/raster.hpp"

namespace testing_support {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "glyphocr-test-XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline glyphocr::GrayImage random_gray(int w, int h, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(dist(rng));
  return glyphocr::GrayImage(w, h, std::move(px));
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace testing_support
