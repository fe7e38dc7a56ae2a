#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "setscope/config.hpp"
#include "setscope/geometry.hpp"

namespace testing_support {

inline const setscope::EngineConfig& default_config() {
  static const setscope::EngineConfig cfg = setscope::load_config(SETSCOPE_DEFAULT_CONFIG);
  return cfg;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("setscope-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Random point sequences whose coordinates land on a coarse grid, so equal
/// x values, zero steps and exact threshold distances all show up.
inline std::vector<setscope::Point2> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> mode(0, 3);
  std::uniform_int_distribution<int> step(-4, 4);
  std::uniform_real_distribution<double> any(0.0, 1280.0);
  std::vector<setscope::Point2> pts;
  pts.reserve(n);
  double x = 640.0, y = 360.0;
  const int m = mode(rng);
  for (std::size_t i = 0; i < n; ++i) {
    switch (m) {
      case 0:  // free wandering on a 1 px grid
        x += step(rng);
        y += step(rng);
        break;
      case 1:  // 3-4-5 style steps so distances hit the 5 px threshold exactly
        x += 3.0 * step(rng) / 4.0;
        y += 4.0 * step(rng) / 4.0;
        break;
      case 2:  // mostly monotone with reversals
        x += (step(rng) >= -1 ? 6.0 : -6.0);
        y += step(rng);
        break;
      default:
        x = std::round(any(rng));
        y = std::round(any(rng) * 0.5625);
    }
    pts.push_back({x, y});
  }
  return pts;
}

}  // namespace testing_support
