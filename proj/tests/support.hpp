#ifndef MSS_TESTS_SUPPORT_HPP_
#define MSS_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <random>
#include <string>

#include "mss/image.hpp"

namespace mss::test {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mss_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Image random_image(int w, int h, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  Image img(w, h);
  for (float& p : img.pixels) p = u(rng);
  return img;
}

/// Smooth random texture: sum of a few sinusoids, kept inside [0.2, 0.8].
inline Image smooth_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double fx[3], fy[3], ph[3];
  for (int k = 0; k < 3; ++k) {
    fx[k] = 0.05 + 0.25 * u(rng);
    fy[k] = 0.05 + 0.25 * u(rng);
    ph[k] = 6.28 * u(rng);
  }
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 0;
      for (int k = 0; k < 3; ++k) v += std::sin(fx[k] * x + fy[k] * y + ph[k]);
      img.at(x, y) = static_cast<float>(0.5 + 0.1 * v);
    }
  return img;
}

}  // namespace mss::test

#endif  // MSS_TESTS_SUPPORT_HPP_
