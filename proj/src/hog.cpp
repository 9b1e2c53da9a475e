#include "mss/hog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "mss/error.hpp"

namespace mss {

FeatureMap hog_histograms(const Image& img, int cell_size) {
  if (cell_size <= 0) throw Error("cell size must be positive");
  const int cw = img.width / cell_size;
  const int ch = img.height / cell_size;
  if (cw < 1 || ch < 1) throw Error("image smaller than one HOG cell");

  FeatureMap hist(cw, ch, kSensitiveBins);
  const int vw = cw * cell_size;
  const int vh = ch * cell_size;
  const double bins_per_radian = kSensitiveBins / (2.0 * std::numbers::pi);

  for (int y = 0; y < vh; ++y) {
    const int yu = std::max(y - 1, 0), yd = std::min(y + 1, img.height - 1);
    const double yp = (y + 0.5) / cell_size - 0.5;
    const int iy = static_cast<int>(std::floor(yp));
    const double fy = yp - iy;
    for (int x = 0; x < vw; ++x) {
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, img.width - 1);
      const double dx = double(img.at(xr, y)) - img.at(xl, y);
      const double dy = double(img.at(x, yd)) - img.at(x, yu);
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag == 0.0) continue;

      double angle = std::atan2(dy, dx);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      const double pos = angle * bins_per_radian;
      const int b0 = static_cast<int>(std::floor(pos)) % kSensitiveBins;
      const double fb = pos - std::floor(pos);
      const int b1 = (b0 + 1) % kSensitiveBins;

      const double xp = (x + 0.5) / cell_size - 0.5;
      const int ix = static_cast<int>(std::floor(xp));
      const double fx = xp - ix;

      const std::array<int, 2> cxs{ix, ix + 1};
      const std::array<double, 2> wxs{1.0 - fx, fx};
      const std::array<int, 2> cys{iy, iy + 1};
      const std::array<double, 2> wys{1.0 - fy, fy};
      for (int j = 0; j < 2; ++j) {
        if (cys[j] < 0 || cys[j] >= ch || wys[j] == 0.0) continue;
        for (int i = 0; i < 2; ++i) {
          if (cxs[i] < 0 || cxs[i] >= cw || wxs[i] == 0.0) continue;
          auto cell = hist.cell(cxs[i], cys[j]);
          const double w = mag * wxs[i] * wys[j];
          cell[b0] += static_cast<float>(w * (1.0 - fb));
          if (fb > 0) cell[b1] += static_cast<float>(w * fb);
        }
      }
    }
  }
  return hist;
}

FeatureMap extract_hog(const Image& img, int cell_size) {
  const FeatureMap hist = hog_histograms(img, cell_size);
  const int cw = hist.width, ch = hist.height;

  // Gradient energy per cell over contrast-insensitive orientations.
  std::vector<double> energy(static_cast<std::size_t>(cw) * ch, 0.0);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) {
      const auto h = hist.cell(x, y);
      double e = 0;
      for (int o = 0; o < kInsensitiveBins; ++o) {
        const double s = double(h[o]) + h[o + kInsensitiveBins];
        e += s * s;
      }
      energy[static_cast<std::size_t>(y) * cw + x] = e;
    }
  const auto e_at = [&](int x, int y) {
    x = std::clamp(x, 0, cw - 1);
    y = std::clamp(y, 0, ch - 1);
    return energy[static_cast<std::size_t>(y) * cw + x];
  };
  const auto block_norm = [&](int x0, int y0) {
    const double sum = e_at(x0, y0) + e_at(x0 + 1, y0) + e_at(x0, y0 + 1) + e_at(x0 + 1, y0 + 1);
    return 1.0 / std::sqrt(sum + kHogEpsilon);
  };

  FeatureMap out(cw, ch, kHogChannels);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      // Blocks whose 2x2 cell groups contain (x, y).
      const std::array<double, 4> n{block_norm(x - 1, y - 1), block_norm(x, y - 1),
                                    block_norm(x - 1, y), block_norm(x, y)};
      const auto src = hist.cell(x, y);
      auto dst = out.cell(x, y);
      std::array<double, 4> texture{};

      for (int o = 0; o < kSensitiveBins; ++o) {
        double sum = 0;
        for (int b = 0; b < 4; ++b) {
          const double h = std::min(src[o] * n[b], double(kHogClip));
          sum += h;
          texture[b] += h;
        }
        dst[o] = static_cast<float>(0.5 * sum);
      }
      for (int o = 0; o < kInsensitiveBins; ++o) {
        const double v = double(src[o]) + src[o + kInsensitiveBins];
        double sum = 0;
        for (int b = 0; b < 4; ++b) sum += std::min(v * n[b], double(kHogClip));
        dst[kSensitiveBins + o] = static_cast<float>(0.5 * sum);
      }
      for (int b = 0; b < 4; ++b)
        dst[kSensitiveBins + kInsensitiveBins + b] = static_cast<float>(0.2357 * texture[b]);
    }
  }
  return out;
}

}  // namespace mss
