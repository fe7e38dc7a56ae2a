#pragma once

// Direct (non-separable, non-incremental) references for the image kernels.

#include <algorithm>
#include <cmath>
#include <vector>

#include "setscope/image.hpp"

namespace oracle {

using setscope::Image;
using setscope::Mask;

/// Full 2D Gaussian window exp(-(u^2+v^2)/(2 sigma^2)) over radius
/// ceil(3 sigma), normalized to unit sum, row-major.
inline std::vector<double> gaussian_2d(double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  const int n = 2 * r + 1;
  std::vector<double> k(static_cast<std::size_t>(n * n));
  double sum = 0.0;
  for (int v = -r; v <= r; ++v) {
    for (int u = -r; u <= r; ++u) {
      const double w = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
      k[(v + r) * n + (u + r)] = w;
      sum += w;
    }
  }
  for (auto& w : k) w /= sum;
  return k;
}

/// 2D convolution with clamp-to-edge borders, in double precision.
template <typename T>
Image<double> convolve_2d(const Image<T>& src, double sigma) {
  const auto k = gaussian_2d(sigma);
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  const int n = 2 * r + 1;
  Image<double> out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double acc = 0.0;
      for (int v = -r; v <= r; ++v) {
        for (int u = -r; u <= r; ++u) {
          const int xx = std::clamp(x + u, 0, src.width() - 1);
          const int yy = std::clamp(y + v, 0, src.height() - 1);
          acc += k[(v + r) * n + (u + r)] * static_cast<double>(src(xx, yy));
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

/// Pixelwise erosion/dilation by a (2r+1)^2 square, considering only the
/// in-frame part of each window.
inline Mask erode_direct(const Mask& m, int r) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (int v = -r; v <= r && all; ++v) {
        for (int u = -r; u <= r && all; ++u) {
          if (m.contains(x + u, y + v) && m(x + u, y + v) == 0) all = false;
        }
      }
      out(x, y) = all ? 1 : 0;
    }
  }
  return out;
}

inline Mask dilate_direct(const Mask& m, int r) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool any = false;
      for (int v = -r; v <= r && !any; ++v) {
        for (int u = -r; u <= r && !any; ++u) {
          if (m.contains(x + u, y + v) && m(x + u, y + v) != 0) any = true;
        }
      }
      out(x, y) = any ? 1 : 0;
    }
  }
  return out;
}

/// Number of 8-connected components by repeated label propagation.
inline int count_components(const Mask& m) {
  const int w = m.width(), h = m.height();
  std::vector<int> label(static_cast<std::size_t>(w * h), -1);
  int next = 0;
  for (int i = 0; i < w * h; ++i) {
    if (m.pixels()[i] && label[i] < 0) label[i] = next++;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = y * w + x;
        if (label[i] < 0) continue;
        for (int v = -1; v <= 1; ++v) {
          for (int u = -1; u <= 1; ++u) {
            if (!m.contains(x + u, y + v)) continue;
            const int j = (y + v) * w + (x + u);
            if (label[j] >= 0 && label[j] < label[i]) {
              label[i] = label[j];
              changed = true;
            }
          }
        }
      }
    }
  }
  std::vector<int> roots;
  for (int l : label) {
    if (l >= 0 && std::find(roots.begin(), roots.end(), l) == roots.end()) roots.push_back(l);
  }
  return static_cast<int>(roots.size());
}

}  // namespace oracle
