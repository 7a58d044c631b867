#pragma once

#include <array>
#include <vector>

#include "blendkit/image.hpp"

namespace blendkit {

struct Hsv {
  double h = 0.0;  ///< degrees in [0, 360)
  double s = 0.0;
  double v = 0.0;
};

/// Hexcone HSV. s is 0 for black pixels and h is 0 for achromatic ones.
Hsv rgb_to_hsv(const std::array<double, 3>& rgb);

/// Partial derivatives of s with respect to (r, g, b). Ties between channels
/// resolve to the lowest channel index; black pixels get a zero gradient.
std::array<double, 3> saturation_gradient(const std::array<double, 3>& rgb);

/// Per-pixel HSV saturation of an image.
struct SaturationMap {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  SaturationMap() = default;
  SaturationMap(int h, int w, double fill = 0.0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  double& at(int y, int x) { return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  double at(int y, int x) const { return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

SaturationMap saturation_layer(const ImageRGB& img);

}  // namespace blendkit
