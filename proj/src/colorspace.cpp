#include "blendkit/colorspace.hpp"

#include "blendkit/parallel.hpp"

namespace blendkit {

namespace {

// First index wins on ties.
int argmax3(const std::array<double, 3>& p) {
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (p[c] > p[best]) best = c;
  return best;
}

int argmin3(const std::array<double, 3>& p) {
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (p[c] < p[best]) best = c;
  return best;
}

}  // namespace

Hsv rgb_to_hsv(const std::array<double, 3>& rgb) {
  const double r = rgb[0], g = rgb[1], b = rgb[2];
  const double mx = rgb[argmax3(rgb)];
  const double mn = rgb[argmin3(rgb)];
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (out.s == 0.0) return out;

  double h;
  if (mx == r)
    h = 60.0 * (g - b) / delta;
  else if (mx == g)
    h = 60.0 * ((b - r) / delta + 2.0);
  else
    h = 60.0 * ((r - g) / delta + 4.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

std::array<double, 3> saturation_gradient(const std::array<double, 3>& rgb) {
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  const int imax = argmax3(rgb);
  const int imin = argmin3(rgb);
  const double mx = rgb[imax];
  if (mx <= 0.0 || imax == imin) return grad;
  // s = 1 - min/max
  grad[imax] += rgb[imin] / (mx * mx);
  grad[imin] -= 1.0 / mx;
  return grad;
}

SaturationMap saturation_layer(const ImageRGB& img) {
  SaturationMap s(img.height(), img.width());
  parallel_for(0, img.height(), [&](int y) {
    for (int x = 0; x < img.width(); ++x) s.at(y, x) = rgb_to_hsv(img.pixel(y, x)).s;
  });
  return s;
}

}  // namespace blendkit
