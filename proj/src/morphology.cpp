#include "blendkit/morphology.hpp"

#include <string>

#include "blendkit/error.hpp"

namespace blendkit {

namespace {

// One separable pass of a square window. For erosion a pixel survives when
// every sample in the 1-D window is inside the image and set; for dilation
// when any in-image sample is set.
BinaryMask sweep(const BinaryMask& in, int radius, bool horizontal, bool erosion) {
  BinaryMask out(in.height(), in.width());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      bool acc = erosion;
      for (int k = -radius; k <= radius; ++k) {
        const bool v = horizontal ? in.at_or_false(y, x + k) : in.at_or_false(y + k, x);
        if (erosion && !v) {
          acc = false;
          break;
        }
        if (!erosion && v) {
          acc = true;
          break;
        }
      }
      out.set(y, x, acc);
    }
  }
  return out;
}

BinaryMask apply(const BinaryMask& mask, const StructuringElement& se, int iterations,
                 bool erosion) {
  if (iterations < 0) throw ValidationError("iteration count must be non-negative");
  BinaryMask m = mask;
  for (int i = 0; i < iterations; ++i) {
    m = sweep(m, se.radius(), true, erosion);
    m = sweep(m, se.radius(), false, erosion);
  }
  return m;
}

}  // namespace

StructuringElement::StructuringElement(int radius) : radius_(radius) {
  if (radius < 1)
    throw ValidationError("structuring element radius must be >= 1, got " +
                          std::to_string(radius));
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se, int iterations) {
  return apply(mask, se, iterations, true);
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se, int iterations) {
  return apply(mask, se, iterations, false);
}

BinaryMask refine_mask(const BinaryMask& mask, int erode_iters, int dilate_iters,
                       const StructuringElement& se) {
  return dilate(erode(mask, se, erode_iters), se, dilate_iters);
}

BinaryMask refine_mask(const BinaryMask& mask, const RefineParams& params) {
  return refine_mask(mask, params.erode_iters, params.dilate_iters,
                     StructuringElement(params.radius));
}

}  // namespace blendkit
