#pragma once

#include "blendkit/image.hpp"

namespace blendkit {

/// Square structuring element of side 2*radius+1. Radius must be >= 1.
class StructuringElement {
 public:
  explicit StructuringElement(int radius = 1);
  int radius() const { return radius_; }

 private:
  int radius_;
};

// Samples outside the image count as false for both operations.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se, int iterations = 1);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se, int iterations = 1);

struct RefineParams {
  int erode_iters = 2;
  int dilate_iters = 4;
  int radius = 1;
};

/// Erode to drop thin spurs and specks, then dilate past the original
/// outline so the mask over-covers the object.
BinaryMask refine_mask(const BinaryMask& mask, int erode_iters, int dilate_iters,
                       const StructuringElement& se);
BinaryMask refine_mask(const BinaryMask& mask, const RefineParams& params = {});

}  // namespace blendkit
