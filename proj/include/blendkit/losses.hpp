#pragma once

#include <array>

#include "blendkit/colorspace.hpp"
#include "blendkit/image.hpp"
#include "blendkit/poisson.hpp"

namespace blendkit {

/// Non-negative weights of the four loss terms.
struct LossWeights {
  double grad = 0.0;
  double style = 0.0;
  double content = 0.0;
  double sat = 0.0;

  /// Throws ValidationError unless every weight is finite and >= 0.
  void validate() const;

  /// Gradient-dominated seam smoothing: (1e4, 1e3, 1, 0).
  static constexpr LossWeights stage1_defaults() { return {1e4, 1e3, 1.0, 0.0}; }
  /// Style and saturation refinement: (0, 1e5, 1, 1e5).
  static constexpr LossWeights stage2_defaults() { return {0.0, 1e5, 1.0, 1e5}; }

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Unweighted term values plus their weighted total.
struct LossBreakdown {
  double total = 0.0;
  double grad = 0.0;
  double style = 0.0;
  double content = 0.0;
  double sat = 0.0;      ///< hinged saturation loss
  double sat_raw = 0.0;  ///< signed saturation loss before the hinge
  bool empty_region = false;
};

/// A scalar loss and its gradient with respect to every pixel of the blend.
struct LossValue {
  double value = 0.0;
  PixelField grad;
};

/// Mean over region pixels and channels of (laplacian(blend) - guidance)^2.
LossValue gradient_loss(const ImageRGB& blend, const LaplacianField& guidance,
                        const BinaryMask& region);

/// Mean over mask-true pixels and channels of (blend - anchor)^2, where the
/// source-sized anchor and mask are positioned by `placement` in the blend.
/// An empty mask yields 0 with a zero gradient.
LossValue content_loss(const ImageRGB& blend, const ImageRGB& anchor, const BinaryMask& mask,
                       const Placement& placement);

/// Channel mean vector and population covariance (divisor N).
struct ColorStats {
  std::array<double, 3> mean{};
  std::array<std::array<double, 3>, 3> cov{};
  std::size_t count = 0;
};

ColorStats color_stats(const ImageRGB& img);
ColorStats color_stats(const ImageRGB& img, const BinaryMask& region);

/// ||mu_B - mu_T||^2 + ||C_B - C_T||_F^2 with blend statistics taken over
/// `region` and target statistics over the whole target image.
LossValue style_stats_loss(const ImageRGB& blend, const ColorStats& target_stats,
                           const BinaryMask& region);
LossValue style_stats_loss(const ImageRGB& blend, const ImageRGB& target,
                           const BinaryMask& region);

/// Anisotropic total variation of the map: absolute differences to the right
/// and lower neighbor, terms that would leave the image dropped. Throws
/// ValidationError when either dimension is below 2.
double saturation_mutation(const SaturationMap& s);

struct SaturationLossValue {
  double value = 0.0;  ///< max(0, raw)
  double raw = 0.0;    ///< (M(blend) - M(original)) / (H W)
  PixelField grad;
};

/// Excess saturation mutation of the blend over the original image.
SaturationLossValue saturation_loss(const ImageRGB& blend, const ImageRGB& original);
/// Same, with the original's mutation precomputed.
SaturationLossValue saturation_loss(const ImageRGB& blend, double original_mutation);

/// Everything a stage needs to evaluate the combined loss of a composite.
struct LossContext {
  LaplacianField guidance;
  BinaryMask region;        ///< target-sized placed mask
  ImageRGB anchor;          ///< source-sized content anchor
  BinaryMask mask;          ///< source-sized refined mask
  Placement placement;
  ColorStats target_stats;
  double original_mutation = 0.0;
};

struct TotalLoss {
  LossBreakdown breakdown;
  PixelField grad;  ///< weighted sum of term gradients, blend-sized
};

/// Weighted sum of the four terms. Zero-weight terms are not evaluated and
/// report 0. Throws DivergenceError naming the first non-finite term.
TotalLoss total_loss(const ImageRGB& blend, const LossContext& ctx, const LossWeights& weights);

}  // namespace blendkit
