#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blendkit/image.hpp"
#include "blendkit/losses.hpp"

namespace blendkit {

// Image metrics work on the 0-255 scale. Each throws ValidationError when
// the two images differ in size.

double mse(const ImageRGB& a, const ImageRGB& b);

/// 10 log10(255^2 / mse); +infinity for identical images.
double psnr(const ImageRGB& a, const ImageRGB& b);

/// Luma SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, L = 255, averaged over every window position fully inside the
/// image. Requires both dimensions >= 11.
double ssim(const ImageRGB& a, const ImageRGB& b);

/// |a & b| / |a | b|; 1.0 when both masks are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

struct WallTimes {
  double stage1 = 0.0;
  double stage2 = 0.0;
};

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;  ///< NaN when the image is too small for the SSIM window
  double mse = 0.0;
  double l_sat_raw = 0.0;
  double l_sat_hinged = 0.0;
  std::optional<double> iou;
  std::optional<LossBreakdown> stage1_final_loss;
  std::optional<LossBreakdown> stage2_final_loss;
  std::optional<WallTimes> wall_times;
  /// Which image psnr/ssim/mse were measured against.
  std::string reference;
  /// Degenerate conditions worth auditing (empty masks, skipped metrics).
  std::vector<std::string> flags;
};

/// PSNR, SSIM and MSE of `image` against `reference`, and the saturation
/// loss of `image` against `original`.
MetricReport measure(const ImageRGB& image, const ImageRGB& reference, const ImageRGB& original,
                     std::string reference_name);

/// Sets report.iou and flags the both-empty case.
void attach_iou(MetricReport& report, const BinaryMask& a, const BinaryMask& b);

}  // namespace blendkit
