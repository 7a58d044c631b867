#include "blendkit/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "blendkit/error.hpp"
#include "blendkit/parallel.hpp"

namespace blendkit {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kPeak = 255.0;

void require_same_shape(const ImageRGB& a, const ImageRGB& b) {
  if (!a.same_shape(b))
    throw ValidationError("images differ in size: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()));
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> luma_plane(const ImageRGB& img) {
  std::vector<double> out(img.pixel_count());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width()) +
          static_cast<std::size_t>(x)] = kPeak * luma(img.pixel(y, x));
  return out;
}

}  // namespace

double mse(const ImageRGB& a, const ImageRGB& b) {
  require_same_shape(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  if (va.empty()) return 0.0;
  std::vector<double> sq(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = kPeak * va[i] - kPeak * vb[i];
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(sq.size());
}

double psnr(const ImageRGB& a, const ImageRGB& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeak * kPeak / m);
}

double ssim(const ImageRGB& a, const ImageRGB& b) {
  require_same_shape(a, b);
  if (a.height() < kWindow || a.width() < kWindow)
    throw ValidationError("SSIM needs images of at least 11x11 pixels");
  const int h = a.height(), w = a.width();
  const std::vector<double> x = luma_plane(a);
  const std::vector<double> y = luma_plane(b);
  const auto taps = gaussian_taps();
  const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  const double c2 = (0.03 * kPeak) * (0.03 * kPeak);

  const int oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> map(static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow));
  parallel_for(0, oh, [&](int oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < kWindow; ++i) {
        for (int j = 0; j < kWindow; ++j) {
          const double wt = taps[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(j)];
          const std::size_t k = static_cast<std::size_t>(oy + i) * static_cast<std::size_t>(w) +
                                static_cast<std::size_t>(ox + j);
          mx += wt * x[k];
          my += wt * y[k];
          sxx += wt * x[k] * x[k];
          syy += wt * y[k] * y[k];
          sxy += wt * x[k] * y[k];
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      map[static_cast<std::size_t>(oy) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(ox)] =
          ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  });
  return pairwise_sum(map) / static_cast<double>(map.size());
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw ValidationError("masks differ in size");
  std::size_t inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      const bool p = a.at(y, x), q = b.at(y, x);
      inter += (p && q) ? 1 : 0;
      uni += (p || q) ? 1 : 0;
    }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

MetricReport measure(const ImageRGB& image, const ImageRGB& reference, const ImageRGB& original,
                     std::string reference_name) {
  MetricReport r;
  r.reference = std::move(reference_name);
  r.mse = mse(image, reference);
  r.psnr_db = psnr(image, reference);
  if (image.height() >= kWindow && image.width() >= kWindow) {
    r.ssim = ssim(image, reference);
  } else {
    r.ssim = std::numeric_limits<double>::quiet_NaN();
    r.flags.emplace_back("ssim_skipped_image_too_small");
  }
  if (image.height() >= 2 && image.width() >= 2) {
    const SaturationLossValue sat = saturation_loss(image, original);
    r.l_sat_raw = sat.raw;
    r.l_sat_hinged = sat.value;
  } else {
    r.flags.emplace_back("l_sat_skipped_image_too_small");
  }
  return r;
}

void attach_iou(MetricReport& report, const BinaryMask& a, const BinaryMask& b) {
  report.iou = iou(a, b);
  if (a.empty() && b.empty()) report.flags.emplace_back("iou_both_masks_empty");
}

}  // namespace blendkit
