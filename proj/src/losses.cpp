#include "blendkit/losses.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "blendkit/error.hpp"
#include "blendkit/parallel.hpp"

namespace blendkit {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void add_scaled(PixelField& acc, const PixelField& term, double w) {
  auto dst = acc.values();
  auto src = term.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {grad, style, content, sat})
    if (!std::isfinite(w) || w < 0.0)
      throw ValidationError("loss weights must be finite and non-negative");
}

LossValue gradient_loss(const ImageRGB& blend, const LaplacianField& guidance,
                        const BinaryMask& region) {
  LossValue out{0.0, PixelField(blend.height(), blend.width())};
  const std::size_t n = region.count() * 3;
  if (n == 0) return out;
  const LaplacianField lap = laplacian(blend);
  PixelField residual(blend.height(), blend.width());
  std::vector<double> squares;
  squares.reserve(n);
  for (int y = 0; y < blend.height(); ++y)
    for (int x = 0; x < blend.width(); ++x)
      if (region.at(y, x))
        for (int c = 0; c < 3; ++c) {
          const double r = lap.at(y, x, c) - guidance.at(y, x, c);
          residual.at(y, x, c) = r;
          squares.push_back(r * r);
        }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.value = pairwise_sum(squares) * inv_n;
  // d/dI mean(r^2) = (2/N) L^T r and L is symmetric.
  out.grad = laplacian(residual);
  for (double& g : out.grad.values()) g *= 2.0 * inv_n;
  return out;
}

LossValue content_loss(const ImageRGB& blend, const ImageRGB& anchor, const BinaryMask& mask,
                       const Placement& placement) {
  LossValue out{0.0, PixelField(blend.height(), blend.width())};
  const std::size_t n = mask.count() * 3;
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> squares;
  squares.reserve(n);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(y, x)) {
        const int ty = y + placement.offset_y, tx = x + placement.offset_x;
        for (int c = 0; c < 3; ++c) {
          const double d = blend.at(ty, tx, c) - anchor.at(y, x, c);
          squares.push_back(d * d);
          out.grad.at(ty, tx, c) = 2.0 * d * inv_n;
        }
      }
  out.value = pairwise_sum(squares) * inv_n;
  return out;
}

namespace {

ColorStats stats_over(const ImageRGB& img, const BinaryMask* region) {
  ColorStats st;
  std::array<std::vector<double>, 3> samples;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (region == nullptr || region->at(y, x))
        for (int c = 0; c < 3; ++c) samples[static_cast<std::size_t>(c)].push_back(img.at(y, x, c));
  st.count = samples[0].size();
  if (st.count == 0) return st;
  const double inv = 1.0 / static_cast<double>(st.count);
  for (std::size_t c = 0; c < 3; ++c) st.mean[c] = pairwise_sum(samples[c]) * inv;
  std::vector<double> prod(st.count);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a; b < 3; ++b) {
      for (std::size_t i = 0; i < st.count; ++i)
        prod[i] = (samples[a][i] - st.mean[a]) * (samples[b][i] - st.mean[b]);
      st.cov[a][b] = st.cov[b][a] = pairwise_sum(prod) * inv;
    }
  return st;
}

}  // namespace

ColorStats color_stats(const ImageRGB& img) { return stats_over(img, nullptr); }

ColorStats color_stats(const ImageRGB& img, const BinaryMask& region) {
  return stats_over(img, &region);
}

LossValue style_stats_loss(const ImageRGB& blend, const ColorStats& target_stats,
                           const BinaryMask& region) {
  LossValue out{0.0, PixelField(blend.height(), blend.width())};
  const ColorStats b = color_stats(blend, region);
  if (b.count == 0) return out;

  std::array<double, 3> dmean{};
  std::array<std::array<double, 3>, 3> dcov{};
  double value = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    dmean[a] = b.mean[a] - target_stats.mean[a];
    value += dmean[a] * dmean[a];
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t c = 0; c < 3; ++c) {
      dcov[a][c] = b.cov[a][c] - target_stats.cov[a][c];
      value += dcov[a][c] * dcov[a][c];
    }
  out.value = value;

  // dC_ab/dx_pc = (delta_ac d_b + delta_bc d_a) / N with d = x_p - mu, so
  // dL/dx_p = 2 (mu_B - mu_T) / N + 4 (C_B - C_T)(x_p - mu_B) / N.
  const double inv_n = 1.0 / static_cast<double>(b.count);
  for (int y = 0; y < blend.height(); ++y)
    for (int x = 0; x < blend.width(); ++x) {
      if (!region.at(y, x)) continue;
      std::array<double, 3> d{};
      for (std::size_t c = 0; c < 3; ++c) d[c] = blend.at(y, x, static_cast<int>(c)) - b.mean[c];
      for (std::size_t c = 0; c < 3; ++c) {
        double cov_term = 0.0;
        for (std::size_t k = 0; k < 3; ++k) cov_term += dcov[c][k] * d[k];
        out.grad.at(y, x, static_cast<int>(c)) = (2.0 * dmean[c] + 4.0 * cov_term) * inv_n;
      }
    }
  return out;
}

LossValue style_stats_loss(const ImageRGB& blend, const ImageRGB& target,
                           const BinaryMask& region) {
  return style_stats_loss(blend, color_stats(target), region);
}

double saturation_mutation(const SaturationMap& s) {
  if (s.height < 2 || s.width < 2)
    throw ValidationError("image too small for saturation mutation: " +
                          std::to_string(s.width) + "x" + std::to_string(s.height));
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(2 * s.height * s.width));
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      if (y + 1 < s.height) terms.push_back(std::abs(s.at(y + 1, x) - s.at(y, x)));
      if (x + 1 < s.width) terms.push_back(std::abs(s.at(y, x + 1) - s.at(y, x)));
    }
  return pairwise_sum(terms);
}

SaturationLossValue saturation_loss(const ImageRGB& blend, double original_mutation) {
  SaturationLossValue out;
  out.grad = PixelField(blend.height(), blend.width());
  const SaturationMap s = saturation_layer(blend);
  const double area = static_cast<double>(blend.height()) * static_cast<double>(blend.width());
  out.raw = (saturation_mutation(s) - original_mutation) / area;
  out.value = std::max(0.0, out.raw);
  if (out.raw <= 0.0) return out;

  parallel_for(0, blend.height(), [&](int y) {
    for (int x = 0; x < blend.width(); ++x) {
      const double p = s.at(y, x);
      double dm = 0.0;
      if (y > 0) dm += sign(p - s.at(y - 1, x));
      if (y + 1 < s.height) dm -= sign(s.at(y + 1, x) - p);
      if (x > 0) dm += sign(p - s.at(y, x - 1));
      if (x + 1 < s.width) dm -= sign(s.at(y, x + 1) - p);
      if (dm == 0.0) continue;
      const auto ds = saturation_gradient(blend.pixel(y, x));
      for (int c = 0; c < 3; ++c)
        out.grad.at(y, x, c) = dm * ds[static_cast<std::size_t>(c)] / area;
    }
  });
  return out;
}

SaturationLossValue saturation_loss(const ImageRGB& blend, const ImageRGB& original) {
  if (!blend.same_shape(original))
    throw ValidationError("saturation loss needs images of identical dimensions");
  return saturation_loss(blend, saturation_mutation(saturation_layer(original)));
}

TotalLoss total_loss(const ImageRGB& blend, const LossContext& ctx, const LossWeights& weights) {
  TotalLoss out{{}, PixelField(blend.height(), blend.width())};
  LossBreakdown& b = out.breakdown;
  b.empty_region = ctx.region.empty();

  auto check = [](double v, const char* term) {
    if (!std::isfinite(v))
      throw DivergenceError(std::string("optimization diverged: ") + term + " loss is not finite",
                            term);
  };

  if (weights.grad != 0.0) {
    LossValue t = gradient_loss(blend, ctx.guidance, ctx.region);
    check(t.value, "grad");
    b.grad = t.value;
    add_scaled(out.grad, t.grad, weights.grad);
  }
  if (weights.style != 0.0) {
    LossValue t = style_stats_loss(blend, ctx.target_stats, ctx.region);
    check(t.value, "style");
    b.style = t.value;
    add_scaled(out.grad, t.grad, weights.style);
  }
  if (weights.content != 0.0) {
    LossValue t = content_loss(blend, ctx.anchor, ctx.mask, ctx.placement);
    check(t.value, "content");
    b.content = t.value;
    add_scaled(out.grad, t.grad, weights.content);
  }
  if (weights.sat != 0.0) {
    SaturationLossValue t = saturation_loss(blend, ctx.original_mutation);
    check(t.raw, "sat");
    b.sat = t.value;
    b.sat_raw = t.raw;
    add_scaled(out.grad, t.grad, weights.sat);
  }
  b.total = weights.grad * b.grad + weights.style * b.style + weights.content * b.content +
            weights.sat * b.sat;
  if (!std::isfinite(b.total))
    throw DivergenceError("optimization diverged: total loss is not finite", "total");
  return out;
}

}  // namespace blendkit
