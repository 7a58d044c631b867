#include "doctest.h"

#include <cmath>
#include <random>

#include "blendkit/error.hpp"
#include "blendkit/losses.hpp"
#include "blendkit/optimizer.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace blendkit;

namespace {

SaturationMap map2x2(double a, double b, double c, double d) {
  SaturationMap s(2, 2);
  s.at(0, 0) = a;
  s.at(0, 1) = b;
  s.at(1, 0) = c;
  s.at(1, 1) = d;
  return s;
}

}  // namespace

TEST_CASE("default weights") {
  CHECK(LossWeights::stage1_defaults() == LossWeights{1e4, 1e3, 1.0, 0.0});
  CHECK(LossWeights::stage2_defaults() == LossWeights{0.0, 1e5, 1.0, 1e5});
  CHECK_THROWS_AS((LossWeights{-1, 0, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((LossWeights{0, NAN, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((LossWeights{0, 0, INFINITY, 0}.validate()), ValidationError);
}

TEST_CASE("gradient loss examples") {
  std::mt19937_64 rng(31);
  const ImageRGB tgt = testing::random_image(rng, 9, 9);
  CHECK(gradient_loss(tgt, laplacian(tgt), BinaryMask(9, 9, true)).value == 0.0);

  // laplacian(blend) = 3 at the centre, guidance 1 -> (3-1)^2 = 4
  ImageRGB blend(5, 5, 0.0);
  blend.set_pixel(2, 2, {0.75, 0.75, 0.75});
  LaplacianField guidance(5, 5, 0.0);
  guidance.set_pixel(2, 2, {1.0, 1.0, 1.0});
  BinaryMask region(5, 5);
  region.set(2, 2, true);
  CHECK(gradient_loss(blend, guidance, region).value == doctest::Approx(4.0));

  CHECK(gradient_loss(blend, guidance, BinaryMask(5, 5)).value == 0.0);
}

TEST_CASE("gradient loss vanishes at the Poisson solution") {
  const testing::Fixture f = testing::seam_fixture64();
  const ImageRGB pb = poisson_blend(f.task, f.refined, {1e-10, 10000});
  const BinaryMask region = place_mask(f.refined, f.task.placement(), 64, 64);
  CHECK(gradient_loss(pb, guidance_field(f.task, f.refined), region).value <= 1e-8);
}

TEST_CASE("gradient loss ignores a constant offset") {
  std::mt19937_64 rng(32);
  ImageRGB a = testing::random_image(rng, 10, 11, 0.0, 0.5);
  const LaplacianField guide = laplacian(testing::random_image(rng, 10, 11));
  const BinaryMask region = testing::random_blobs(rng, 10, 11, 3);
  ImageRGB b = a;
  for (double& v : b.values()) v += 0.37;
  CHECK(gradient_loss(a, guide, region).value ==
        doctest::Approx(gradient_loss(b, guide, region).value).epsilon(1e-12));
}

TEST_CASE("content loss examples") {
  ImageRGB anchor(2, 2, 0.3);
  BinaryMask mask(2, 2);
  mask.set(1, 0, true);
  ImageRGB blend(4, 4, 0.3);
  const Placement pl{1, 2};
  CHECK(content_loss(blend, anchor, mask, pl).value == 0.0);

  blend.at(3, 1, 0) += 0.1;  // source (1,0) -> target (3,1)
  const LossValue l = content_loss(blend, anchor, mask, pl);
  CHECK(l.value == doctest::Approx(0.01 / 3.0));
  CHECK(l.grad.at(3, 1, 0) == doctest::Approx(2.0 * 0.1 / 3.0));
  CHECK(l.grad.at(3, 1, 1) == 0.0);

  const LossValue empty = content_loss(blend, anchor, BinaryMask(2, 2), pl);
  CHECK(empty.value == 0.0);
  for (double g : empty.grad.values()) CHECK(g == 0.0);
}

TEST_CASE("style loss examples") {
  BinaryMask region(4, 4);
  for (int y = 1; y < 3; ++y)
    for (int x = 1; x < 3; ++x) region.set(y, x, true);

  CHECK(style_stats_loss(ImageRGB(4, 4, 0.5), ImageRGB(6, 6, 0.5), region).value == 0.0);
  CHECK(style_stats_loss(ImageRGB(4, 4, 1.0), ImageRGB(6, 6, 0.0), region).value ==
        doctest::Approx(3.0));

  std::mt19937_64 rng(33);
  const ImageRGB img = testing::random_image(rng, 4, 4);
  CHECK(style_stats_loss(img, img, BinaryMask(4, 4, true)).value == doctest::Approx(0.0).scale(1.0));

  BinaryMask single(4, 4);
  single.set(0, 0, true);
  const ColorStats s = color_stats(img, single);
  for (const auto& row : s.cov)
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("color statistics use population covariance") {
  ImageRGB img(1, 2);
  img.set_pixel(0, 0, {0.0, 0.2, 1.0});
  img.set_pixel(0, 1, {1.0, 0.4, 0.0});
  const ColorStats s = color_stats(img);
  CHECK(s.mean[0] == doctest::Approx(0.5));
  CHECK(s.cov[0][0] == doctest::Approx(0.25));
  CHECK(s.cov[0][1] == doctest::Approx(0.05));
  CHECK(s.cov[0][2] == doctest::Approx(-0.25));
  CHECK(s.cov[2][0] == s.cov[0][2]);
}

TEST_CASE("saturation mutation examples") {
  CHECK(saturation_mutation(map2x2(0.3, 0.3, 0.3, 0.3)) == 0.0);
  CHECK(saturation_mutation(map2x2(0, 1, 0, 1)) == 2.0);
  CHECK(saturation_mutation(map2x2(0, 1, 1, 0)) == 4.0);
  CHECK_THROWS_AS(saturation_mutation(SaturationMap(1, 5)), ValidationError);
  CHECK_THROWS_AS(saturation_mutation(SaturationMap(5, 1)), ValidationError);
}

TEST_CASE("saturation mutation properties") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> uni(0.0, 1.0), kd(-3.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    SaturationMap s(5, 7);
    for (double& v : s.data) v = uni(rng);
    const double m = saturation_mutation(s);
    CHECK(m > 0.0);
    const double k = kd(rng);
    SaturationMap scaled = s;
    for (double& v : scaled.data) v *= k;
    CHECK(saturation_mutation(scaled) == doctest::Approx(std::abs(k) * m).epsilon(1e-12));
  }
}

TEST_CASE("saturation loss examples") {
  std::mt19937_64 rng(35);
  const ImageRGB img = testing::random_image(rng, 6, 6);
  const SaturationLossValue same = saturation_loss(img, img);
  CHECK(same.value == 0.0);
  CHECK(same.raw == 0.0);

  // S layers [[0,1],[0,1]] (M = 2) against a gray original (M = 0)
  ImageRGB blend(2, 2);
  blend.set_pixel(0, 0, {0.5, 0.5, 0.5});
  blend.set_pixel(0, 1, {1.0, 0.0, 0.0});
  blend.set_pixel(1, 0, {0.5, 0.5, 0.5});
  blend.set_pixel(1, 1, {0.0, 1.0, 0.0});
  const ImageRGB gray(2, 2, 0.4);
  const SaturationLossValue up = saturation_loss(blend, gray);
  CHECK(up.raw == 0.5);
  CHECK(up.value == 0.5);

  const SaturationLossValue down = saturation_loss(gray, blend);
  CHECK(down.raw == -0.5);
  CHECK(down.value == 0.0);
  for (double g : down.grad.values()) CHECK(g == 0.0);

  CHECK_THROWS_AS(saturation_loss(gray, ImageRGB(3, 2)), ValidationError);
}

TEST_CASE("total loss composition") {
  const testing::Fixture f = testing::seam_fixture64();
  const LossContext ctx = make_loss_context(f.task, f.refined, f.task.source());
  const ImageRGB cp = paste_block(f.task.target(), f.task.source(), f.refined, f.task.placement());

  const TotalLoss zero = total_loss(cp, ctx, {});
  CHECK(zero.breakdown.total == 0.0);
  for (double g : zero.grad.values()) CHECK(g == 0.0);

  const LossWeights w{2.0, 3.0, 5.0, 7.0};
  const TotalLoss t = total_loss(cp, ctx, w);
  const LossBreakdown& b = t.breakdown;
  CHECK(b.total == w.grad * b.grad + w.style * b.style + w.content * b.content + w.sat * b.sat);
  CHECK(b.grad > 0.0);
  CHECK(b.style > 0.0);
  CHECK(b.content == 0.0);  // composite equals the source under the mask

  const TotalLoss only_style = total_loss(cp, ctx, {0, 1, 0, 0});
  CHECK(only_style.breakdown.grad == 0.0);
  CHECK(only_style.breakdown.sat == 0.0);
  CHECK(only_style.breakdown.style == b.style);
}

TEST_CASE("total loss flags non-finite terms") {
  const testing::Fixture f = testing::seam_fixture64();
  LossContext ctx = make_loss_context(f.task, f.refined, f.task.source());
  ctx.anchor.at(10, 10, 0) = NAN;
  const ImageRGB cp = paste_block(f.task.target(), f.task.source(), f.refined, f.task.placement());
  try {
    total_loss(cp, ctx, {0, 0, 1, 0});
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.term() == "content");
  }
}

TEST_CASE("combined gradient matches finite differences") {
  const testing::Fixture f = testing::bright_seam_fixture();
  const LossContext ctx = make_loss_context(f.task, f.refined, f.task.source());
  std::mt19937_64 rng(36);
  ImageRGB blend = paste_block(f.task.target(), f.task.source(), f.refined, f.task.placement());
  // jitter under the mask so nothing sits on a tie
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (ctx.region.at(y, x))
        for (int c = 0; c < 3; ++c) blend.at(y, x, c) = std::clamp(blend.at(y, x, c) + jitter(rng), 0.05, 0.95);
  const LossWeights w{1.0, 2.0, 3.0, 0.0};
  const TotalLoss t = total_loss(blend, ctx, w);
  auto f_total = [&](const ImageRGB& im) { return total_loss(im, ctx, w).breakdown.total; };
  std::uniform_int_distribution<int> coord(20, 43), ch(0, 2);
  int checked = 0;
  while (checked < 10) {
    const int y = coord(rng), x = coord(rng), c = ch(rng);
    if (!ctx.region.at(y, x)) continue;
    const double fd = testing::central_difference(f_total, blend, y, x, c);
    CHECK(t.grad.at(y, x, c) == doctest::Approx(fd).epsilon(1e-3));
    ++checked;
  }
}
