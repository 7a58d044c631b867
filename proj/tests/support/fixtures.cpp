#include "support/fixtures.hpp"

#include <cmath>

#include "blendkit/morphology.hpp"
#include "blendkit/png_io.hpp"

namespace blendkit::testing {

Fixture seam_fixture64() {
  ImageRGB target(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double u = x / 63.0, v = y / 63.0;
      target.set_pixel(y, x, {0.2 + 0.3 * u, 0.3 + 0.2 * v, 0.4 + 0.05 * std::sin(6.0 * u)});
    }
  ImageRGB source(32, 32);
  BinaryMask mask(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      const double u = x / 31.0, v = y / 31.0;
      source.set_pixel(y, x, {0.8 - 0.2 * u, 0.6 + 0.1 * std::cos(5.0 * v), 0.3 + 0.2 * u * v});
      const double dy = y - 15.5, dx = x - 15.5;
      mask.set(y, x, dy * dy + dx * dx <= 144.0);
    }
  BlendTask task(std::move(source), std::move(target), mask, Placement{16, 16});
  BinaryMask refined = refine_mask(task.mask());
  return {std::move(task), std::move(refined)};
}

Fixture bright_seam_fixture() {
  ImageRGB target(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double t = 0.02 * std::sin(0.3 * x) * std::cos(0.2 * y);
      const double v = 0.55 + t;
      target.set_pixel(y, x, {v, 0.9 * v, 0.9 * v + 0.01 * std::sin(0.5 * y)});
    }
  ImageRGB source(24, 24);
  BinaryMask mask(24, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      const double t = 0.03 * std::cos(0.4 * x + 0.1 * y);
      const double v = 0.8 + t;
      source.set_pixel(y, x, {v, 0.1 * v, 0.1 * v + 0.02 * std::sin(0.3 * x)});
      mask.set(y, x, y >= 4 && y < 20 && x >= 4 && x < 20);
    }
  BlendTask task(std::move(source), std::move(target), mask, Placement{20, 20});
  BinaryMask refined = refine_mask(task.mask());
  return {std::move(task), std::move(refined)};
}

FixtureFiles write_fixture(const Fixture& f, const std::filesystem::path& dir) {
  FixtureFiles files{dir / "source.png", dir / "target.png", dir / "mask.png",
                     std::to_string(f.task.placement().offset_x) + "," +
                         std::to_string(f.task.placement().offset_y)};
  std::filesystem::create_directories(dir);
  save_png(f.task.source(), files.source);
  save_png(f.task.target(), files.target);
  save_mask(f.task.mask(), files.mask);
  return files;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("blendkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ImageRGB random_image(std::mt19937_64& rng, int height, int width, double lo, double hi) {
  std::uniform_real_distribution<double> uni(lo, hi);
  ImageRGB img(height, width);
  for (double& v : img.values()) v = uni(rng);
  return img;
}

BinaryMask random_mask(std::mt19937_64& rng, int height, int width, double p) {
  std::bernoulli_distribution coin(p);
  BinaryMask m(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) m.set(y, x, coin(rng));
  return m;
}

BinaryMask random_blobs(std::mt19937_64& rng, int height, int width, int count) {
  BinaryMask m(height, width);
  std::uniform_int_distribution<int> ys(0, height - 1), xs(0, width - 1);
  std::uniform_int_distribution<int> ext(2, std::max(2, std::min(height, width) / 2));
  for (int i = 0; i < count; ++i) {
    const int y0 = ys(rng), x0 = xs(rng), h = ext(rng), w = ext(rng);
    for (int y = y0; y < std::min(height, y0 + h); ++y)
      for (int x = x0; x < std::min(width, x0 + w); ++x) m.set(y, x, true);
  }
  return m;
}

}  // namespace blendkit::testing
