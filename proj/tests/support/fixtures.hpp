#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "blendkit/image.hpp"

namespace blendkit::testing {

struct Fixture {
  BlendTask task;
  BinaryMask refined;  ///< refine_mask(task.mask()) with default parameters
};

/// 64x64 smooth background, 32x32 textured source with a radius-12 disc
/// mask placed at (16,16).
Fixture seam_fixture64();

/// Low-saturation 64x64 target (S ~ 0.1) and a 24x24 high-saturation
/// source (S ~ 0.9) whose 16x16 block mask lands at (20,20).
Fixture bright_seam_fixture();

struct FixtureFiles {
  std::filesystem::path source, target, mask;
  std::string offset;
};

/// Saves the fixture's source, target and (unrefined) mask as PNGs.
FixtureFiles write_fixture(const Fixture& f, const std::filesystem::path& dir);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

ImageRGB random_image(std::mt19937_64& rng, int height, int width, double lo = 0.0,
                      double hi = 1.0);

/// Independent Bernoulli pixels.
BinaryMask random_mask(std::mt19937_64& rng, int height, int width, double p);

/// Union of a few random filled rectangles; realistic blob-like masks.
BinaryMask random_blobs(std::mt19937_64& rng, int height, int width, int count);

}  // namespace blendkit::testing
