#include "blendkit/image.hpp"

#include <algorithm>
#include <string>

#include "blendkit/error.hpp"

namespace blendkit {

bool in_unit_range(const ImageRGB& img) {
  return std::all_of(img.values().begin(), img.values().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

ImageRGB clamped(ImageRGB img) {
  for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

double luma(const std::array<double, 3>& rgb) {
  return 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

BlendTask::BlendTask(ImageRGB source, ImageRGB target, BinaryMask mask, Placement placement)
    : source_(std::move(source)),
      target_(std::move(target)),
      mask_(std::move(mask)),
      placement_(placement) {
  check_mask(mask_);
  if (placement_.offset_x < 0 || placement_.offset_y < 0 ||
      placement_.offset_x + source_.width() > target_.width() ||
      placement_.offset_y + source_.height() > target_.height()) {
    throw ValidationError("placement (" + std::to_string(placement_.offset_x) + "," +
                          std::to_string(placement_.offset_y) + ") puts the " +
                          std::to_string(source_.width()) + "x" +
                          std::to_string(source_.height()) + " source outside the " +
                          std::to_string(target_.width()) + "x" +
                          std::to_string(target_.height()) + " target");
  }
}

void BlendTask::check_mask(const BinaryMask& mask) const {
  if (!mask.same_shape(source_)) {
    throw ValidationError("mask is " + std::to_string(mask.width()) + "x" +
                          std::to_string(mask.height()) + " but source is " +
                          std::to_string(source_.width()) + "x" +
                          std::to_string(source_.height()));
  }
}

BinaryMask place_mask(const BinaryMask& mask, const Placement& placement, int target_height,
                      int target_width) {
  BinaryMask placed(target_height, target_width);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(y, x)) placed.set(y + placement.offset_y, x + placement.offset_x, true);
  return placed;
}

ImageRGB paste_block(const ImageRGB& target, const ImageRGB& block, const BinaryMask& mask,
                     const Placement& placement) {
  ImageRGB out = target;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(y, x))
        out.set_pixel(y + placement.offset_y, x + placement.offset_x, block.pixel(y, x));
  return out;
}

ImageRGB crop(const ImageRGB& img, int y, int x, int height, int width) {
  ImageRGB out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out.set_pixel(r, c, img.pixel(y + r, x + c));
  return out;
}

ImageRGB composite_copy_paste(const BlendTask& task) {
  return paste_block(task.target(), task.source(), task.mask(), task.placement());
}

}  // namespace blendkit
