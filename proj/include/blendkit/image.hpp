#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace blendkit {

/// Three-channel raster of doubles, row-major, interleaved (r,g,b).
///
/// The tag keeps images (channel values in [0,1]) apart from unbounded
/// per-pixel quantities such as Laplacian fields and loss gradients, which
/// share the same layout.
template <class Tag>
class Raster3 {
 public:
  Raster3() = default;
  Raster3(int height, int width, double fill = 0.0)
      : height_(height),
        width_(width),
        data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::size_t index(int y, int x, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3 + static_cast<std::size_t>(c);
  }
  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::array<double, 3> pixel(int y, int x) const {
    const std::size_t i = index(y, x);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set_pixel(int y, int x, const std::array<double, 3>& rgb) {
    const std::size_t i = index(y, x);
    data_[i] = rgb[0];
    data_[i + 1] = rgb[1];
    data_[i + 2] = rgb[2];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  template <class OtherTag>
  bool same_shape(const Raster3<OtherTag>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Raster3&, const Raster3&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

struct ImageTag {};
struct FieldTag {};

/// Color image; loaders and the optimizer keep every channel in [0,1].
using ImageRGB = Raster3<ImageTag>;
/// Unbounded per-pixel per-channel values (Laplacians, gradients).
using PixelField = Raster3<FieldTag>;

bool in_unit_range(const ImageRGB& img);

/// Clamps every channel to [0,1].
ImageRGB clamped(ImageRGB img);

double luma(const std::array<double, 3>& rgb);

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool fill = false)
      : height_(height),
        width_(width),
        data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill ? 1 : 0) {}

  int height() const { return height_; }
  int width() const { return width_; }

  bool at(int y, int x) const { return data_[index(y, x)] != 0; }
  void set(int y, int x, bool v) { data_[index(y, x)] = v ? 1 : 0; }

  /// Out-of-image coordinates read as false.
  bool at_or_false(int y, int x) const {
    return y >= 0 && x >= 0 && y < height_ && x < width_ && at(y, x);
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  template <class Tag>
  bool same_shape(const Raster3<Tag>& img) const {
    return height_ == img.height() && width_ == img.width();
  }
  bool same_shape(const BinaryMask& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Top-left anchor of the source inside the target. x is a column, y a row.
struct Placement {
  int offset_x = 0;
  int offset_y = 0;
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Source, target, mask (source-sized) and placement. Construction validates
/// dimensions and bounds and throws ValidationError.
class BlendTask {
 public:
  BlendTask(ImageRGB source, ImageRGB target, BinaryMask mask, Placement placement);

  const ImageRGB& source() const { return source_; }
  const ImageRGB& target() const { return target_; }
  const BinaryMask& mask() const { return mask_; }
  const Placement& placement() const { return placement_; }

  /// Throws ValidationError unless a source-sized mask is given.
  void check_mask(const BinaryMask& mask) const;

 private:
  ImageRGB source_;
  ImageRGB target_;
  BinaryMask mask_;
  Placement placement_;
};

/// Target-sized mask that is true where `mask` lands after placement.
BinaryMask place_mask(const BinaryMask& mask, const Placement& placement, int target_height,
                      int target_width);

/// Target with block pixels substituted wherever the source-sized mask is true.
ImageRGB paste_block(const ImageRGB& target, const ImageRGB& block, const BinaryMask& mask,
                     const Placement& placement);

/// Rectangular window of `img` starting at (y, x).
ImageRGB crop(const ImageRGB& img, int y, int x, int height, int width);

ImageRGB composite_copy_paste(const BlendTask& task);

}  // namespace blendkit
