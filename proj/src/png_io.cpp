#include "blendkit/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "blendkit/error.hpp"

namespace blendkit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void on_png_error(png_structp png, png_const_charp) {
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct Decoded {
  int height = 0;
  int width = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;
};

// Keeps the setjmp frame free of objects with non-trivial destructors.
bool decode(std::FILE* fp, Decoded& out, bool& unsupported) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                           on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if ((depth != 8 && depth != 16) || color == PNG_COLOR_TYPE_PALETTE) {
    unsupported = true;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (depth == 16) png_set_swap(png);  // host-order little endian words
  png_read_update_info(png, info);
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.bit_depth = depth;
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y)
    rows[static_cast<std::size_t>(y)] = out.bytes.data() + stride * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode(std::FILE* fp, int height, int width, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                            on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

std::uint8_t encode_channel(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

ImageRGB load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw UnreadableError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw UnreadableError(path.string() + " is not a PNG file");
  std::rewind(fp.get());

  Decoded d;
  bool unsupported = false;
  if (!decode(fp.get(), d, unsupported)) {
    if (unsupported)
      throw UnsupportedFormatError(path.string() +
                                   ": only 8/16-bit gray, gray+alpha, RGB and RGBA PNGs are supported");
    throw UnreadableError("failed to decode " + path.string());
  }

  const double scale = d.bit_depth == 16 ? 65535.0 : 255.0;
  const bool gray = d.channels <= 2;
  ImageRGB img(d.height, d.width);
  const std::size_t bytes_per_sample = d.bit_depth == 16 ? 2 : 1;
  auto sample = [&](std::size_t offset) -> double {
    if (bytes_per_sample == 1) return d.bytes[offset];
    return static_cast<double>(d.bytes[offset] | (d.bytes[offset + 1] << 8));
  };
  const std::size_t px_stride = bytes_per_sample * static_cast<std::size_t>(d.channels);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const std::size_t base =
          (static_cast<std::size_t>(y) * static_cast<std::size_t>(d.width) +
           static_cast<std::size_t>(x)) * px_stride;
      for (int c = 0; c < 3; ++c) {
        const std::size_t ch = gray ? 0 : static_cast<std::size_t>(c);
        img.at(y, x, c) = sample(base + ch * bytes_per_sample) / scale;
      }
    }
  }
  return img;
}

void save_png(const ImageRGB& img, const std::filesystem::path& path) {
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  std::vector<std::uint8_t> bytes(stride * static_cast<std::size_t>(img.height()));
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = encode_channel(img.values()[i]);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = bytes.data() + stride * y;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw UnwritableError("cannot open " + path.string() + " for writing");
  if (!encode(fp.get(), img.height(), img.width(), rows))
    throw UnwritableError("failed to encode " + path.string());
  if (std::fflush(fp.get()) != 0) throw UnwritableError("failed to write " + path.string());
}

BinaryMask load_mask(const std::filesystem::path& path, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ValidationError("mask threshold must lie in [0,1]");
  const ImageRGB img = load_png(path);
  BinaryMask mask(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) mask.set(y, x, luma(img.pixel(y, x)) >= threshold);
  return mask;
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  ImageRGB img(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      const double v = mask.at(y, x) ? 1.0 : 0.0;
      img.set_pixel(y, x, {v, v, v});
    }
  save_png(img, path);
}

}  // namespace blendkit
