#pragma once

#include <filesystem>

#include "blendkit/image.hpp"

namespace blendkit {

/// Reads an 8- or 16-bit gray, gray+alpha, RGB or RGBA PNG into [0,1]
/// channels. Alpha is dropped and gray is replicated to three channels.
/// Throws UnreadableError on I/O or decode failure and
/// UnsupportedFormatError for other bit depths and palette images.
ImageRGB load_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG, each channel encoded as round(clamp(c,0,1)*255).
void save_png(const ImageRGB& img, const std::filesystem::path& path);

/// Binarizes a PNG: true where luma >= threshold.
BinaryMask load_mask(const std::filesystem::path& path, double threshold = 0.5);

/// Black-and-white 8-bit RGB PNG (true = white).
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// The byte save_png emits for a channel value.
std::uint8_t encode_channel(double c);

}  // namespace blendkit
