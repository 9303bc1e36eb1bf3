#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lfr/image.hpp"

namespace lfr {

struct LoadedImage {
  Image image;
  int bit_depth = 8;
};

/// Reads an 8- or 16-bit PNG (gray, RGB or RGBA; alpha is dropped) normalized to [0, 1].
/// Throws IngestError(path) when the file is missing, IngestError(format) when undecodable.
LoadedImage load_png(const std::filesystem::path& path);
LoadedImage decode_png(const std::vector<std::uint8_t>& bytes);

/// Quantizes to round(v * (2^bit_depth - 1)) after clamping to [0, 1].
void save_png(const Image& image, const std::filesystem::path& path, int bit_depth = 8);
std::vector<std::uint8_t> encode_png(const Image& image, int bit_depth = 8);

}  // namespace lfr
