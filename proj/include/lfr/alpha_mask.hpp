#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lfr {

/// Per-pixel refocus parameter map (row-major, H x W).
struct AlphaMask {
  int height = 0;
  int width = 0;
  std::vector<float> alpha;
  float quant_step = 0.0f;
  bool quantized = false;

  AlphaMask() = default;
  AlphaMask(int h, int w, float fill) : height(h), width(w), alpha(static_cast<std::size_t>(h) * w, fill) {}

  float& at(int y, int x) noexcept { return alpha[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const noexcept { return alpha[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const AlphaMask&, const AlphaMask&) = default;
};

/// Binary mask exchange format:
///   "AMSK" | u32 width | u32 height | f32 quant_step | u8 quantized | H*W f32, row-major,
/// all little-endian.
std::vector<std::uint8_t> encode_amsk(const AlphaMask& mask);
/// Throws ValidationError on bad magic, truncated payload or non-finite values.
AlphaMask decode_amsk(const std::vector<std::uint8_t>& bytes);

void save_amsk(const AlphaMask& mask, const std::filesystem::path& path);
AlphaMask load_amsk(const std::filesystem::path& path);

}  // namespace lfr
