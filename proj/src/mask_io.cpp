#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lfr/alpha_mask.hpp"
#include "lfr/error.hpp"

namespace lfr {
namespace {

constexpr char kMagic[4] = {'A', 'M', 'S', 'K'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 4 + 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }
float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

}  // namespace

std::vector<std::uint8_t> encode_amsk(const AlphaMask& mask) {
  if (mask.alpha.size() != static_cast<std::size_t>(mask.height) * mask.width)
    throw ValidationError("alpha mask buffer does not match its dimensions");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + mask.alpha.size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(mask.width));
  put_u32(out, static_cast<std::uint32_t>(mask.height));
  put_f32(out, mask.quant_step);
  out.push_back(mask.quantized ? 1 : 0);
  for (float a : mask.alpha) put_f32(out, a);
  return out;
}

AlphaMask decode_amsk(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ValidationError("not an AMSK stream (bad magic)");
  const std::uint32_t width = get_u32(bytes.data() + 4);
  const std::uint32_t height = get_u32(bytes.data() + 8);
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16))
    throw ValidationError("AMSK dimensions out of range");
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() != kHeaderSize + count * 4) throw ValidationError("AMSK payload size mismatch");

  AlphaMask mask;
  mask.width = static_cast<int>(width);
  mask.height = static_cast<int>(height);
  mask.quant_step = get_f32(bytes.data() + 12);
  mask.quantized = bytes[16] != 0;
  mask.alpha.resize(count);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    mask.alpha[i] = get_f32(p);
    if (!std::isfinite(mask.alpha[i])) throw ValidationError("AMSK contains non-finite values");
  }
  return mask;
}

void save_amsk(const AlphaMask& mask, const std::filesystem::path& path) {
  const auto bytes = encode_amsk(mask);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

AlphaMask load_amsk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_amsk(bytes);
}

}  // namespace lfr
