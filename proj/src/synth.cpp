#include "lfr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lfr/error.hpp"
#include "lfr/filters.hpp"

namespace lfr {

std::vector<std::uint8_t> rect_mask(int height, int width, const PixelRect& rect) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(height) * width, 0);
  for (int y = std::max(rect.y0, 0); y <= std::min(rect.y1, height - 1); ++y)
    for (int x = std::max(rect.x0, 0); x <= std::min(rect.x1, width - 1); ++x)
      m[static_cast<std::size_t>(y) * width + x] = 1;
  return m;
}

std::vector<std::uint8_t> full_mask(int height, int width) {
  return std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 1);
}

Image noise_texture(int height, int width, int channels, std::uint64_t seed, double blur_sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Image out(height, width, channels);
  for (int c = 0; c < channels; ++c) {
    Plane p(height, width);
    for (auto& v : p.values) v = dist(rng);
    if (blur_sigma > 0.0) {
      const auto k = gaussian_kernel(static_cast<int>(std::ceil(3.0 * blur_sigma)), blur_sigma);
      p = blur_replicate(p, k, k);
    }
    const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
    const double range = *hi - *lo;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        out.at(y, x, c) = range > 0.0 ? static_cast<float>((p(y, x) - *lo) / range) : 0.5f;
  }
  return out;
}

namespace {

void validate(const SyntheticSceneSpec& spec, int grid_u, int grid_v) {
  if (spec.height < 1 || spec.width < 1) throw SynthError("canvas must be non-empty");
  if (grid_u < 1 || grid_v < 1 || grid_u % 2 == 0 || grid_v % 2 == 0) throw SynthError("angular grid must be odd");
  if (spec.layers.empty()) throw SynthError("scene needs at least one layer");

  const std::size_t n = static_cast<std::size_t>(spec.height) * spec.width;
  const int channels = spec.layers.front().texture.channels();
  std::vector<std::uint8_t> covered(n, 0);
  const int max_offset = std::max(grid_u / 2, grid_v / 2);
  for (const auto& layer : spec.layers) {
    if (layer.texture.height() != spec.height || layer.texture.width() != spec.width)
      throw SynthError("layer texture must match the canvas size");
    if (layer.texture.channels() != channels) throw SynthError("layer textures must share a channel count");
    if (layer.mask.size() != n) throw SynthError("layer mask must match the canvas size");
    if (!std::isfinite(layer.disparity)) throw SynthError("layer disparity must be finite");
    if (std::abs(layer.disparity) * max_offset >= std::min(spec.height, spec.width) / 4.0)
      throw SynthError("disparity too large for the canvas");
    for (std::size_t i = 0; i < n; ++i) {
      if (!layer.mask[i]) continue;
      if (covered[i]) throw SynthError("layer masks overlap");
      covered[i] = 1;
    }
  }
}

float sample_bilinear(const Image& tex, double y, double x, int c) {
  const int h = tex.height();
  const int w = tex.width();
  const double fy = std::floor(y);
  const double fx = std::floor(x);
  const double ty = y - fy;
  const double tx = x - fx;
  auto at = [&](int yy, int xx) {
    return static_cast<double>(tex.at(std::clamp(yy, 0, h - 1), std::clamp(xx, 0, w - 1), c));
  };
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  if (ty == 0.0 && tx == 0.0) return static_cast<float>(at(y0, x0));
  const double v = (1 - ty) * ((1 - tx) * at(y0, x0) + tx * at(y0, x0 + 1)) +
                   ty * ((1 - tx) * at(y0 + 1, x0) + tx * at(y0 + 1, x0 + 1));
  return static_cast<float>(v);
}

}  // namespace

SyntheticLightField synthesize_lf(const SyntheticSceneSpec& spec, int grid_u, int grid_v) {
  validate(spec, grid_u, grid_v);

  const int h = spec.height;
  const int w = spec.width;
  const int channels = spec.layers.front().texture.channels();

  // Nearer (larger disparity) layers are tested first.
  std::vector<std::size_t> order(spec.layers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return spec.layers[a].disparity > spec.layers[b].disparity; });

  LightFieldShape shape{grid_u, grid_v, h, w, channels};
  std::vector<float> samples(shape.view_size() * shape.view_count(), 0.0f);
  const int u0 = grid_u / 2;
  const int v0 = grid_v / 2;

  for (int u = 0; u < grid_u; ++u) {
    for (int v = 0; v < grid_v; ++v) {
      float* view = samples.data() + (static_cast<std::size_t>(u) * grid_v + v) * shape.view_size();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (auto li : order) {
            const auto& layer = spec.layers[li];
            const double sy = y - layer.disparity * (v - v0);
            const double sx = x - layer.disparity * (u - u0);
            const int my = std::clamp(static_cast<int>(std::lround(sy)), 0, h - 1);
            const int mx = std::clamp(static_cast<int>(std::lround(sx)), 0, w - 1);
            if (!layer.mask[static_cast<std::size_t>(my) * w + mx]) continue;
            for (int c = 0; c < channels; ++c)
              view[(static_cast<std::size_t>(y) * w + x) * channels + c] = sample_bilinear(layer.texture, sy, sx, c);
            break;
          }
        }
      }
    }
  }

  Image truth(h, w, 1, 0.0f);
  for (const auto& layer : spec.layers)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (layer.mask[static_cast<std::size_t>(y) * w + x]) truth.at(y, x) = static_cast<float>(layer.disparity);

  return {LightField(shape, std::move(samples)), std::move(truth)};
}

}  // namespace lfr
