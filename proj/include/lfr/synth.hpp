#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfr/image.hpp"
#include "lfr/lightfield.hpp"

namespace lfr {

/// One fronto-parallel layer of a synthetic scene. `mask` is a (H, W) region of the
/// canvas as seen from the middle view; the texture must be canvas sized.
struct SyntheticLayer {
  Image texture;
  double disparity = 0.0;
  std::vector<std::uint8_t> mask;
};

struct SyntheticSceneSpec {
  int height = 0;
  int width = 0;
  std::vector<SyntheticLayer> layers;
};

struct SyntheticLightField {
  LightField lf;
  Image disparity;  ///< ground truth for the middle SAI, single channel
};

std::vector<std::uint8_t> rect_mask(int height, int width, const PixelRect& rect);
std::vector<std::uint8_t> full_mask(int height, int width);

/// Uniform noise blurred with a Gaussian of `blur_sigma` (0 = none) and stretched to [0, 1].
Image noise_texture(int height, int width, int channels, std::uint64_t seed, double blur_sigma);

/// Renders view (u, v) by sampling each layer at (y - d*(v - v0), x - d*(u - u0)) with
/// replicate-clamped coordinates, so refocusing at alpha = 1 + d aligns that layer.
/// Where layers overlap after translation the larger disparity (nearer layer) wins.
/// Non-integer disparities are sampled bilinearly.
SyntheticLightField synthesize_lf(const SyntheticSceneSpec& spec, int grid_u, int grid_v);

/// Scene description read by `lf synth`:
///   {"grid": [9, 9], "height": 128, "width": 128, "channels": 3, "bit_depth": 8,
///    "layers": [{"disparity": 2, "rect": [x0, y0, x1, y1], "seed": 1, "blur": 1.0}]}
/// A layer without "rect" covers the part of the canvas no rect layer claims.
struct SceneFile {
  SyntheticSceneSpec spec;
  int grid_u = 9;
  int grid_v = 9;
  int bit_depth = 8;
};

SceneFile parse_scene_file(const std::string& json_text);
SceneFile load_scene_file(const std::filesystem::path& path);

}  // namespace lfr
