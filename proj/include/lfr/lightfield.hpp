#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lfr/image.hpp"

namespace lfr {

/// Angular position on the SAI grid. `u` is the horizontal angular axis (shifts x),
/// `v` the vertical one (shifts y).
struct AngularIndex {
  int u = 0;
  int v = 0;
  friend bool operator==(const AngularIndex&, const AngularIndex&) = default;
};

struct LightFieldShape {
  int grid_u = 1;
  int grid_v = 1;
  int height = 1;
  int width = 1;
  int channels = 1;

  std::size_t view_size() const noexcept { return static_cast<std::size_t>(height) * width * channels; }
  std::size_t view_count() const noexcept { return static_cast<std::size_t>(grid_u) * grid_v; }
  friend bool operator==(const LightFieldShape&, const LightFieldShape&) = default;
};

/// Immutable 4-D light field: samples indexed (u, v, y, x, c) in [0, 1], plus a per-view
/// availability mask. Copies share the sample buffer.
class LightField {
 public:
  /// Dense light field. `samples` is laid out view-major: view (u, v) occupies
  /// [(u * grid_v + v) * view_size, ...) as an interleaved (H, W, C) image.
  LightField(LightFieldShape shape, std::vector<float> samples);

  const LightFieldShape& shape() const noexcept { return shape_; }
  int grid_u() const noexcept { return shape_.grid_u; }
  int grid_v() const noexcept { return shape_.grid_v; }
  int height() const noexcept { return shape_.height; }
  int width() const noexcept { return shape_.width; }
  int channels() const noexcept { return shape_.channels; }
  AngularIndex center() const noexcept { return {shape_.grid_u / 2, shape_.grid_v / 2}; }

  bool available(int u, int v) const noexcept { return available_[static_cast<std::size_t>(u) * shape_.grid_v + v] != 0; }
  int available_count() const noexcept;
  std::vector<AngularIndex> available_views() const;
  bool is_dense() const noexcept { return available_count() == static_cast<int>(shape_.view_count()); }
  bool is_cross() const noexcept;

  /// Interleaved (H, W, C) samples of view (u, v), regardless of availability.
  std::span<const float> view(int u, int v) const noexcept {
    return std::span<const float>(*samples_).subspan(
        (static_cast<std::size_t>(u) * shape_.grid_v + v) * shape_.view_size(), shape_.view_size());
  }
  Image view_image(int u, int v) const;

  /// Copy restricted to the spatial rectangle, keeping the availability mask.
  LightField crop(const PixelRect& rect) const;
  /// Same samples, different availability. The centre view must stay available.
  LightField with_availability(std::vector<std::uint8_t> available) const;
  /// Copy with every sample multiplied by `factor` (clamped to [0, 1]).
  LightField scaled(float factor) const;

 private:
  LightField(LightFieldShape shape, std::shared_ptr<const std::vector<float>> samples,
             std::vector<std::uint8_t> available);

  LightFieldShape shape_;
  std::shared_ptr<const std::vector<float>> samples_;
  std::vector<std::uint8_t> available_;
};

/// Manifest-driven ingestion (see README for the manifest schema). Returns a dense
/// light field normalized by the PNG bit-depth maximum.
LightField load_lightfield(const std::filesystem::path& manifest_path);

/// Writes every view as PNG plus `manifest.json` into `dir`. Returns the manifest path.
std::filesystem::path save_lightfield(const LightField& lf, const std::filesystem::path& dir, int bit_depth = 8,
                                      const std::string& pattern = "view_{u:02}_{v:02}.png");

/// Sparse light field made of the central row and column of views (N_u + N_v - 1 SAIs).
LightField extract_cross(const LightField& lf);

/// The centre sub-aperture image.
Image middle_sai(const LightField& lf);

/// Expands a filename pattern containing `{u}`/`{v}` placeholders with optional
/// format specs such as `{u:02}`.
std::string format_view_name(const std::string& pattern, int u, int v);

}  // namespace lfr
