#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfr/alpha_mask.hpp"
#include "lfr/disparity.hpp"
#include "lfr/image.hpp"
#include "lfr/lightfield.hpp"

namespace lfr {

/// Visible depth range of a region: a single alpha (narrow) or one alpha per patch (wide).
enum class DepthRange { narrow, wide };

struct RoiSpec {
  PixelRect rect;
  DepthRange phi = DepthRange::narrow;
  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

struct AlphaSearchResult {
  double alpha_best = 1.0;
  double range_min = 1.0;
  double range_max = 1.0;
  double sim_best = 0.0;
};

/// Background alpha sits this far below the smallest region alpha when not given explicitly.
inline constexpr double kDefaultAlphaOffset = 0.4;
/// Reference alpha used for that rule when no region produced an alpha.
inline constexpr double kReferenceAlpha = 1.0;

struct MaskOptions {
  std::optional<double> alpha_default;  ///< empty: min region alpha - kDefaultAlphaOffset
  int patch = 20;                       ///< wide-ROI patch side
  bool smooth = true;
  double quant_step = 0.05;

  // dense route
  double confidence_threshold = 0.3;
  double mode_bin = 0.1;

  // sparse route
  double delta_alpha = 0.1;
  double range_step = 1.0;
  int max_range_iters = 25;
};

/// Alpha assigned to one filled region (a narrow ROI or one patch of a wide ROI).
struct RegionAlpha {
  std::size_t roi_index = 0;
  PixelRect rect;
  std::optional<double> alpha;  ///< empty when the region fell back to the default
};

struct MaskBuild {
  AlphaMask mask;        ///< smoothed (if enabled) and quantized
  AlphaMask unsmoothed;  ///< region fills over the default, before smoothing/quantization
  double alpha_default = kReferenceAlpha;
  std::vector<RegionAlpha> regions;
  std::vector<std::string> warnings;

  std::size_t failed_regions() const noexcept;
};

/// Throws RoiError unless every rectangle lies inside a height x width image.
void validate_rois(const std::vector<RoiSpec>& rois, int height, int width);

/// Patches tiling `rect` from its top-left corner; the last row/column may be ragged.
std::vector<PixelRect> tile_patches(const PixelRect& rect, int patch);

/// Dense route: each region takes the mode of 1 + d over its confident pixels, binned to
/// `mode_bin`. Regions without confident pixels fall back (wide patches to their ROI's
/// mode, otherwise to the default) and add a warning.
MaskBuild mask_dense(const DisparityEstimate& est, const std::vector<RoiSpec>& rois, const MaskOptions& opts = {});

/// Sparse route: each region's alpha comes from get_alpha_range + get_alpha against the
/// middle SAI. Failed searches fall back to the default with a warning.
MaskBuild mask_sparse(const LightField& lf, const std::vector<RoiSpec>& rois, const MaskOptions& opts = {});

/// MS-SSIM between refocus(lf_slice, alpha) and sai_slice, with the scale count reduced to
/// what the slice size supports.
double focus_similarity(const LightField& lf_slice, const Image& sai_slice, double alpha);

/// Walks the triple (1 - step, 1, 1 + step) by +/- step while similarity is strictly
/// monotone across it and returns its ends once it is not. SearchError(no_bracket) after
/// `max_iters` moves.
std::pair<double, double> get_alpha_range(const LightField& lf_slice, const Image& sai_slice, double step = 1.0,
                                          int max_iters = 25);

/// Exhaustive search of alpha_min, alpha_min + delta, ... <= alpha_max; ties go to the
/// largest alpha. SearchError(empty_range) when the grid is empty.
AlphaSearchResult get_alpha(const LightField& lf_slice, const Image& sai_slice, double alpha_min, double alpha_max,
                            double delta = 0.1);

/// Normalized 15x15 Gaussian (sigma 5) with replicate edges. Output stays within the input's
/// [min, max]; constant masks come back unchanged.
AlphaMask smooth_mask(const AlphaMask& mask);

/// Snaps every value to anchor + k * step (nearest k).
AlphaMask quantize_mask(const AlphaMask& mask, double step = 0.05, double anchor = 0.0);

/// Nearest grid value anchor + k * step, computed so decimal steps give the closest double.
double snap_to_grid(double value, double step, double anchor = 0.0);

/// ROI list file: JSON array of {"rect": [x0, y0, x1, y1], "phi": "narrow" | "wide"}.
std::vector<RoiSpec> parse_rois(const std::string& json_text);
std::vector<RoiSpec> load_rois(const std::filesystem::path& path);
std::string rois_to_json(const std::vector<RoiSpec>& rois);

}  // namespace lfr
