#pragma once

#include "lfr/filters.hpp"
#include "lfr/image.hpp"
#include "lfr/lightfield.hpp"

namespace lfr {

/// Disparity (pixels per unit angular index) and confidence in [0, 1] of the middle SAI.
struct DisparityEstimate {
  Plane d;
  Plane conf;
};

struct DisparityConfig {
  double inner_sigma = 0.8;   ///< gradient pre-smoothing
  double outer_sigma = 1.6;   ///< structure tensor component smoothing
  double epsilon = 1e-9;      ///< coherence denominator guard
  double final_sigma = 1.5;   ///< confidence-weighted smoothing of d
  int final_radius = 2;       ///< 5x5 window
};

/// Structure-tensor analysis of the horizontal (v = v0) and vertical (u = u0) EPIs through
/// the middle SAI. Each EPI yields a slope and a coherence; per pixel the more coherent
/// orientation wins, then d is smoothed with confidence weights. Requires a dense light
/// field with N_u, N_v >= 3 (DisparityError otherwise). Color input is reduced to luma.
DisparityEstimate estimate_disparity(const LightField& lf, const DisparityConfig& cfg = {});

/// alpha(y, x) = 1 + d(y, x), as a single-channel image.
Image alpha_from_disparity(const DisparityEstimate& est);

}  // namespace lfr
