#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lfr/alpha_mask.hpp"
#include "lfr/image.hpp"
#include "lfr/lightfield.hpp"

namespace lfr {

/// Nearest-pixel shift applied to a view at angular offset `offset` from the centre.
inline int view_shift(double alpha, int offset) noexcept {
  return static_cast<int>(std::lround((alpha - 1.0) * offset));
}

/// Shift-and-sum refocus:
///   out(y, x) = mean over available (u, v) of L(u, v, y + s_v, x + s_u),
///   s_u = round((alpha - 1)(u - u0)), s_v = round((alpha - 1)(v - v0)),
/// where reads falling outside the image are skipped and the mean counts only the
/// in-bounds contributors of each pixel.
Image refocus(const LightField& lf, double alpha);

/// Same kernel evaluated only over `region`; the result is region sized and equal to
/// refocus(lf, alpha).crop(region).
Image refocus_region(const LightField& lf, double alpha, const PixelRect& region);

/// Per-pixel number of views contributing to refocus(lf, alpha), row-major H x W.
std::vector<int> contributor_counts(const LightField& lf, double alpha);

struct RefocusLevel {
  double alpha = 1.0;
  std::vector<std::int32_t> pixels;  ///< row-major linear indices, ascending
  PixelRect bounds;
};

/// Partition of the image domain into refocus levels, sorted by ascending alpha.
struct RefocusPlan {
  int height = 0;
  int width = 0;
  std::vector<RefocusLevel> levels;

  std::size_t level_count() const noexcept { return levels.size(); }
  /// Throws PlanError unless pixel sets are disjoint, cover H x W, and alphas are
  /// strictly ascending.
  void validate() const;
};

/// Groups pixels by identical alpha value.
RefocusPlan plan_from_mask(const AlphaMask& mask);

/// Composites refocus(lf, level.alpha) over each level's pixel set. Levels are evaluated
/// over their bounding boxes only and may run concurrently.
Image refocus_with_plan(const LightField& lf, const RefocusPlan& plan);

}  // namespace lfr
