#include "lfr/refocus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lfr/error.hpp"
#include "lfr/parallel.hpp"

namespace lfr {
namespace {

struct ViewShift {
  int u;
  int v;
  int sx;
  int sy;
};

std::vector<ViewShift> shifts_for(const LightField& lf, double alpha) {
  if (!std::isfinite(alpha)) throw RefocusError("alpha must be finite");
  const auto c = lf.center();
  std::vector<ViewShift> out;
  for (const auto& a : lf.available_views())
    out.push_back({a.u, a.v, view_shift(alpha, a.u - c.u), view_shift(alpha, a.v - c.v)});
  if (out.empty()) throw RefocusError("light field has no available SAI");
  return out;
}

// Accumulates rows [row_begin, row_end) of `region` (absolute image rows).
void accumulate_rows(const LightField& lf, const std::vector<ViewShift>& shifts, const PixelRect& region,
                     int row_begin, int row_end, std::vector<double>& sum, std::vector<int>& count) {
  const int w = lf.width();
  const int h = lf.height();
  const int ch = lf.channels();
  const int rw = region.width();
  for (const auto& s : shifts) {
    const auto view = lf.view(s.u, s.v);
    const int x_lo = std::max(region.x0, -s.sx);
    const int x_hi = std::min(region.x1, w - 1 - s.sx);
    if (x_lo > x_hi) continue;
    for (int y = row_begin; y < row_end; ++y) {
      const int yy = y + s.sy;
      if (yy < 0 || yy >= h) continue;
      const float* src = view.data() + (static_cast<std::size_t>(yy) * w + x_lo + s.sx) * ch;
      const std::size_t dst_pix = static_cast<std::size_t>(y - region.y0) * rw + (x_lo - region.x0);
      double* dst = sum.data() + dst_pix * ch;
      int* cnt = count.data() + dst_pix;
      const int n = x_hi - x_lo + 1;
      for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ch; ++c) dst[i * ch + c] += src[i * ch + c];
        ++cnt[i];
      }
    }
  }
}

void accumulate(const LightField& lf, double alpha, const PixelRect& region, std::vector<double>& sum,
                std::vector<int>& count) {
  if (!region.inside(lf.height(), lf.width())) throw RefocusError("refocus region outside the light field");
  const auto shifts = shifts_for(lf, alpha);
  const std::size_t pixels = static_cast<std::size_t>(region.width()) * region.height();
  sum.assign(pixels * lf.channels(), 0.0);
  count.assign(pixels, 0);
  parallel_for(
      static_cast<std::size_t>(region.height()),
      [&](std::size_t b, std::size_t e) {
        accumulate_rows(lf, shifts, region, region.y0 + static_cast<int>(b), region.y0 + static_cast<int>(e), sum,
                        count);
      },
      32);
}

}  // namespace

Image refocus_region(const LightField& lf, double alpha, const PixelRect& region) {
  std::vector<double> sum;
  std::vector<int> count;
  accumulate(lf, alpha, region, sum, count);

  const int ch = lf.channels();
  Image out(region.height(), region.width(), ch);
  auto px = out.pixels();
  for (std::size_t i = 0; i < count.size(); ++i)
    for (int c = 0; c < ch; ++c) px[i * ch + c] = static_cast<float>(sum[i * ch + c] / count[i]);
  return out;
}

Image refocus(const LightField& lf, double alpha) {
  return refocus_region(lf, alpha, PixelRect{0, 0, lf.width() - 1, lf.height() - 1});
}

std::vector<int> contributor_counts(const LightField& lf, double alpha) {
  std::vector<double> sum;
  std::vector<int> count;
  accumulate(lf, alpha, PixelRect{0, 0, lf.width() - 1, lf.height() - 1}, sum, count);
  return count;
}

void RefocusPlan::validate() const {
  if (height < 1 || width < 1) throw PlanError("plan has empty extent");
  const std::size_t n = static_cast<std::size_t>(height) * width;
  std::vector<std::uint8_t> seen(n, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && !(levels[i - 1].alpha < levels[i].alpha)) throw PlanError("levels must have ascending unique alpha");
    for (auto p : levels[i].pixels) {
      if (p < 0 || static_cast<std::size_t>(p) >= n) throw PlanError("pixel index outside the plan extent");
      if (seen[p]) throw PlanError("pixel assigned to more than one level");
      seen[p] = 1;
      ++total;
    }
  }
  if (total != n) throw PlanError("plan does not cover every pixel");
}

RefocusPlan plan_from_mask(const AlphaMask& mask) {
  if (mask.height < 1 || mask.width < 1 || mask.alpha.size() != static_cast<std::size_t>(mask.height) * mask.width)
    throw PlanError("malformed alpha mask");

  std::map<float, RefocusLevel> groups;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const float a = mask.at(y, x);
      if (!std::isfinite(a)) throw PlanError("alpha mask contains non-finite values");
      auto [it, inserted] = groups.try_emplace(a);
      auto& level = it->second;
      if (inserted) {
        level.alpha = a;
        level.bounds = PixelRect{x, y, x, y};
      }
      level.pixels.push_back(y * mask.width + x);
      level.bounds.x0 = std::min(level.bounds.x0, x);
      level.bounds.x1 = std::max(level.bounds.x1, x);
      level.bounds.y1 = y;
    }
  }

  RefocusPlan plan;
  plan.height = mask.height;
  plan.width = mask.width;
  plan.levels.reserve(groups.size());
  for (auto& [alpha, level] : groups) plan.levels.push_back(std::move(level));
  return plan;
}

Image refocus_with_plan(const LightField& lf, const RefocusPlan& plan) {
  if (plan.height != lf.height() || plan.width != lf.width())
    throw PlanError("plan extent does not match the light field");
  plan.validate();

  const int ch = lf.channels();
  Image out(lf.height(), lf.width(), ch);
  auto dst = out.pixels();
  parallel_for(plan.levels.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t li = begin; li < end; ++li) {
      const auto& level = plan.levels[li];
      const auto& b = level.bounds;
      const Image part = refocus_region(lf, level.alpha, b);
      for (auto p : level.pixels) {
        const int y = p / plan.width;
        const int x = p % plan.width;
        for (int c = 0; c < ch; ++c) dst[static_cast<std::size_t>(p) * ch + c] = part.at(y - b.y0, x - b.x0, c);
      }
    }
  });
  return out;
}

}  // namespace lfr
