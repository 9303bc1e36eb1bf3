#include "lfr/disparity.hpp"

#include <algorithm>
#include <cmath>

#include "lfr/error.hpp"
#include "lfr/parallel.hpp"

namespace lfr {
namespace {

// Scharr derivative pair: central difference along the derivative axis and
// [3 10 3]/16 smoothing across it.
constexpr double kCross[3] = {3.0 / 16.0, 10.0 / 16.0, 3.0 / 16.0};

struct Orientation {
  double slope;
  double coherence;
};

// Gaussian smoothing of an EPI: replicate padding along the spatial columns, and along
// the short angular axis the kernel is truncated to the existing views and renormalized.
Plane blur_epi(const Plane& in, const std::vector<double>& k) {
  const Plane across = blur_replicate(in, k, std::vector<double>{1.0});
  const int radius = static_cast<int>(k.size() / 2);
  Plane out(in.height, in.width);
  for (int r = 0; r < in.height; ++r) {
    double norm = 0.0;
    for (int t = -radius; t <= radius; ++t)
      if (r + t >= 0 && r + t < in.height) norm += k[t + radius];
    for (int t = -radius; t <= radius; ++t) {
      const int rr = r + t;
      if (rr < 0 || rr >= in.height) continue;
      const double wgt = k[t + radius] / norm;
      for (int c = 0; c < in.width; ++c) out(r, c) += wgt * across(rr, c);
    }
  }
  return out;
}

class EpiAnalyzer {
 public:
  explicit EpiAnalyzer(const DisparityConfig& cfg)
      : inner_(gaussian_kernel(std::max(1, static_cast<int>(std::ceil(3.0 * cfg.inner_sigma))), cfg.inner_sigma)),
        outer_(gaussian_kernel(std::max(1, static_cast<int>(std::ceil(3.0 * cfg.outer_sigma))), cfg.outer_sigma)),
        epsilon_(cfg.epsilon) {}

  /// `epi` rows are the angular axis, columns the spatial one. Writes the orientation of
  /// the EPI lines through row `centre_row` for every spatial column.
  void analyze(const Plane& epi, int centre_row, std::vector<Orientation>& out) const {
    // Pre-smoothing along the spatial axis only: any angular smoothing is asymmetric at the
    // first and last view and would pull their content toward the centre.
    const Plane s = blur_replicate(epi, inner_, std::vector<double>{1.0});
    const int rows = s.height;
    const int cols = s.width;
    Plane jss(rows, cols), jsa(rows, cols), jaa(rows, cols);
    for (int r = 0; r < rows; ++r) {
      // One-sided angular difference at the first and last view; padding there would
      // add rows with a vertical orientation and bias the slope toward zero.
      const int rm = std::max(r - 1, 0);
      const int rp = std::min(r + 1, rows - 1);
      const double span = rp - rm;
      double cross[3] = {r > 0 ? kCross[0] : 0.0, kCross[1], r + 1 < rows ? kCross[2] : 0.0};
      const double norm = cross[0] + cross[1] + cross[2];
      for (auto& k : cross) k /= norm;
      for (int c = 0; c < cols; ++c) {
        const int cm = std::max(c - 1, 0);
        const int cp = std::min(c + 1, cols - 1);
        // derivative along the spatial axis, smoothed across angular rows
        const double gs = 0.5 * (cross[0] * (s(rm, cp) - s(rm, cm)) + cross[1] * (s(r, cp) - s(r, cm)) +
                                 cross[2] * (s(rp, cp) - s(rp, cm)));
        // derivative along the angular axis, smoothed across spatial columns
        const double ga = (kCross[0] * (s(rp, cm) - s(rm, cm)) + kCross[1] * (s(rp, c) - s(rm, c)) +
                           kCross[2] * (s(rp, cp) - s(rm, cp))) /
                          span;
        jss(r, c) = gs * gs;
        jsa(r, c) = gs * ga;
        jaa(r, c) = ga * ga;
      }
    }
    const Plane tss = blur_epi(jss, outer_);
    const Plane tsa = blur_epi(jsa, outer_);
    const Plane taa = blur_epi(jaa, outer_);

    out.resize(cols);
    for (int c = 0; c < cols; ++c) {
      const double a = tss(centre_row, c);
      const double b = taa(centre_row, c);
      const double x = tsa(centre_row, c);
      // Lines x = p + d * u have gradient direction (1, -d) in (spatial, angular) coordinates.
      const double slope = -std::tan(0.5 * std::atan2(2.0 * x, a - b));
      const double denom = a + b + epsilon_;
      double coherence = ((a - b) * (a - b) + 4.0 * x * x) / (denom * denom);
      coherence = std::clamp(coherence, 0.0, 1.0);
      out[c] = {std::isfinite(slope) ? slope : 0.0, coherence};
    }
  }

 private:
  std::vector<double> inner_;
  std::vector<double> outer_;
  double epsilon_;
};

std::vector<Plane> luma_views(const LightField& lf) {
  std::vector<Plane> out(lf.shape().view_count());
  for (int u = 0; u < lf.grid_u(); ++u)
    for (int v = 0; v < lf.grid_v(); ++v) out[static_cast<std::size_t>(u) * lf.grid_v() + v] = to_plane(lf.view_image(u, v).luma());
  return out;
}

}  // namespace

DisparityEstimate estimate_disparity(const LightField& lf, const DisparityConfig& cfg) {
  if (!lf.is_dense()) throw DisparityError("disparity estimation needs a dense light field");
  if (lf.grid_u() < 3 || lf.grid_v() < 3) throw DisparityError("disparity estimation needs at least 3x3 views");

  const int h = lf.height();
  const int w = lf.width();
  const int nu = lf.grid_u();
  const int nv = lf.grid_v();
  const auto c = lf.center();
  const auto views = luma_views(lf);
  auto view_at = [&](int u, int v) -> const Plane& { return views[static_cast<std::size_t>(u) * nv + v]; };

  const EpiAnalyzer analyzer(cfg);
  Plane d_h(h, w), c_h(h, w), d_v(h, w), c_v(h, w);

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t b, std::size_t e) {
    Plane epi(nu, w);
    std::vector<Orientation> o;
    for (int y = static_cast<int>(b); y < static_cast<int>(e); ++y) {
      for (int u = 0; u < nu; ++u)
        for (int x = 0; x < w; ++x) epi(u, x) = view_at(u, c.v)(y, x);
      analyzer.analyze(epi, c.u, o);
      for (int x = 0; x < w; ++x) {
        d_h(y, x) = o[x].slope;
        c_h(y, x) = o[x].coherence;
      }
    }
  });
  parallel_for(static_cast<std::size_t>(w), [&](std::size_t b, std::size_t e) {
    Plane epi(nv, h);
    std::vector<Orientation> o;
    for (int x = static_cast<int>(b); x < static_cast<int>(e); ++x) {
      for (int v = 0; v < nv; ++v)
        for (int y = 0; y < h; ++y) epi(v, y) = view_at(c.u, v)(y, x);
      analyzer.analyze(epi, c.v, o);
      for (int y = 0; y < h; ++y) {
        d_v(y, x) = o[y].slope;
        c_v(y, x) = o[y].coherence;
      }
    }
  });

  DisparityEstimate est{Plane(h, w), Plane(h, w)};
  Plane raw(h, w);
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    const bool horizontal = c_h.values[i] >= c_v.values[i];
    raw.values[i] = horizontal ? d_h.values[i] : d_v.values[i];
    est.conf.values[i] = horizontal ? c_h.values[i] : c_v.values[i];
  }

  const auto g = gaussian_kernel(cfg.final_radius, cfg.final_sigma);
  const int r = cfg.final_radius;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double num = 0.0;
      double den = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w) continue;
          const double wgt = g[dy + r] * g[dx + r] * est.conf(yy, xx);
          num += wgt * raw(yy, xx);
          den += wgt;
        }
      }
      est.d(y, x) = den > 0.0 ? num / den : raw(y, x);
    }
  }
  return est;
}

Image alpha_from_disparity(const DisparityEstimate& est) {
  Image out(est.d.height, est.d.width, 1);
  for (int y = 0; y < est.d.height; ++y)
    for (int x = 0; x < est.d.width; ++x) out.at(y, x) = static_cast<float>(1.0 + est.d(y, x));
  return out;
}

}  // namespace lfr
