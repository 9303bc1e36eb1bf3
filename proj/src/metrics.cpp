#include "lfr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lfr/error.hpp"
#include "lfr/filters.hpp"

namespace lfr {
namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * kDataRange) * (0.01 * kDataRange);
constexpr double kC2 = (0.03 * kDataRange) * (0.03 * kDataRange);

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.empty())
    throw MetricError(MetricError::Kind::dim_mismatch, "images differ in shape or are empty");
}

const std::vector<double>& window() {
  static const std::vector<double> k = gaussian_kernel(kWindow / 2, kWindowSigma);
  return k;
}

struct SsimMeans {
  double ssim;
  double cs;
};

SsimMeans ssim_means(const Plane& a, const Plane& b) {
  const auto& k = window();
  Plane aa(a.height, a.width), bb(a.height, a.width), ab(a.height, a.width);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    aa.values[i] = a.values[i] * a.values[i];
    bb.values[i] = b.values[i] * b.values[i];
    ab.values[i] = a.values[i] * b.values[i];
  }
  const Plane mu_a = filter_valid(a, k, k);
  const Plane mu_b = filter_valid(b, k, k);
  const Plane e_aa = filter_valid(aa, k, k);
  const Plane e_bb = filter_valid(bb, k, k);
  const Plane e_ab = filter_valid(ab, k, k);

  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  const std::size_t n = mu_a.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double var_a = e_aa.values[i] - ma * ma;
    const double var_b = e_bb.values[i] - mb * mb;
    const double cov = e_ab.values[i] - ma * mb;
    const double cs = (2.0 * cov + kC2) / (var_a + var_b + kC2);
    const double lum = (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
    ssim_sum += lum * cs;
    cs_sum += cs;
  }
  return {ssim_sum / static_cast<double>(n), cs_sum / static_cast<double>(n)};
}

Plane downsample(const Plane& p) {
  Plane out(p.height / 2, p.width / 2);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out(y, x) = 0.25 * (p(2 * y, 2 * x) + p(2 * y, 2 * x + 1) + p(2 * y + 1, 2 * x) + p(2 * y + 1, 2 * x + 1));
  return out;
}

}  // namespace

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - pb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pa.size());
}

double l1(const Image& a, const Image& b) {
  require_same_shape(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) acc += std::abs(static_cast<double>(pa[i]) - pb[i]);
  return acc / static_cast<double>(pa.size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m < 1e-10) return kPsnrCapDb;
  return 10.0 * std::log10(kDataRange * kDataRange / m);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (a.height() < kWindow || a.width() < kWindow)
    throw MetricError(MetricError::Kind::too_small, "SSIM needs images of at least 11x11 pixels");
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) total += ssim_means(to_plane(a, c), to_plane(b, c)).ssim;
  return total / a.channels();
}

int auto_ms_ssim_scales(int min_side) {
  if (min_side < 16) return 1;
  const int s = static_cast<int>(std::floor(std::log2(min_side / 8.0)));
  return std::clamp(s, 1, 5);
}

double ms_ssim(const Image& a, const Image& b, int scales) {
  require_same_shape(a, b);
  if (scales < 1 || scales > 5) throw MetricError(MetricError::Kind::bad_scales, "scale count must be in [1, 5]");
  const int needed = kWindow << (scales - 1);
  if (a.height() < needed || a.width() < needed)
    throw MetricError(MetricError::Kind::too_small,
                      std::to_string(scales) + "-scale MS-SSIM needs at least " + std::to_string(needed) + " px");

  const double weight_sum = std::accumulate(kMsSsimWeights.begin(), kMsSsimWeights.begin() + scales, 0.0);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    Plane pa = to_plane(a, c);
    Plane pb = to_plane(b, c);
    double value = 1.0;
    for (int s = 0; s < scales; ++s) {
      const auto m = ssim_means(pa, pb);
      const double w = kMsSsimWeights[s] / weight_sum;
      const double term = s == scales - 1 ? m.ssim : m.cs;
      value *= std::pow(std::max(term, 0.0), w);
      if (s + 1 < scales) {
        pa = downsample(pa);
        pb = downsample(pb);
      }
    }
    total += value;
  }
  return total / a.channels();
}

}  // namespace lfr
