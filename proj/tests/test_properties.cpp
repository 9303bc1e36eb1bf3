#include <doctest.h>

#include <random>
#include <set>

#include "lfr/alpha_mask.hpp"
#include "lfr/alpha_plan.hpp"
#include "lfr/metrics.hpp"
#include "lfr/refocus.hpp"
#include "oracles.hpp"

using namespace lfr;

namespace {

constexpr int kTrials = 25;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int odd(int lo, int hi) { return 2 * integer(lo, hi) + 1; }

  LightField light_field(int max_side = 20) {
    LightFieldShape shape{odd(0, 3), odd(0, 3), integer(4, max_side), integer(4, max_side), integer(0, 1) ? 3 : 1};
    std::vector<float> s(shape.view_size() * shape.view_count());
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (auto& v : s) v = d(rng);
    return LightField(shape, std::move(s));
  }

  // Piecewise-constant mask built from random rectangles on a decimal alpha grid.
  AlphaMask mask(int h, int w) {
    AlphaMask m(h, w, static_cast<float>(snap_to_grid(real(0.0, 4.0), 0.05)));
    const int rects = integer(0, 6);
    for (int i = 0; i < rects; ++i) {
      const int x0 = integer(0, w - 1), y0 = integer(0, h - 1);
      const int x1 = integer(x0, w - 1), y1 = integer(y0, h - 1);
      const auto a = static_cast<float>(snap_to_grid(real(-1.0, 5.0), 0.05));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.at(y, x) = a;
    }
    return m;
  }
};

LightField translate_views(const LightField& lf, int dy, int dx) {
  std::vector<float> s(lf.shape().view_size() * lf.shape().view_count());
  const int h = lf.height(), w = lf.width(), c = lf.channels();
  for (int u = 0; u < lf.grid_u(); ++u)
    for (int v = 0; v < lf.grid_v(); ++v) {
      const auto src = lf.view(u, v);
      float* dst = s.data() + (static_cast<std::size_t>(u) * lf.grid_v() + v) * lf.shape().view_size();
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const int sy = std::clamp(y - dy, 0, h - 1), sx = std::clamp(x - dx, 0, w - 1);
          for (int k = 0; k < c; ++k) dst[(y * w + x) * c + k] = src[(sy * w + sx) * c + k];
        }
    }
  return LightField(lf.shape(), std::move(s));
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("refocus agrees with the brute force oracle") {
    Gen g(1);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field();
      const double alpha = g.real(-2.0, 4.0);
      CHECK(refocus(lf, alpha) == oracle::brute_refocus(lf, alpha));
      const auto cross = extract_cross(lf);
      CHECK(refocus(cross, alpha) == oracle::brute_refocus(cross, alpha));
    }
  }

  TEST_CASE("refocus output stays in range and scales linearly") {
    Gen g(2);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field();
      const double alpha = g.real(-2.0, 4.0);
      const auto a = static_cast<float>(g.real(0.0, 1.0));
      const auto out = refocus(lf, alpha);
      const auto scaled = refocus(lf.scaled(a), alpha);
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.pixels()[i] >= 0.0f);
        CHECK(out.pixels()[i] <= 1.0f);
        CHECK(std::abs(scaled.pixels()[i] - a * out.pixels()[i]) <= 1e-6f);
      }
    }
  }

  TEST_CASE("refocus is shift equivariant on the interior") {
    Gen g(3);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field(24);
      const double alpha = g.real(0.0, 2.0);
      const int dy = g.integer(-2, 2), dx = g.integer(-2, 2);
      const auto a = refocus(lf, alpha);
      const auto b = refocus(translate_views(lf, dy, dx), alpha);
      const int reach = static_cast<int>(std::ceil(std::abs(alpha - 1.0) * 3)) + 2;
      for (int y = reach + 2; y < lf.height() - reach - 2; ++y)
        for (int x = reach + 2; x < lf.width() - reach - 2; ++x)
          for (int c = 0; c < lf.channels(); ++c) CHECK(b.at(y + dy, x + dx, c) == a.at(y, x, c));
    }
  }

  TEST_CASE("single level plans equal refocus") {
    Gen g(4);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field();
      const auto alpha = static_cast<float>(g.real(-1.0, 3.0));
      CHECK(refocus_with_plan(lf, plan_from_mask(AlphaMask(lf.height(), lf.width(), alpha))) == refocus(lf, alpha));
    }
  }

  TEST_CASE("plan composites each level's own refocus") {
    Gen g(5);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field();
      const auto mask = g.mask(lf.height(), lf.width());
      const auto plan = plan_from_mask(mask);
      CHECK_NOTHROW(plan.validate());
      const auto out = refocus_with_plan(lf, plan);
      for (const auto& level : plan.levels) {
        const auto full = refocus(lf, level.alpha);
        for (auto p : level.pixels)
          for (int c = 0; c < lf.channels(); ++c)
            CHECK(out.pixels()[p * lf.channels() + c] == full.pixels()[p * lf.channels() + c]);
      }
    }
  }

  TEST_CASE("smoothing preserves bounds, quantization bounds levels") {
    Gen g(6);
    for (int t = 0; t < kTrials; ++t) {
      const auto m = g.mask(g.integer(5, 40), g.integer(5, 40));
      const auto [lo, hi] = std::minmax_element(m.alpha.begin(), m.alpha.end());
      const auto s = smooth_mask(m);
      for (float v : s.alpha) {
        CHECK(v >= *lo);
        CHECK(v <= *hi);
      }
      const double step = 0.05;
      const auto q = quantize_mask(s, step);
      CHECK(quantize_mask(q, step) == q);
      const std::set<float> levels(q.alpha.begin(), q.alpha.end());
      CHECK(levels.size() <= static_cast<std::size_t>(std::lround((*hi - *lo) / step)) + 1);
      CHECK(plan_from_mask(q).level_count() == levels.size());
    }
  }

  TEST_CASE("metrics are symmetric and consistent") {
    Gen g(7);
    for (int t = 0; t < 10; ++t) {
      const int h = g.integer(11, 40), w = g.integer(11, 40), c = g.integer(0, 1) ? 3 : 1;
      const auto a = fixtures::random_image(h, w, c, 100 + t);
      const auto b = fixtures::random_image(h, w, c, 200 + t);
      CHECK(std::abs(mse(a, b) - mse(b, a)) <= 1e-12);
      CHECK(std::abs(l1(a, b) - l1(b, a)) <= 1e-12);
      CHECK(std::abs(psnr(a, b) - psnr(b, a)) <= 1e-12);
      CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-12);
      const int scales = auto_ms_ssim_scales(std::min(h, w));
      CHECK(std::abs(ms_ssim(a, b, scales) - ms_ssim(b, a, scales)) <= 1e-12);
      CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(1.0 / mse(a, b))).epsilon(1e-12));
    }
  }

  TEST_CASE("amsk round trips arbitrary masks") {
    Gen g(8);
    for (int t = 0; t < kTrials; ++t) {
      auto m = g.mask(g.integer(1, 30), g.integer(1, 30));
      m.quant_step = static_cast<float>(g.real(0.0, 1.0));
      m.quantized = g.integer(0, 1) == 1;
      CHECK(decode_amsk(encode_amsk(m)) == m);
    }
  }

  TEST_CASE("cross extraction is idempotent for any grid") {
    Gen g(9);
    for (int t = 0; t < kTrials; ++t) {
      const auto lf = g.light_field(6);
      const auto cross = extract_cross(lf);
      CHECK(cross.available_count() == lf.grid_u() + lf.grid_v() - 1);
      const auto again = extract_cross(cross);
      CHECK(again.available_views().size() == cross.available_views().size());
      CHECK(middle_sai(cross) == middle_sai(lf));
    }
  }
}
