#include <doctest.h>

#include <algorithm>

#include "lfr/disparity.hpp"
#include "lfr/error.hpp"
#include "lfr/metrics.hpp"
#include "lfr/refocus.hpp"
#include "oracles.hpp"

using namespace lfr;

namespace {

double median_abs_error(const DisparityEstimate& est, const Image& truth, double min_conf, const PixelRect& rect) {
  std::vector<double> err;
  for (int y = rect.y0; y <= rect.y1; ++y)
    for (int x = rect.x0; x <= rect.x1; ++x)
      if (est.conf(y, x) > min_conf) err.push_back(std::abs(est.d(y, x) - truth.at(y, x)));
  REQUIRE(!err.empty());
  std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
  return err[err.size() / 2];
}

double confident_median(const DisparityEstimate& est, double min_conf) {
  std::vector<double> d;
  for (std::size_t i = 0; i < est.d.values.size(); ++i)
    if (est.conf.values[i] > min_conf) d.push_back(est.d.values[i]);
  REQUIRE(!d.empty());
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

}  // namespace

TEST_SUITE("disparity") {
  TEST_CASE("recovers d = 1 on a noise texture") {
    const auto s = fixtures::single_layer(1.0, 9, 64, 64, 3, 1.5, 3);
    const auto est = estimate_disparity(s.lf);
    CHECK(est.d.height == 64);
    CHECK(est.d.width == 64);
    CHECK(median_abs_error(est, s.disparity, 0.5, fixtures::interior(64, 64, 8)) <= 0.2);
  }

  TEST_CASE("zero disparity stays near zero") {
    const auto s = fixtures::single_layer(0.0, 5, 48, 48, 4, 1.5);
    const auto est = estimate_disparity(s.lf);
    CHECK(median_abs_error(est, s.disparity, 0.5, fixtures::interior(48, 48, 4)) <= 0.2);
  }

  TEST_CASE("constant light field has no confidence") {
    LightFieldShape shape{5, 5, 24, 24, 1};
    const LightField flat(shape, std::vector<float>(shape.view_size() * shape.view_count(), 0.3f));
    const auto est = estimate_disparity(flat);
    for (double c : est.conf.values) CHECK(c == doctest::Approx(0.0).epsilon(1e-6));
  }

  TEST_CASE("confidence and disparity ranges") {
    const auto s = fixtures::two_layer(0.0, 2.0, {12, 12, 35, 35}, 5, 48, 48);
    const auto est = estimate_disparity(s.lf);
    for (std::size_t i = 0; i < est.d.values.size(); ++i) {
      CHECK(std::isfinite(est.d.values[i]));
      CHECK(est.conf.values[i] >= 0.0);
      CHECK(est.conf.values[i] <= 1.0);
    }
  }

  TEST_CASE("textured regions are more confident than flat ones") {
    const int h = 48, w = 48;
    SyntheticSceneSpec spec{h, w, {}};
    const PixelRect textured{0, 0, 23, h - 1};
    auto tex_mask = rect_mask(h, w, textured);
    auto flat_mask = tex_mask;
    for (auto& m : flat_mask) m = m ? 0 : 1;
    spec.layers.push_back({noise_texture(h, w, 1, 5, 1.5), 1.0, tex_mask});
    spec.layers.push_back({Image(h, w, 1, 0.5f), 0.0, flat_mask});
    const auto est = estimate_disparity(synthesize_lf(spec, 5, 5).lf);
    double tex_conf = 0.0, flat_conf = 0.0;
    int nt = 0, nf = 0;
    for (int y = 4; y < h - 4; ++y) {
      for (int x = 2; x < 18; ++x, ++nt) tex_conf += est.conf(y, x);
      for (int x = 32; x < w - 2; ++x, ++nf) flat_conf += est.conf(y, x);
    }
    CHECK(flat_conf / nf < tex_conf / nt);
  }

  TEST_CASE("adding integer disparity shifts the estimate") {
    const auto base = estimate_disparity(fixtures::single_layer(0.0, 5, 56, 56, 8, 1.5).lf);
    const auto plus = estimate_disparity(fixtures::single_layer(2.0, 5, 56, 56, 8, 1.5).lf);
    CHECK(std::abs(confident_median(plus, 0.5) - confident_median(base, 0.5) - 2.0) <= 0.2);
  }

  TEST_CASE("sparse or tiny grids are rejected") {
    const auto s = fixtures::single_layer(0.0, 5, 16, 16);
    CHECK_THROWS_AS(estimate_disparity(extract_cross(s.lf)), DisparityError);
    const auto one = fixtures::single_layer(0.0, 1, 16, 16);
    CHECK_THROWS_AS(estimate_disparity(one.lf), DisparityError);
  }

  TEST_CASE("alpha from disparity is 1 + d") {
    DisparityEstimate est{Plane(2, 2), Plane(2, 2)};
    est.d.values = {0.0, 2.0, 2.0, 0.0};
    const auto a = alpha_from_disparity(est);
    CHECK(a.channels() == 1);
    CHECK(a.at(0, 0) == 1.0f);
    CHECK(a.at(0, 1) == 3.0f);
    CHECK(a.at(1, 0) == 3.0f);
  }

  TEST_CASE("estimated alpha sharpens the layer it came from") {
    const int n = 56;
    const auto s = fixtures::single_layer(2.0, 5, n, n, 19, 1.5);
    const auto est = estimate_disparity(s.lf);
    const auto alpha = alpha_from_disparity(est);
    // median alpha over confident pixels, then the refocus oracle
    std::vector<float> conf_alpha;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (est.conf(y, x) > 0.5) conf_alpha.push_back(alpha.at(y, x));
    std::nth_element(conf_alpha.begin(), conf_alpha.begin() + conf_alpha.size() / 2, conf_alpha.end());
    const double a = std::round(conf_alpha[conf_alpha.size() / 2]);
    CHECK(a == 3.0);
    const auto rect = fixtures::interior(n, n, 4);
    CHECK(psnr(refocus(s.lf, a).crop(rect), middle_sai(s.lf).crop(rect)) >= 40.0);
  }
}
