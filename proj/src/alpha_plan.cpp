#include "lfr/alpha_plan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lfr/error.hpp"
#include "lfr/filters.hpp"
#include "lfr/metrics.hpp"
#include "lfr/parallel.hpp"
#include "lfr/refocus.hpp"

namespace lfr {

using nlohmann::json;

namespace {

constexpr int kSmoothRadius = 7;  // 15x15
constexpr double kSmoothSigma = 5.0;
constexpr int kMinSearchSide = 11;  // single-scale SSIM window

struct RegionJob {
  std::size_t roi_index;
  PixelRect rect;
};

std::vector<RegionJob> region_jobs(const std::vector<RoiSpec>& rois, int patch) {
  std::vector<RegionJob> jobs;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    if (rois[i].phi == DepthRange::narrow) {
      jobs.push_back({i, rois[i].rect});
    } else {
      for (const auto& p : tile_patches(rois[i].rect, patch)) jobs.push_back({i, p});
    }
  }
  return jobs;
}

void check_options(const MaskOptions& opts) {
  if (opts.patch < 1) throw ValidationError("patch size must be >= 1");
  if (!(opts.quant_step > 0.0)) throw ValidationError("quantization step must be > 0");
  if (!(opts.delta_alpha > 0.0)) throw ValidationError("delta alpha must be > 0");
  if (!(opts.mode_bin > 0.0)) throw ValidationError("mode bin must be > 0");
  if (opts.alpha_default && !std::isfinite(*opts.alpha_default)) throw ValidationError("alpha default must be finite");
}

// Fills the default, writes region alphas in order, smooths and quantizes.
MaskBuild assemble(int height, int width, std::vector<RegionAlpha> regions, std::vector<std::string> warnings,
                   const MaskOptions& opts) {
  MaskBuild build;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : regions)
    if (r.alpha) lowest = std::min(lowest, *r.alpha);
  if (opts.alpha_default) {
    build.alpha_default = *opts.alpha_default;
  } else {
    const double reference = std::isfinite(lowest) ? lowest : kReferenceAlpha;
    build.alpha_default = snap_to_grid(reference - kDefaultAlphaOffset, opts.mode_bin);
  }

  AlphaMask mask(height, width, static_cast<float>(build.alpha_default));
  for (const auto& r : regions) {
    const float a = static_cast<float>(r.alpha.value_or(build.alpha_default));
    for (int y = r.rect.y0; y <= r.rect.y1; ++y)
      for (int x = r.rect.x0; x <= r.rect.x1; ++x) mask.at(y, x) = a;
  }
  build.unsmoothed = mask;
  if (opts.smooth) mask = smooth_mask(mask);
  build.mask = quantize_mask(mask, opts.quant_step, build.alpha_default);
  build.regions = std::move(regions);
  build.warnings = std::move(warnings);
  return build;
}

// Most frequent bin of 1 + d over confident pixels; ties go to the lower bin.
std::optional<long> mode_bin(const DisparityEstimate& est, const PixelRect& rect, const MaskOptions& opts) {
  std::map<long, int> histogram;
  for (int y = rect.y0; y <= rect.y1; ++y) {
    for (int x = rect.x0; x <= rect.x1; ++x) {
      if (!(est.conf(y, x) > opts.confidence_threshold)) continue;
      const double alpha = 1.0 + est.d(y, x);
      ++histogram[std::lround(alpha / opts.mode_bin)];
    }
  }
  if (histogram.empty()) return std::nullopt;
  auto best = histogram.begin();
  for (auto it = histogram.begin(); it != histogram.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

double bin_value(long bin, double step) { return snap_to_grid(static_cast<double>(bin) * step, step); }

// Search windows narrower than the SSIM window grow around the region, clipped to the image.
PixelRect search_window(const PixelRect& r, int height, int width) {
  PixelRect w = r;
  auto grow = [](int& lo, int& hi, int limit) {
    const int need = kMinSearchSide - (hi - lo + 1);
    if (need <= 0) return;
    lo -= need / 2;
    hi += need - need / 2;
    if (lo < 0) {
      hi -= lo;
      lo = 0;
    }
    if (hi > limit - 1) {
      lo -= hi - (limit - 1);
      hi = limit - 1;
    }
    lo = std::max(lo, 0);
  };
  grow(w.x0, w.x1, width);
  grow(w.y0, w.y1, height);
  return w;
}

}  // namespace

std::size_t MaskBuild::failed_regions() const noexcept {
  return static_cast<std::size_t>(std::count_if(regions.begin(), regions.end(), [](const auto& r) { return !r.alpha; }));
}

void validate_rois(const std::vector<RoiSpec>& rois, int height, int width) {
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto& r = rois[i].rect;
    if (!r.inside(height, width))
      throw RoiError(fmt::format("roi {} [{}, {}, {}, {}] is outside the {}x{} image", i, r.x0, r.y0, r.x1, r.y1,
                                 width, height));
  }
}

std::vector<PixelRect> tile_patches(const PixelRect& rect, int patch) {
  if (patch < 1) throw ValidationError("patch size must be >= 1");
  std::vector<PixelRect> out;
  for (int y = rect.y0; y <= rect.y1; y += patch)
    for (int x = rect.x0; x <= rect.x1; x += patch)
      out.push_back({x, y, std::min(x + patch - 1, rect.x1), std::min(y + patch - 1, rect.y1)});
  return out;
}

MaskBuild mask_dense(const DisparityEstimate& est, const std::vector<RoiSpec>& rois, const MaskOptions& opts) {
  check_options(opts);
  const int h = est.d.height;
  const int w = est.d.width;
  if (est.conf.height != h || est.conf.width != w) throw ValidationError("disparity and confidence maps differ in size");
  validate_rois(rois, h, w);

  std::vector<RegionAlpha> regions;
  std::vector<std::string> warnings;
  std::vector<std::optional<long>> roi_mode(rois.size());
  for (std::size_t i = 0; i < rois.size(); ++i) {
    roi_mode[i] = mode_bin(est, rois[i].rect, opts);
    if (!roi_mode[i]) warnings.push_back(fmt::format("roi {}: no confident pixels, using the default alpha", i));
  }
  for (const auto& job : region_jobs(rois, opts.patch)) {
    std::optional<long> bin = rois[job.roi_index].phi == DepthRange::narrow ? roi_mode[job.roi_index]
                                                                            : mode_bin(est, job.rect, opts);
    if (!bin && rois[job.roi_index].phi == DepthRange::wide && roi_mode[job.roi_index]) {
      warnings.push_back(fmt::format("roi {}: patch at ({}, {}) has no confident pixels, using the roi mode",
                                     job.roi_index, job.rect.x0, job.rect.y0));
      bin = roi_mode[job.roi_index];
    }
    RegionAlpha region{job.roi_index, job.rect, std::nullopt};
    if (bin) region.alpha = bin_value(*bin, opts.mode_bin);
    regions.push_back(region);
  }
  return assemble(h, w, std::move(regions), std::move(warnings), opts);
}

double focus_similarity(const LightField& lf_slice, const Image& sai_slice, double alpha) {
  const Image focused = refocus(lf_slice, alpha);
  return ms_ssim(focused, sai_slice, auto_ms_ssim_scales(std::min(sai_slice.height(), sai_slice.width())));
}

std::pair<double, double> get_alpha_range(const LightField& lf_slice, const Image& sai_slice, double step,
                                          int max_iters) {
  if (!(step > 0.0)) throw ValidationError("range step must be > 0");
  if (lf_slice.height() != sai_slice.height() || lf_slice.width() != sai_slice.width())
    throw ValidationError("light field slice and SAI slice differ in size");

  std::map<long, double> cache;  // keyed by offset from 1 in steps
  auto sim = [&](long k) {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const double s = focus_similarity(lf_slice, sai_slice, 1.0 + static_cast<double>(k) * step);
    cache.emplace(k, s);
    return s;
  };

  long mid = 0;
  for (int moves = 0;; ++moves) {
    const double l = sim(mid - 1);
    const double m = sim(mid);
    const double r = sim(mid + 1);
    if (l < m && m < r) {
      ++mid;
    } else if (l > m && m > r) {
      --mid;
    } else {
      return {snap_to_grid(1.0 + static_cast<double>(mid - 1) * step, step, 1.0),
              snap_to_grid(1.0 + static_cast<double>(mid + 1) * step, step, 1.0)};
    }
    if (moves + 1 >= max_iters)
      throw SearchError(SearchError::Kind::no_bracket,
                        fmt::format("similarity still monotone after {} moves", max_iters));
  }
}

AlphaSearchResult get_alpha(const LightField& lf_slice, const Image& sai_slice, double alpha_min, double alpha_max,
                            double delta) {
  if (!(delta > 0.0) || !std::isfinite(alpha_min) || !std::isfinite(alpha_max) || alpha_min > alpha_max)
    throw SearchError(SearchError::Kind::empty_range,
                      fmt::format("no candidates in [{}, {}] with step {}", alpha_min, alpha_max, delta));

  const long steps = static_cast<long>(std::floor((alpha_max - alpha_min) / delta + 1e-9));
  AlphaSearchResult result;
  result.range_min = alpha_min;
  result.range_max = alpha_max;
  result.sim_best = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= steps; ++k) {
    const double alpha = snap_to_grid(alpha_min + static_cast<double>(k) * delta, delta, alpha_min);
    const double s = focus_similarity(lf_slice, sai_slice, alpha);
    if (s >= result.sim_best) {
      result.sim_best = s;
      result.alpha_best = alpha;
    }
  }
  return result;
}

MaskBuild mask_sparse(const LightField& lf, const std::vector<RoiSpec>& rois, const MaskOptions& opts) {
  check_options(opts);
  const int h = lf.height();
  const int w = lf.width();
  validate_rois(rois, h, w);

  const Image sai = middle_sai(lf);
  const auto jobs = region_jobs(rois, opts.patch);
  std::vector<RegionAlpha> regions(jobs.size());
  std::vector<std::string> failures(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      regions[j] = {jobs[j].roi_index, jobs[j].rect, std::nullopt};
      const PixelRect window = search_window(jobs[j].rect, h, w);
      try {
        const LightField lf_slice = lf.crop(window);
        const Image sai_slice = sai.crop(window);
        const auto [lo, hi] = get_alpha_range(lf_slice, sai_slice, opts.range_step, opts.max_range_iters);
        regions[j].alpha = get_alpha(lf_slice, sai_slice, lo, hi, opts.delta_alpha).alpha_best;
      } catch (const Error& e) {
        failures[j] = fmt::format("roi {}: region at ({}, {}) search failed ({}), using the default alpha",
                                  jobs[j].roi_index, jobs[j].rect.x0, jobs[j].rect.y0, e.what());
      }
    }
  });

  std::vector<std::string> warnings;
  for (auto& f : failures)
    if (!f.empty()) warnings.push_back(std::move(f));
  return assemble(h, w, std::move(regions), std::move(warnings), opts);
}

AlphaMask smooth_mask(const AlphaMask& mask) {
  if (mask.quantized) throw ValidationError("smooth_mask expects an unquantized mask");
  if (mask.alpha.empty()) return mask;
  Plane p(mask.height, mask.width);
  for (std::size_t i = 0; i < mask.alpha.size(); ++i) p.values[i] = mask.alpha[i];
  const auto [lo, hi] = std::minmax_element(mask.alpha.begin(), mask.alpha.end());
  const auto k = gaussian_kernel(kSmoothRadius, kSmoothSigma);
  const Plane s = blur_replicate(p, k, k);

  AlphaMask out = mask;
  for (std::size_t i = 0; i < out.alpha.size(); ++i)
    out.alpha[i] = std::clamp(static_cast<float>(s.values[i]), *lo, *hi);
  return out;
}

double snap_to_grid(double value, double step, double anchor) {
  const double k = std::round((value - anchor) / step);
  const double inverse = 1.0 / step;
  const double rounded_inverse = std::round(inverse);
  if (rounded_inverse >= 1.0 && std::abs(inverse - rounded_inverse) < 1e-9) return anchor + k / rounded_inverse;
  return anchor + k * step;
}

AlphaMask quantize_mask(const AlphaMask& mask, double step, double anchor) {
  if (!(step > 0.0)) throw ValidationError("quantization step must be > 0");
  AlphaMask out = mask;
  for (auto& a : out.alpha) a = static_cast<float>(snap_to_grid(a, step, anchor));
  out.quant_step = static_cast<float>(step);
  out.quantized = true;
  return out;
}

std::vector<RoiSpec> parse_rois(const std::string& json_text) {
  std::vector<RoiSpec> rois;
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_array()) throw ValidationError("ROI list must be a JSON array");
    for (const auto& item : doc) {
      const auto& rect = item.at("rect");
      if (!rect.is_array() || rect.size() != 4) throw ValidationError("rect must be [x0, y0, x1, y1]");
      RoiSpec roi;
      roi.rect = {rect[0].get<int>(), rect[1].get<int>(), rect[2].get<int>(), rect[3].get<int>()};
      const auto phi = item.value("phi", std::string("narrow"));
      if (phi == "narrow")
        roi.phi = DepthRange::narrow;
      else if (phi == "wide")
        roi.phi = DepthRange::wide;
      else
        throw ValidationError("phi must be \"narrow\" or \"wide\", got \"" + phi + "\"");
      rois.push_back(roi);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ROI list: ") + e.what());
  }
  return rois;
}

std::vector<RoiSpec> load_rois(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ROI file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rois(ss.str());
}

std::string rois_to_json(const std::vector<RoiSpec>& rois) {
  json doc = json::array();
  for (const auto& r : rois)
    doc.push_back({{"rect", {r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1}},
                   {"phi", r.phi == DepthRange::narrow ? "narrow" : "wide"}});
  return doc.dump();
}

}  // namespace lfr
