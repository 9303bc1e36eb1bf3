#include "lfr/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "lfr/error.hpp"
#include "lfr/refocus.hpp"

namespace lfr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

JobResult finish(const LightField& lf, MaskBuild build, StageTimings timings) {
  JobResult result;
  auto t = Clock::now();
  const RefocusPlan plan = plan_from_mask(build.mask);
  result.intermediate = refocus_with_plan(lf, plan);
  timings.refocus_s = seconds_since(t);

  result.image = result.intermediate;
  result.level_count = plan.level_count();
  result.mask = std::move(build.mask);
  result.regions = build.regions.size();
  result.failed_regions = build.failed_regions();
  result.warnings = std::move(build.warnings);
  result.timings = timings;
  return result;
}

void apply_restore(JobResult& result, const PipelineConfig& cfg) {
  if (!cfg.restore) return;
  const auto t = Clock::now();
  try {
    result.image = restore_external(result.intermediate, cfg.restore_command, cfg.restore_model);
    result.restored = true;
  } catch (const RestoreUnavailable& e) {
    result.restore_error = e.what();
  }
  result.timings.restore_s = seconds_since(t);
}

}  // namespace

void PipelineConfig::validate() const {
  if (patch < 1) throw ValidationError("patch must be >= 1");
  if (!(delta_alpha > 0.0) || !std::isfinite(delta_alpha)) throw ValidationError("delta_alpha must be > 0");
  if (!(quant_step > 0.0) || !std::isfinite(quant_step)) throw ValidationError("quant_step must be > 0");
  if (alpha_default && !std::isfinite(*alpha_default)) throw ValidationError("alpha_default must be finite");
}

MaskOptions PipelineConfig::mask_options() const {
  MaskOptions opts;
  opts.alpha_default = alpha_default;
  opts.patch = patch;
  opts.smooth = smooth;
  opts.quant_step = quant_step;
  opts.delta_alpha = delta_alpha;
  opts.confidence_threshold = confidence_threshold;
  return opts;
}

JobResult run_dense(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  validate_rois(rois, lf.height(), lf.width());

  StageTimings timings;
  const auto est = estimate_disparity(lf, cfg.disparity);
  timings.disparity_s = seconds_since(start);
  MaskBuild build = mask_dense(est, rois, cfg.mask_options());
  timings.mask_s = seconds_since(start);

  JobResult result = finish(lf, std::move(build), timings);
  apply_restore(result, cfg);
  result.timings.total_s = seconds_since(start);
  return result;
}

JobResult run_sparse(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  validate_rois(rois, lf.height(), lf.width());

  StageTimings timings;
  MaskBuild build = mask_sparse(lf, rois, cfg.mask_options());
  timings.mask_s = seconds_since(start);

  JobResult result = finish(lf, std::move(build), timings);
  apply_restore(result, cfg);
  result.timings.total_s = seconds_since(start);
  return result;
}

JobResult run_pipeline(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg) {
  return cfg.mode == RefocusMode::dense ? run_dense(lf, rois, cfg) : run_sparse(lf, rois, cfg);
}

}  // namespace lfr
