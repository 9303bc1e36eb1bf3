#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfr/alpha_plan.hpp"
#include "lfr/disparity.hpp"
#include "lfr/image.hpp"
#include "lfr/lightfield.hpp"

namespace lfr {

enum class RefocusMode { dense, sparse };

struct PipelineConfig {
  RefocusMode mode = RefocusMode::dense;
  std::optional<double> alpha_default;
  int patch = 20;
  double delta_alpha = 0.1;
  double quant_step = 0.05;
  bool smooth = true;
  bool restore = false;
  /// Restoration executable and model, invoked as
  /// `<command> infer --model <model> --in <png> --out <png>`.
  std::string restore_command = "lf-restore";
  std::string restore_model = "model.bin";
  DisparityConfig disparity;
  double confidence_threshold = 0.3;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
  MaskOptions mask_options() const;
};

struct StageTimings {
  double disparity_s = 0.0;  ///< dense only; also counted in mask_s
  double mask_s = 0.0;
  double refocus_s = 0.0;
  double restore_s = 0.0;
  double total_s = 0.0;
};

struct JobResult {
  Image image;         ///< final image (I_f); equals `intermediate` unless restoration succeeded
  Image intermediate;  ///< composited refocus before restoration (I_t)
  AlphaMask mask;
  std::size_t level_count = 0;
  StageTimings timings;
  std::vector<std::string> warnings;
  std::size_t regions = 0;
  std::size_t failed_regions = 0;
  std::optional<std::string> restore_error;  ///< set when restoration was requested and failed
  bool restored = false;
};

/// Disparity -> dense mask -> plan -> composite.
JobResult run_dense(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg);

/// Similarity search mask -> plan -> composite -> optional restoration. A restoration failure
/// does not throw: the result carries I_t and `restore_error`.
JobResult run_sparse(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg);

/// Dispatches on cfg.mode.
JobResult run_pipeline(const LightField& lf, const std::vector<RoiSpec>& rois, const PipelineConfig& cfg);

/// Runs the external restoration command on `image` through temporary PNG files.
/// Throws RestoreUnavailable on spawn failure, non-zero exit, or a bad output file.
Image restore_external(const Image& image, const std::string& command, const std::string& model);

}  // namespace lfr
