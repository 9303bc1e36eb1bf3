#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "lfr/alpha_mask.hpp"
#include "lfr/disparity.hpp"
#include "lfr/error.hpp"
#include "lfr/filters.hpp"
#include "lfr/image_io.hpp"
#include "lfr/lightfield.hpp"
#include "lfr/metrics.hpp"
#include "lfr/pipeline.hpp"
#include "lfr/service.hpp"
#include "lfr/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit : int { ok = 0, validation = 2, ingest = 3, search_failed = 4, restore_failed = 5 };

struct RefocusArgs {
  fs::path manifest;
  fs::path rois;
  std::string mode = "dense";
  bool sparse_from_dense = false;
  bool restore = false;
  std::optional<double> alpha_default;
  int patch = 20;
  double delta_alpha = 0.1;
  double quant = 0.05;
  bool no_smooth = false;
  fs::path out;
  fs::path mask_out;
  std::string restore_cmd = "lf-restore";
  std::string restore_model = "model.bin";
  bool quiet = false;
};

lfr::PipelineConfig to_config(const RefocusArgs& a) {
  lfr::PipelineConfig cfg;
  cfg.mode = a.mode == "dense" ? lfr::RefocusMode::dense : lfr::RefocusMode::sparse;
  cfg.alpha_default = a.alpha_default;
  cfg.patch = a.patch;
  cfg.delta_alpha = a.delta_alpha;
  cfg.quant_step = a.quant;
  cfg.smooth = !a.no_smooth;
  cfg.restore = a.restore;
  cfg.restore_command = a.restore_cmd;
  cfg.restore_model = a.restore_model;
  return cfg;
}

int cmd_refocus(const RefocusArgs& a) {
  const lfr::PipelineConfig cfg = to_config(a);
  lfr::LightField lf = lfr::load_lightfield(a.manifest);
  if (a.sparse_from_dense) lf = lfr::extract_cross(lf);
  const auto rois = a.rois.empty() ? std::vector<lfr::RoiSpec>{} : lfr::load_rois(a.rois);

  const lfr::JobResult result = lfr::run_pipeline(lf, rois, cfg);
  lfr::save_png(result.image, a.out, 8);
  if (!a.mask_out.empty()) lfr::save_amsk(result.mask, a.mask_out);

  if (!a.quiet) {
    json report = {{"out", a.out.string()},
                   {"level_count", result.level_count},
                   {"regions", result.regions},
                   {"failed_regions", result.failed_regions},
                   {"restored", result.restored},
                   {"warnings", result.warnings},
                   {"timings",
                    {{"disparity_s", result.timings.disparity_s},
                     {"mask_s", result.timings.mask_s},
                     {"refocus_s", result.timings.refocus_s},
                     {"restore_s", result.timings.restore_s},
                     {"total_s", result.timings.total_s}}}};
    if (result.restore_error) report["restore_error"] = *result.restore_error;
    std::cout << report.dump(2) << "\n";
  }
  if (result.restore_error) {
    std::cerr << "lf: restoration failed, wrote the unrestored image: " << *result.restore_error << "\n";
    return restore_failed;
  }
  if (result.regions > 0 && result.failed_regions == result.regions) {
    std::cerr << "lf: alpha search failed for every ROI\n";
    return search_failed;
  }
  return ok;
}

int cmd_synth(const fs::path& spec_path, const fs::path& out_dir) {
  const lfr::SceneFile scene = lfr::load_scene_file(spec_path);
  const auto synth = lfr::synthesize_lf(scene.spec, scene.grid_u, scene.grid_v);
  const auto manifest = lfr::save_lightfield(synth.lf, out_dir, scene.bit_depth);
  lfr::AlphaMask disparity(synth.disparity.height(), synth.disparity.width(), 0.0f);
  for (int y = 0; y < disparity.height; ++y)
    for (int x = 0; x < disparity.width; ++x) disparity.at(y, x) = synth.disparity.at(y, x, 0);
  lfr::save_amsk(disparity, out_dir / "disparity.amsk");
  std::cout << manifest.string() << "\n";
  return ok;
}

int cmd_disparity(const fs::path& manifest, const fs::path& out, const fs::path& conf_out) {
  const auto est = lfr::estimate_disparity(lfr::load_lightfield(manifest));
  auto to_mask = [](const lfr::Plane& p) {
    lfr::AlphaMask m(p.height, p.width, 0.0f);
    for (std::size_t i = 0; i < p.values.size(); ++i) m.alpha[i] = static_cast<float>(p.values[i]);
    return m;
  };
  lfr::save_amsk(to_mask(est.d), out);
  if (!conf_out.empty()) lfr::save_amsk(to_mask(est.conf), conf_out);
  return ok;
}

int cmd_metrics(const fs::path& ref_path, const fs::path& test_path) {
  const auto ref = lfr::load_png(ref_path).image;
  const auto test = lfr::load_png(test_path).image;
  json out = {{"mse", lfr::mse(ref, test)}, {"l1", lfr::l1(ref, test)}, {"psnr", lfr::psnr(ref, test)}};
  const int min_side = std::min(ref.height(), ref.width());
  try {
    out["ssim"] = lfr::ssim(ref, test);
  } catch (const lfr::MetricError&) {
    out["ssim"] = nullptr;
  }
  try {
    const int scales = lfr::auto_ms_ssim_scales(min_side);
    out["ms_ssim"] = lfr::ms_ssim(ref, test, scales);
    out["ms_ssim_scales"] = scales;
  } catch (const lfr::MetricError&) {
    out["ms_ssim"] = nullptr;
  }
  std::cout << out.dump(2) << "\n";
  return ok;
}

lfr::HttpServer* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const fs::path& manifest, const std::string& bind, const std::optional<fs::path>& ui_dir,
              const RefocusArgs& defaults) {
  lfr::LightField lf = lfr::load_lightfield(manifest);
  if (defaults.sparse_from_dense) lf = lfr::extract_cross(lf);
  lfr::PipelineConfig cfg = to_config(defaults);
  if (!lf.is_dense()) cfg.mode = lfr::RefocusMode::sparse;

  lfr::RefocusService service(std::move(lf), cfg);
  const auto [host, port] = lfr::parse_bind_address(bind);
  lfr::HttpServer server(service, {host, port, ui_dir});
  const int bound = server.bind();
  std::cout << fmt::format("listening on http://{}:{}", host, bound) << std::endl;
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  g_server = nullptr;
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-field refocusing toolkit"};
  app.require_subcommand(1);

  RefocusArgs ra;
  auto* refocus = app.add_subcommand("refocus", "Refocus a light field over a set of ROIs");
  refocus->add_option("--manifest", ra.manifest, "Light-field manifest JSON")->required();
  refocus->add_option("--rois", ra.rois, "ROI list JSON (omit for none)");
  refocus->add_option("--mode", ra.mode, "dense or sparse")->check(CLI::IsMember({"dense", "sparse"}));
  refocus->add_flag("--sparse-from-dense", ra.sparse_from_dense, "Keep only the central cross of views");
  refocus->add_flag("--restore", ra.restore, "Run the external restoration command on the result");
  refocus->add_option("--alpha-default", ra.alpha_default, "Alpha outside every ROI");
  refocus->add_option("--patch", ra.patch, "Patch size for wide ROIs");
  refocus->add_option("--delta-alpha", ra.delta_alpha, "Alpha search step");
  refocus->add_option("--quant", ra.quant, "Mask quantization step");
  refocus->add_flag("--no-smooth", ra.no_smooth, "Skip mask smoothing");
  refocus->add_option("--out", ra.out, "Output PNG")->required();
  refocus->add_option("--mask-out", ra.mask_out, "Write the alpha mask (AMSK)");
  refocus->add_option("--restore-cmd", ra.restore_cmd, "Restoration executable");
  refocus->add_option("--restore-model", ra.restore_model, "Restoration model file");
  refocus->add_flag("-q,--quiet", ra.quiet, "Do not print the JSON report");

  fs::path synth_spec, synth_out;
  auto* synth = app.add_subcommand("synth", "Render a synthetic layered light field");
  synth->add_option("--spec", synth_spec, "Scene JSON")->required();
  synth->add_option("--out-dir", synth_out, "Output directory")->required();

  fs::path serve_manifest;
  std::string serve_bind = "127.0.0.1:8080";
  std::optional<fs::path> ui_dir;
  RefocusArgs sa;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API for one light field");
  serve->add_option("--manifest", serve_manifest, "Light-field manifest JSON")->required();
  serve->add_option("--bind", serve_bind, "host:port");
  serve->add_option("--ui-dir", ui_dir, "Static files mounted at /");
  serve->add_flag("--sparse-from-dense", sa.sparse_from_dense, "Keep only the central cross of views");
  serve->add_option("--patch", sa.patch, "Patch size for wide ROIs");
  serve->add_option("--delta-alpha", sa.delta_alpha, "Alpha search step");
  serve->add_option("--quant", sa.quant, "Mask quantization step");
  serve->add_flag("--no-smooth", sa.no_smooth, "Skip mask smoothing");
  serve->add_option("--restore-cmd", sa.restore_cmd, "Restoration executable");
  serve->add_option("--restore-model", sa.restore_model, "Restoration model file");

  fs::path disp_manifest, disp_out, disp_conf;
  auto* disparity = app.add_subcommand("disparity", "Estimate middle-view disparity (AMSK output)");
  disparity->add_option("--manifest", disp_manifest, "Light-field manifest JSON")->required();
  disparity->add_option("--out", disp_out, "Disparity map")->required();
  disparity->add_option("--conf-out", disp_conf, "Confidence map");

  fs::path ref_path, test_path;
  auto* metrics = app.add_subcommand("metrics", "Compare two PNGs");
  metrics->add_option("--ref", ref_path, "Reference image")->required();
  metrics->add_option("--test", test_path, "Test image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    if (*refocus) return cmd_refocus(ra);
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*serve) return cmd_serve(serve_manifest, serve_bind, ui_dir, sa);
    if (*disparity) return cmd_disparity(disp_manifest, disp_out, disp_conf);
    if (*metrics) return cmd_metrics(ref_path, test_path);
  } catch (const lfr::IngestError& e) {
    std::cerr << "lf: " << e.what() << "\n";
    return ingest;
  } catch (const lfr::RestoreUnavailable& e) {
    std::cerr << "lf: " << e.what() << "\n";
    return restore_failed;
  } catch (const lfr::Error& e) {
    std::cerr << "lf: " << e.what() << "\n";
    return validation;
  } catch (const std::exception& e) {
    std::cerr << "lf: " << e.what() << "\n";
    return validation;
  }
  return ok;
}
