#include "lfr/service.hpp"

#include <charconv>
#include <cstdio>
#include <json.hpp>

#include <fmt/format.h>
#include <httplib.h>

#include "lfr/alpha_mask.hpp"
#include "lfr/error.hpp"
#include "lfr/image_io.hpp"

namespace lfr {
namespace {

using json = nlohmann::json;

HttpReply json_reply(int status, const json& body) {
  HttpReply r;
  r.status = status;
  r.body = body.dump();
  return r;
}

HttpReply error_reply(int status, const std::string& reason, const std::string& detail) {
  return json_reply(status, {{"error", reason}, {"detail", detail}});
}

std::string bytes_to_string(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

std::string format_seconds(double s) { return fmt::format("{:.6f}", s); }

}  // namespace

FifoGate::Turn FifoGate::enter() {
  std::unique_lock lock(mutex_);
  const std::uint64_t ticket = next_ticket_++;
  cv_.wait(lock, [&] { return serving_ == ticket; });
  return Turn(*this, ticket);
}

void FifoGate::leave() {
  {
    std::lock_guard lock(mutex_);
    ++serving_;
  }
  cv_.notify_all();
}

std::string stable_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

RefocusService::RefocusService(LightField lf, PipelineConfig base) : lf_(std::move(lf)), base_(std::move(base)) {
  base_.validate();
}

HttpReply RefocusService::meta() const {
  return json_reply(200, {{"grid", {lf_.grid_u(), lf_.grid_v()}},
                          {"spatial", {lf_.height(), lf_.width()}},
                          {"channels", lf_.channels()},
                          {"available_views", lf_.available_count()},
                          {"sparse", !lf_.is_dense()}});
}

HttpReply RefocusService::middle_sai() const {
  HttpReply r;
  r.content_type = "image/png";
  r.body = bytes_to_string(encode_png(lfr::middle_sai(lf_), 8));
  return r;
}

HttpReply RefocusService::health() const { return json_reply(200, {{"status", "ok"}}); }

std::string RefocusService::job_key(const std::vector<RoiSpec>& rois, const PipelineConfig& cfg) {
  // %.17g keeps the key stable across runs and exact for every double.
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  json doc = {{"rois", json::parse(rois_to_json(rois))},
              {"mode", cfg.mode == RefocusMode::dense ? "dense" : "sparse"},
              {"alpha_default", cfg.alpha_default ? num(*cfg.alpha_default) : "auto"},
              {"patch", cfg.patch},
              {"delta_alpha", num(cfg.delta_alpha)},
              {"quant_step", num(cfg.quant_step)},
              {"smooth", cfg.smooth},
              {"restore", cfg.restore},
              {"restore_command", cfg.restore ? cfg.restore_command : ""},
              {"restore_model", cfg.restore ? cfg.restore_model : ""}};
  return stable_hash(doc.dump());
}

std::shared_ptr<const RefocusService::CachedJob> RefocusService::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(key);
  return it == cache_.end() ? nullptr : it->second;
}

HttpReply RefocusService::job_reply(const std::string& key, const CachedJob& job, bool cache_hit) const {
  HttpReply r;
  r.content_type = "image/png";
  r.body = bytes_to_string(job.png);
  r.headers = {{"X-Job-Key", key},
               {"X-Level-Count", std::to_string(job.level_count)},
               {"X-Cache", cache_hit ? "hit" : "miss"},
               {"X-Warnings", std::to_string(job.warnings)},
               {"X-Time-Disparity", format_seconds(job.timings.disparity_s)},
               {"X-Time-Mask", format_seconds(job.timings.mask_s)},
               {"X-Time-Refocus", format_seconds(job.timings.refocus_s)},
               {"X-Time-Restore", format_seconds(job.timings.restore_s)},
               {"X-Time-Total", format_seconds(job.timings.total_s)}};
  if (job.restore_error) r.headers.emplace_back("X-Restore-Error", *job.restore_error);
  return r;
}

HttpReply RefocusService::refocus(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    return error_reply(400, "malformed_json", e.what());
  }
  if (!doc.is_object()) return error_reply(400, "malformed_request", "body must be a JSON object");
  if (!doc.contains("rois") || !doc["rois"].is_array())
    return error_reply(400, "malformed_request", "\"rois\" must be an array");

  std::vector<RoiSpec> rois;
  try {
    rois = parse_rois(doc["rois"].dump());
  } catch (const ValidationError& e) {
    return error_reply(400, "malformed_rois", e.what());
  }

  PipelineConfig cfg = base_;
  try {
    if (doc.contains("mode")) {
      const auto& m = doc["mode"];
      if (!m.is_string()) return error_reply(422, "invalid_mode", "mode must be \"dense\" or \"sparse\"");
      const auto mode = m.get<std::string>();
      if (mode == "dense")
        cfg.mode = RefocusMode::dense;
      else if (mode == "sparse")
        cfg.mode = RefocusMode::sparse;
      else
        return error_reply(422, "invalid_mode", "mode must be \"dense\" or \"sparse\"");
    }
    if (doc.contains("restore")) {
      if (!doc["restore"].is_boolean()) return error_reply(400, "malformed_request", "\"restore\" must be a boolean");
      cfg.restore = doc["restore"].get<bool>();
    }
    if (doc.contains("alpha_default") && !doc["alpha_default"].is_null()) {
      if (!doc["alpha_default"].is_number())
        return error_reply(400, "malformed_request", "\"alpha_default\" must be a number");
      cfg.alpha_default = doc["alpha_default"].get<double>();
    }
    cfg.validate();
  } catch (const ValidationError& e) {
    return error_reply(422, "invalid_config", e.what());
  }

  if (cfg.mode == RefocusMode::dense && !lf_.is_dense())
    return error_reply(422, "dense_requires_full_grid", "dense mode needs every view; use mode \"sparse\"");
  try {
    validate_rois(rois, lf_.height(), lf_.width());
  } catch (const RoiError& e) {
    return error_reply(422, "roi_out_of_bounds", e.what());
  }

  const std::string key = job_key(rois, cfg);
  if (auto cached = lookup(key)) return job_reply(key, *cached, true);

  auto turn = gate_.enter();
  // An identical job queued ahead of us may have filled the cache.
  if (auto cached = lookup(key)) return job_reply(key, *cached, true);

  JobResult result;
  try {
    result = run_pipeline(lf_, rois, cfg);
  } catch (const Error& e) {
    return error_reply(500, "job_failed", e.what());
  }

  auto job = std::make_shared<CachedJob>();
  job->png = encode_png(result.image, 8);
  job->amsk = encode_amsk(result.mask);
  job->level_count = result.level_count;
  job->timings = result.timings;
  job->warnings = result.warnings.size();
  job->restore_error = result.restore_error;
  {
    std::lock_guard lock(mutex_);
    cache_[key] = job;
    ++jobs_executed_;
  }
  return job_reply(key, *job, false);
}

HttpReply RefocusService::mask(const std::string& job_key) const {
  if (job_key.empty()) return error_reply(400, "malformed_request", "missing job parameter");
  auto job = lookup(job_key);
  if (!job) return error_reply(404, "unknown_job", "no finished job with key " + job_key);
  HttpReply r;
  r.content_type = "application/octet-stream";
  r.body = bytes_to_string(job->amsk);
  r.headers = {{"X-Job-Key", job_key}};
  return r;
}

std::size_t RefocusService::jobs_executed() const {
  std::lock_guard lock(mutex_);
  return jobs_executed_;
}

std::size_t RefocusService::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

struct HttpServer::Impl {
  Impl(RefocusService& s, ServeOptions o) : service(s), options(std::move(o)) {}
  RefocusService& service;
  ServeOptions options;
  httplib::Server server;
  int port = -1;
};

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  for (const auto& [name, value] : reply.headers) res.set_header(name, value);
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

HttpServer::HttpServer(RefocusService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;
  srv.Get("/healthz", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.health()); });
  srv.Get("/lf/meta", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.meta()); });
  srv.Get("/lf/middle-sai", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.middle_sai()); });
  srv.Post("/refocus",
           [&svc](const httplib::Request& req, httplib::Response& res) { send(res, svc.refocus(req.body)); });
  srv.Get("/refocus/mask", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.mask(req.has_param("job") ? req.get_param_value("job") : std::string()));
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_reply(500, "internal", what));
  });
  if (impl_->options.static_dir) {
    if (!srv.set_mount_point("/", impl_->options.static_dir->string()))
      throw ValidationError("static directory does not exist: " + impl_->options.static_dir->string());
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0)
    impl_->port = impl_->server.bind_to_any_port(o.host);
  else
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  if (impl_->port < 0) throw ValidationError(fmt::format("cannot bind {}:{}", o.host, o.port));
  return impl_->port;
}

void HttpServer::listen() {
  if (impl_->port < 0) bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw ValidationError("bind address must be host:port, got '" + address + "'");
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "0.0.0.0";
  int port = -1;
  const char* first = address.data() + colon + 1;
  const char* last = address.data() + address.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port < 0 || port > 65535)
    throw ValidationError("invalid port in bind address '" + address + "'");
  return {host, port};
}

}  // namespace lfr
