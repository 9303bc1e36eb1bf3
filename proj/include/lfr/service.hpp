#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfr/lightfield.hpp"
#include "lfr/pipeline.hpp"

namespace lfr {

/// Transport-independent response.
struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

/// Admits callers strictly in arrival order, one at a time.
class FifoGate {
 public:
  class Turn {
   public:
    explicit Turn(FifoGate& gate, std::uint64_t ticket) : gate_(&gate), ticket_(ticket) {}
    Turn(Turn&& other) noexcept : gate_(std::exchange(other.gate_, nullptr)), ticket_(other.ticket_) {}
    Turn(const Turn&) = delete;
    Turn& operator=(const Turn&) = delete;
    Turn& operator=(Turn&&) = delete;
    ~Turn() {
      if (gate_) gate_->leave();
    }
    std::uint64_t ticket() const noexcept { return ticket_; }

   private:
    FifoGate* gate_;
    std::uint64_t ticket_;
  };

  Turn enter();

 private:
  void leave();

  std::mutex mutex_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string stable_hash(const std::string& text);

/// Request handling for one loaded light field: validation, FIFO job execution and a
/// result cache keyed by the ROI list and effective configuration.
class RefocusService {
 public:
  RefocusService(LightField lf, PipelineConfig base);

  HttpReply meta() const;
  HttpReply middle_sai() const;
  /// POST /refocus. Body: {"rois": [...], "mode"?: "dense"|"sparse", "restore"?: bool,
  /// "alpha_default"?: number}. Responds with PNG bytes and X-* job headers.
  HttpReply refocus(const std::string& body);
  HttpReply mask(const std::string& job_key) const;
  HttpReply health() const;

  std::size_t jobs_executed() const;
  std::size_t cache_size() const;

  /// Cache key of a request after defaults are applied.
  static std::string job_key(const std::vector<RoiSpec>& rois, const PipelineConfig& cfg);

 private:
  struct CachedJob {
    std::vector<std::uint8_t> png;
    std::vector<std::uint8_t> amsk;
    std::size_t level_count = 0;
    StageTimings timings;
    std::size_t warnings = 0;
    std::optional<std::string> restore_error;
  };

  std::shared_ptr<const CachedJob> lookup(const std::string& key) const;
  HttpReply job_reply(const std::string& key, const CachedJob& job, bool cache_hit) const;

  LightField lf_;
  PipelineConfig base_;
  FifoGate gate_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const CachedJob>> cache_;
  std::size_t jobs_executed_ = 0;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  ///< 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// cpp-httplib front end over a RefocusService.
class HttpServer {
 public:
  HttpServer(RefocusService& service, ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; returns the bound port. Throws ValidationError on failure.
  int bind();
  /// Serves until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses "host:port" (or ":port").
std::pair<std::string, int> parse_bind_address(const std::string& address);

}  // namespace lfr
