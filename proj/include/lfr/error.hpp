#pragma once

#include <stdexcept>
#include <string>

namespace lfr {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
 public:
  enum class Kind { path, dims, grid, format };

  IngestError(Kind kind, const std::string& detail)
      : Error("ingest error (" + std::string(kind_name(kind)) + "): " + detail), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

  static const char* kind_name(Kind k) noexcept {
    switch (k) {
      case Kind::path: return "path";
      case Kind::dims: return "dims";
      case Kind::grid: return "grid";
      case Kind::format: return "format";
    }
    return "unknown";
  }

 private:
  Kind kind_;
};

class SynthError : public Error {
 public:
  explicit SynthError(const std::string& detail) : Error("synthesis error: " + detail) {}
};

class RefocusError : public Error {
 public:
  explicit RefocusError(const std::string& detail) : Error("refocus error: " + detail) {}
};

class PlanError : public Error {
 public:
  explicit PlanError(const std::string& detail) : Error("plan error: " + detail) {}
};

class DisparityError : public Error {
 public:
  explicit DisparityError(const std::string& detail) : Error("disparity error: " + detail) {}
};

class RoiError : public Error {
 public:
  explicit RoiError(const std::string& detail) : Error("roi error: " + detail) {}
};

class SearchError : public Error {
 public:
  enum class Kind { no_bracket, empty_range };

  SearchError(Kind kind, const std::string& detail)
      : Error(std::string("search error (") + (kind == Kind::no_bracket ? "no_bracket" : "empty_range") +
              "): " + detail),
        kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class MetricError : public Error {
 public:
  enum class Kind { dim_mismatch, too_small, bad_scales };

  MetricError(Kind kind, const std::string& detail) : Error("metric error: " + detail), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// The external restoration step could not be run or failed.
class RestoreUnavailable : public Error {
 public:
  explicit RestoreUnavailable(const std::string& detail) : Error("restoration unavailable: " + detail) {}
};

/// Malformed user input (config values, JSON documents, mask files).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& detail) : Error("validation error: " + detail) {}
};

}  // namespace lfr
