#include "lfr/lightfield.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/args.h>
#include <fmt/format.h>
#include <json.hpp>

#include "lfr/error.hpp"
#include "lfr/image_io.hpp"

namespace lfr {

using nlohmann::json;

LightField::LightField(LightFieldShape shape, std::vector<float> samples)
    : LightField(shape, std::make_shared<const std::vector<float>>(std::move(samples)),
                 std::vector<std::uint8_t>(shape.view_count(), 1)) {
  for (float s : *samples_)
    if (!(s >= 0.0f && s <= 1.0f)) throw ValidationError("light field samples must lie in [0, 1]");
}

LightField::LightField(LightFieldShape shape, std::shared_ptr<const std::vector<float>> samples,
                       std::vector<std::uint8_t> available)
    : shape_(shape), samples_(std::move(samples)), available_(std::move(available)) {
  if (shape_.grid_u < 1 || shape_.grid_v < 1 || shape_.grid_u % 2 == 0 || shape_.grid_v % 2 == 0)
    throw IngestError(IngestError::Kind::grid, fmt::format("angular grid {}x{} must be odd-sized",
                                                           shape_.grid_u, shape_.grid_v));
  if (shape_.height < 1 || shape_.width < 1 || (shape_.channels != 1 && shape_.channels != 3))
    throw IngestError(IngestError::Kind::dims, fmt::format("spatial {}x{}x{} not supported", shape_.height,
                                                           shape_.width, shape_.channels));
  if (samples_->size() != shape_.view_size() * shape_.view_count())
    throw IngestError(IngestError::Kind::dims, "sample buffer size does not match the light field shape");
  if (available_.size() != shape_.view_count())
    throw ValidationError("availability mask size does not match the angular grid");
  const auto c = center();
  if (!this->available(c.u, c.v)) throw ValidationError("the middle SAI must be available");
}

int LightField::available_count() const noexcept {
  return static_cast<int>(std::count_if(available_.begin(), available_.end(), [](auto a) { return a != 0; }));
}

std::vector<AngularIndex> LightField::available_views() const {
  std::vector<AngularIndex> out;
  for (int u = 0; u < shape_.grid_u; ++u)
    for (int v = 0; v < shape_.grid_v; ++v)
      if (available(u, v)) out.push_back({u, v});
  return out;
}

bool LightField::is_cross() const noexcept {
  const auto c = center();
  for (int u = 0; u < shape_.grid_u; ++u)
    for (int v = 0; v < shape_.grid_v; ++v)
      if (available(u, v) != (u == c.u || v == c.v)) return false;
  return true;
}

Image LightField::view_image(int u, int v) const {
  auto s = view(u, v);
  return Image(shape_.height, shape_.width, shape_.channels, std::vector<float>(s.begin(), s.end()));
}

LightField LightField::crop(const PixelRect& rect) const {
  if (!rect.inside(shape_.height, shape_.width)) throw RoiError("crop rectangle outside the light field");
  LightFieldShape s = shape_;
  s.height = rect.height();
  s.width = rect.width();
  std::vector<float> out;
  out.reserve(s.view_size() * s.view_count());
  const std::size_t row_len = static_cast<std::size_t>(s.width) * s.channels;
  for (int u = 0; u < shape_.grid_u; ++u) {
    for (int v = 0; v < shape_.grid_v; ++v) {
      auto src = view(u, v);
      for (int y = rect.y0; y <= rect.y1; ++y) {
        auto begin = src.begin() + (static_cast<std::size_t>(y) * shape_.width + rect.x0) * shape_.channels;
        out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(row_len));
      }
    }
  }
  return LightField(s, std::make_shared<const std::vector<float>>(std::move(out)), available_);
}

LightField LightField::with_availability(std::vector<std::uint8_t> available) const {
  return LightField(shape_, samples_, std::move(available));
}

LightField LightField::scaled(float factor) const {
  std::vector<float> out(*samples_);
  for (auto& s : out) s = std::clamp(s * factor, 0.0f, 1.0f);
  return LightField(shape_, std::make_shared<const std::vector<float>>(std::move(out)), available_);
}

std::string format_view_name(const std::string& pattern, int u, int v) {
  try {
    fmt::dynamic_format_arg_store<fmt::format_context> args;
    args.push_back(fmt::arg("u", u));
    args.push_back(fmt::arg("v", v));
    return fmt::vformat(pattern, args);
  } catch (const fmt::format_error& e) {
    throw IngestError(IngestError::Kind::format, "bad filename pattern '" + pattern + "': " + e.what());
  }
}

LightField load_lightfield(const std::filesystem::path& manifest_path) {
  if (!std::filesystem::is_regular_file(manifest_path))
    throw IngestError(IngestError::Kind::path, manifest_path.string());

  json manifest;
  try {
    std::ifstream in(manifest_path);
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw IngestError(IngestError::Kind::format, manifest_path.string() + ": " + e.what());
  }

  int file_u = 0;
  int file_v = 0;
  std::string pattern;
  std::filesystem::path base_dir = manifest_path.parent_path();
  bool row_major = false;
  try {
    const auto& grid = manifest.at("grid");
    if (!grid.is_array() || grid.size() != 2) throw IngestError(IngestError::Kind::format, "grid must be [N_u, N_v]");
    file_u = grid[0].get<int>();
    file_v = grid[1].get<int>();
    pattern = manifest.at("pattern").get<std::string>();
    if (manifest.contains("base_dir")) {
      std::filesystem::path b = manifest["base_dir"].get<std::string>();
      base_dir = b.is_absolute() ? b : base_dir / b;
    }
    row_major = manifest.value("row_major", false);
  } catch (const json::exception& e) {
    throw IngestError(IngestError::Kind::format, manifest_path.string() + ": " + e.what());
  }
  if (file_u < 1 || file_v < 1 || file_u % 2 == 0 || file_v % 2 == 0)
    throw IngestError(IngestError::Kind::grid, fmt::format("angular grid {}x{} has no middle SAI", file_u, file_v));

  // With row_major the filename's {u} counts grid rows (vertical parallax), so the axes swap.
  LightFieldShape shape;
  shape.grid_u = row_major ? file_v : file_u;
  shape.grid_v = row_major ? file_u : file_v;

  std::vector<float> samples;
  bool first = true;
  for (int u = 0; u < shape.grid_u; ++u) {
    for (int v = 0; v < shape.grid_v; ++v) {
      const auto name = row_major ? format_view_name(pattern, v, u) : format_view_name(pattern, u, v);
      auto loaded = load_png(base_dir / name);
      const Image& img = loaded.image;
      if (first) {
        shape.height = img.height();
        shape.width = img.width();
        shape.channels = img.channels();
        samples.reserve(shape.view_size() * shape.view_count());
        first = false;
      } else if (img.height() != shape.height || img.width() != shape.width || img.channels() != shape.channels) {
        throw IngestError(IngestError::Kind::dims,
                          fmt::format("{} is {}x{}x{}, expected {}x{}x{}", name, img.height(), img.width(),
                                      img.channels(), shape.height, shape.width, shape.channels));
      }
      samples.insert(samples.end(), img.pixels().begin(), img.pixels().end());
    }
  }
  return LightField(shape, std::move(samples));
}

std::filesystem::path save_lightfield(const LightField& lf, const std::filesystem::path& dir, int bit_depth,
                                      const std::string& pattern) {
  std::filesystem::create_directories(dir);
  for (int u = 0; u < lf.grid_u(); ++u)
    for (int v = 0; v < lf.grid_v(); ++v) save_png(lf.view_image(u, v), dir / format_view_name(pattern, u, v), bit_depth);

  json manifest = {{"grid", {lf.grid_u(), lf.grid_v()}}, {"pattern", pattern}, {"base_dir", "."}, {"row_major", false}};
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw ValidationError("failed writing " + path.string());
  return path;
}

LightField extract_cross(const LightField& lf) {
  const auto c = lf.center();
  std::vector<std::uint8_t> available(lf.shape().view_count(), 0);
  for (int u = 0; u < lf.grid_u(); ++u)
    for (int v = 0; v < lf.grid_v(); ++v)
      available[static_cast<std::size_t>(u) * lf.grid_v() + v] = (u == c.u || v == c.v) && lf.available(u, v);
  return lf.with_availability(std::move(available));
}

Image middle_sai(const LightField& lf) {
  const auto c = lf.center();
  return lf.view_image(c.u, c.v);
}

}  // namespace lfr
