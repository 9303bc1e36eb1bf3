#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lfr/error.hpp"
#include "lfr/synth.hpp"

namespace lfr {

SceneFile parse_scene_file(const std::string& json_text) {
  using json = nlohmann::json;
  SceneFile file;
  try {
    const json doc = json::parse(json_text);
    if (doc.contains("grid")) {
      file.grid_u = doc["grid"].at(0).get<int>();
      file.grid_v = doc["grid"].at(1).get<int>();
    }
    file.spec.height = doc.at("height").get<int>();
    file.spec.width = doc.at("width").get<int>();
    const int channels = doc.value("channels", 3);
    file.bit_depth = doc.value("bit_depth", 8);
    if (file.spec.height < 1 || file.spec.width < 1) throw ValidationError("scene size must be positive");
    if (channels != 1 && channels != 3) throw ValidationError("channels must be 1 or 3");
    if (file.bit_depth != 8 && file.bit_depth != 16) throw ValidationError("bit_depth must be 8 or 16");

    std::uint64_t next_seed = 1;
    for (const auto& item : doc.at("layers")) {
      SyntheticLayer layer;
      layer.disparity = item.at("disparity").get<double>();
      const auto seed = item.value("seed", next_seed);
      next_seed = seed + 1;
      layer.texture = noise_texture(file.spec.height, file.spec.width, channels, seed, item.value("blur", 1.0));
      if (item.contains("rect")) {
        const auto& r = item["rect"];
        if (!r.is_array() || r.size() != 4) throw ValidationError("layer rect must be [x0, y0, x1, y1]");
        layer.mask = rect_mask(file.spec.height, file.spec.width,
                               {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
      }
      file.spec.layers.push_back(std::move(layer));
    }
    // Layers without a rect take whatever the rect layers leave uncovered.
    auto covered = std::vector<std::uint8_t>(static_cast<std::size_t>(file.spec.height) * file.spec.width, 0);
    for (const auto& l : file.spec.layers)
      for (std::size_t i = 0; i < l.mask.size(); ++i) covered[i] |= l.mask[i];
    for (auto& l : file.spec.layers) {
      if (!l.mask.empty()) continue;
      l.mask.resize(covered.size());
      for (std::size_t i = 0; i < covered.size(); ++i) l.mask[i] = covered[i] ? 0 : 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scene file: ") + e.what());
  }
  return file;
}

SceneFile load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_file(ss.str());
}

}  // namespace lfr
