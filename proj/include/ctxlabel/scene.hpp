#ifndef CTXLABEL_SCENE_HPP
#define CTXLABEL_SCENE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxlabel/error.hpp"

namespace ctxlabel {

using Json = nlohmann::ordered_json;
using FeatureVector = std::vector<double>;

/// Pixel coordinate: x is the column, y the row (y grows downward).
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// One horizontal run of a row-major run-length encoded mask.
struct Run {
  int row = 0;
  int col = 0;
  int length = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

/// Set of pixels stored as runs sorted by (row, col), non-overlapping.
class Mask {
 public:
  Mask() = default;

  /// Runs are taken verbatim; ordering and overlap are checked by `validate`.
  explicit Mask(std::vector<Run> runs) : runs_(std::move(runs)) {}

  /// Canonical encoding of an arbitrary pixel list (duplicates collapse).
  static Mask from_pixels(std::vector<Pixel> pixels) {
    std::sort(pixels.begin(), pixels.end(), [](const Pixel& a, const Pixel& b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
    std::vector<Run> runs;
    for (const Pixel& p : pixels) {
      if (!runs.empty() && runs.back().row == p.y && runs.back().col + runs.back().length == p.x) {
        ++runs.back().length;
      } else {
        runs.push_back({p.y, p.x, 1});
      }
    }
    return Mask(std::move(runs));
  }

  /// Axis-aligned rectangle [x0, x0 + w) x [y0, y0 + h).
  static Mask rectangle(int x0, int y0, int w, int h) {
    std::vector<Run> runs;
    for (int y = y0; y < y0 + h; ++y) runs.push_back({y, x0, w});
    return Mask(std::move(runs));
  }

  const std::vector<Run>& runs() const noexcept { return runs_; }
  bool empty() const noexcept { return pixel_count() == 0; }

  std::size_t pixel_count() const noexcept {
    std::size_t n = 0;
    for (const Run& r : runs_) n += static_cast<std::size_t>(std::max(r.length, 0));
    return n;
  }

  template <typename Fn>
  void for_each_pixel(Fn&& fn) const {
    for (const Run& r : runs_)
      for (int x = r.col; x < r.col + r.length; ++x) fn(Pixel{x, r.row});
  }

  std::vector<Pixel> pixels() const {
    std::vector<Pixel> out;
    out.reserve(pixel_count());
    for_each_pixel([&](Pixel p) { out.push_back(p); });
    return out;
  }

  Mask translated(int dx, int dy) const {
    std::vector<Run> runs = runs_;
    for (Run& r : runs) {
      r.row += dy;
      r.col += dx;
    }
    return Mask(std::move(runs));
  }

  /// Structural checks: positive lengths, sorted, non-overlapping, inside the frame.
  void validate(int width, int height, int region_id) const {
    const std::string who = "region " + std::to_string(region_id);
    if (runs_.empty()) throw Error(ErrorKind::EmptyRegion, who + " has no runs");
    const Run* prev = nullptr;
    for (const Run& r : runs_) {
      if (r.length <= 0) throw Error(ErrorKind::Malformed, who + " has a run with non-positive length");
      if (r.row < 0 || r.row >= height || r.col < 0 || r.col + r.length > width)
        throw Error(ErrorKind::OutOfBounds, who + " has pixels outside the " + std::to_string(width) + "x" +
                                                std::to_string(height) + " frame");
      if (prev != nullptr) {
        const bool ordered = prev->row < r.row || (prev->row == r.row && prev->col < r.col);
        if (!ordered) throw Error(ErrorKind::Malformed, who + " runs are not sorted by (row, start_col)");
        if (prev->row == r.row && prev->col + prev->length > r.col)
          throw Error(ErrorKind::Malformed, who + " has overlapping runs");
      }
      prev = &r;
    }
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::vector<Run> runs_;
};

struct Region {
  int id = 0;
  Mask mask;
  std::optional<int> truth;                      // concept index
  std::optional<FeatureVector> features;
  std::optional<std::vector<double>> decisions;  // externally supplied per-concept decision values
  friend bool operator==(const Region&, const Region&) = default;
};

/// Image frame with disjoint labeled regions. Invariants are checked on construction.
class Scene {
 public:
  Scene(int width, int height, std::vector<std::string> vocabulary, std::vector<Region> regions)
      : width_(width), height_(height), vocabulary_(std::move(vocabulary)), regions_(std::move(regions)) {
    validate();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double diagonal() const noexcept {
    return std::sqrt(static_cast<double>(width_) * width_ + static_cast<double>(height_) * height_);
  }
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<Region>& regions() const noexcept { return regions_; }
  std::size_t size() const noexcept { return regions_.size(); }

  /// Position of region `id` in `regions()`.
  std::size_t index_of(int id) const {
    for (std::size_t i = 0; i < regions_.size(); ++i)
      if (regions_[i].id == id) return i;
    throw Error(ErrorKind::UnknownRegion, "no region with id " + std::to_string(id));
  }

  const Region& region(int id) const { return regions_[index_of(id)]; }

  int concept_index(std::string_view name) const {
    auto it = std::find(vocabulary_.begin(), vocabulary_.end(), name);
    if (it == vocabulary_.end()) throw Error(ErrorKind::UnknownConcept, "concept '" + std::string(name) + "' not in vocabulary");
    return static_cast<int>(it - vocabulary_.begin());
  }

  /// Same scene with `fn` applied to each region (result re-validated).
  template <typename Fn>
  Scene with_regions(Fn&& fn) const {
    std::vector<Region> regions = regions_;
    for (Region& r : regions) fn(r);
    return Scene(width_, height_, vocabulary_, std::move(regions));
  }

  friend bool operator==(const Scene&, const Scene&) = default;

 private:
  void validate() const {
    if (width_ < 1 || height_ < 1) throw Error(ErrorKind::Malformed, "frame dimensions must be positive");
    std::unordered_set<std::string> names;
    for (const std::string& name : vocabulary_) {
      if (name.empty()) throw Error(ErrorKind::Malformed, "empty concept name");
      if (!names.insert(name).second) throw Error(ErrorKind::DuplicateId, "concept '" + name + "' repeated in vocabulary");
    }
    std::unordered_set<int> ids;
    std::vector<int> owner(static_cast<std::size_t>(width_) * height_, -1);
    for (const Region& r : regions_) {
      if (!ids.insert(r.id).second) throw Error(ErrorKind::DuplicateId, "region id " + std::to_string(r.id) + " repeated");
      r.mask.validate(width_, height_, r.id);
      r.mask.for_each_pixel([&](Pixel p) {
        int& cell = owner[static_cast<std::size_t>(p.y) * width_ + p.x];
        if (cell != -1)
          throw Error(ErrorKind::Overlap, "regions " + std::to_string(cell) + " and " + std::to_string(r.id) +
                                              " overlap at pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) + ")");
        cell = r.id;
      });
      if (r.truth && (*r.truth < 0 || *r.truth >= static_cast<int>(vocabulary_.size())))
        throw Error(ErrorKind::UnknownConcept, "region " + std::to_string(r.id) + " truth outside vocabulary");
      if (r.decisions && r.decisions->size() != vocabulary_.size())
        throw Error(ErrorKind::DimensionMismatch, "region " + std::to_string(r.id) + " decisions length " +
                                                      std::to_string(r.decisions->size()) + " != vocabulary size");
    }
  }

  int width_;
  int height_;
  std::vector<std::string> vocabulary_;
  std::vector<Region> regions_;
};

namespace detail {

inline Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T get_field(const Json& obj, const char* key, std::string_view what) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorKind::Malformed, std::string(what) + " lacks '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string(what) + " field '" + key + "': " + e.what());
  }
}

}  // namespace detail

/// Decodes a scene document:
/// `{width, height, vocabulary:[...], regions:[{id, rle:[[row, col, len],...], truth?, features?, decisions?}]}`.
inline Scene parse_scene(std::string_view text) {
  const Json doc = detail::parse_json(text, "scene");
  if (!doc.is_object()) throw Error(ErrorKind::Malformed, "scene document must be an object");
  const int width = detail::get_field<int>(doc, "width", "scene");
  const int height = detail::get_field<int>(doc, "height", "scene");
  auto vocabulary = detail::get_field<std::vector<std::string>>(doc, "vocabulary", "scene");
  if (!doc.contains("regions") || !doc["regions"].is_array()) throw Error(ErrorKind::Malformed, "scene lacks 'regions' array");

  std::vector<Region> regions;
  for (const Json& jr : doc["regions"]) {
    Region r;
    r.id = detail::get_field<int>(jr, "id", "region");
    const std::string who = "region " + std::to_string(r.id);
    auto triples = detail::get_field<std::vector<std::vector<int>>>(jr, "rle", who);
    std::vector<Run> runs;
    for (const auto& t : triples) {
      if (t.size() != 3) throw Error(ErrorKind::Malformed, who + " rle entries must be [row, start_col, run_len]");
      runs.push_back({t[0], t[1], t[2]});
    }
    r.mask = Mask(std::move(runs));
    if (jr.contains("truth")) {
      const auto name = detail::get_field<std::string>(jr, "truth", who);
      auto it = std::find(vocabulary.begin(), vocabulary.end(), name);
      if (it == vocabulary.end()) throw Error(ErrorKind::UnknownConcept, who + " truth '" + name + "' not in vocabulary");
      r.truth = static_cast<int>(it - vocabulary.begin());
    }
    if (jr.contains("features")) r.features = detail::get_field<FeatureVector>(jr, "features", who);
    if (jr.contains("decisions")) r.decisions = detail::get_field<std::vector<double>>(jr, "decisions", who);
    regions.push_back(std::move(r));
  }
  return Scene(width, height, std::move(vocabulary), std::move(regions));
}

/// One top-level key per line, one region per line.
inline std::string serialize_scene(const Scene& scene) {
  std::string out = "{\n";
  out += "  \"width\": " + std::to_string(scene.width()) + ",\n";
  out += "  \"height\": " + std::to_string(scene.height()) + ",\n";
  out += "  \"vocabulary\": " + Json(scene.vocabulary()).dump() + ",\n";
  out += "  \"regions\": [";
  bool first = true;
  for (const Region& r : scene.regions()) {
    Json jr;
    jr["id"] = r.id;
    Json rle = Json::array();
    for (const Run& run : r.mask.runs()) rle.push_back({run.row, run.col, run.length});
    jr["rle"] = std::move(rle);
    if (r.truth) jr["truth"] = scene.vocabulary()[static_cast<std::size_t>(*r.truth)];
    if (r.features) jr["features"] = *r.features;
    if (r.decisions) jr["decisions"] = *r.decisions;
    out += first ? "\n    " : ",\n    ";
    out += jr.dump();
    first = false;
  }
  out += first ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace ctxlabel

#endif
