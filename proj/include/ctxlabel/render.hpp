#ifndef CTXLABEL_RENDER_HPP
#define CTXLABEL_RENDER_HPP

#include <array>
#include <cstddef>
#include <map>
#include <string>

#include "ctxlabel/error.hpp"
#include "ctxlabel/pipeline.hpp"
#include "ctxlabel/raster.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

/// Concept c gets palette[c % 12]; pixels outside every region stay black.
inline constexpr std::array<Rgb, 12> kPalette{{
    {70, 130, 230},   // blue
    {20, 60, 160},    // navy
    {60, 180, 60},    // green
    {220, 40, 40},    // red
    {200, 160, 90},   // tan
    {128, 128, 128},  // gray
    {240, 220, 40},   // yellow
    {160, 60, 200},   // purple
    {40, 200, 200},   // cyan
    {250, 140, 20},   // orange
    {240, 240, 240},  // white
    {120, 70, 30},    // brown
}};

/// `labels` maps region id to concept index and must cover every region.
inline Raster render(const Scene& scene, const std::map<int, int>& labels) {
  Raster out(scene.width(), scene.height(), Rgb{0, 0, 0});
  for (const Region& r : scene.regions()) {
    auto it = labels.find(r.id);
    if (it == labels.end()) throw Error(ErrorKind::MissingInput, "no label for region " + std::to_string(r.id));
    if (it->second < 0 || it->second >= static_cast<int>(scene.vocabulary().size()))
      throw Error(ErrorKind::UnknownConcept, "label of region " + std::to_string(r.id) + " outside vocabulary");
    const Rgb color = kPalette[static_cast<std::size_t>(it->second) % kPalette.size()];
    r.mask.for_each_pixel([&](Pixel p) { out.at(p.x, p.y) = color; });
  }
  return out;
}

inline std::map<int, int> labels_from_predictions(const Scene& scene, const Predictions& predictions) {
  std::map<int, int> out;
  for (const Prediction& p : predictions) out[p.region_id] = scene.concept_index(p.label);
  return out;
}

inline std::map<int, int> labels_from_truth(const Scene& scene) {
  std::map<int, int> out;
  for (const Region& r : scene.regions())
    if (r.truth) out[r.id] = *r.truth;
  return out;
}

}  // namespace ctxlabel

#endif
