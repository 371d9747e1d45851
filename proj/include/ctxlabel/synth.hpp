#ifndef CTXLABEL_SYNTH_HPP
#define CTXLABEL_SYNTH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/raster.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

/// SplitMix64 (Steele, Lea & Flood). State advances by 0x9E3779B97F4A7C15;
/// output mixes with multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB and
/// shifts 30/27/31. Doubles take the top 53 bits; normals use Box-Muller.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Inclusive range; modulo bias is below 2^-50 for the ranges used here.
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

inline const std::vector<std::string>& default_synth_vocabulary() {
  static const std::vector<std::string> v{"sky", "water", "grass", "boat", "building", "road"};
  return v;
}

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int scene_count = 100;
  int width = 64;
  int height = 48;
  double ambiguity = 0.0;  // 0: confusable pairs far apart in color, 1: identical color means
  std::vector<std::string> vocabulary = default_synth_vocabulary();

  void validate() const {
    if (scene_count < 1) throw Error(ErrorKind::InvalidArgument, "scene_count must be at least 1");
    if (!(ambiguity >= 0.0 && ambiguity <= 1.0)) throw Error(ErrorKind::InvalidArgument, "ambiguity must lie in [0, 1]");
    if (width < 32 || height < 24) throw Error(ErrorKind::InvalidArgument, "frame must be at least 32x24");
    for (const std::string& name : default_synth_vocabulary())
      if (std::find(vocabulary.begin(), vocabulary.end(), name) == vocabulary.end())
        throw Error(ErrorKind::UnknownConcept, "generator vocabulary must contain '" + name + "'");
  }
};

struct SyntheticScene {
  Scene scene;
  Raster raster;
};

namespace detail {

/// Mean HSV color of each grammar concept at zero ambiguity. Every concept
/// occupies its own histogram bin. Each confusable pair shares saturation and
/// value and sits 45 degrees either side of a hue bin center, so pulling the
/// pair together moves both means into that one bin.
inline Hsv concept_color(std::string_view name) {
  if (name == "sky") return {165.0, 0.5, 0.833};
  if (name == "water") return {255.0, 0.5, 0.833};
  if (name == "grass") return {45.0, 0.833, 0.5};
  if (name == "road") return {135.0, 0.833, 0.5};
  if (name == "boat") return {330.0, 0.833, 0.833};
  return {30.0, 0.5, 0.833};  // building
}

inline Hsv lerp(const Hsv& a, const Hsv& b, double t) {
  return {a.h + t * (b.h - a.h), a.s + t * (b.s - a.s), a.v + t * (b.v - a.v)};
}

/// Color mean after pulling the confusable partner closer by ambiguity / 2.
inline Hsv ambiguous_color(std::string_view name, double ambiguity) {
  const Hsv own = concept_color(name);
  std::string_view partner;
  if (name == "sky") partner = "water";
  else if (name == "water") partner = "sky";
  else if (name == "grass") partner = "road";
  else if (name == "road") partner = "grass";
  else return own;
  return lerp(own, concept_color(partner), ambiguity / 2.0);
}

inline constexpr Rgb kBackground{110, 110, 110};

}  // namespace detail

/// Scene `index` of the corpus. Layout: sky band on top; below it either a
/// water band with an optional boat strictly inside, or a grass band with an
/// optional building standing on it and a road strip beside the building.
inline SyntheticScene generate_scene(const GeneratorConfig& config, int index) {
  config.validate();
  SplitMix64 rng(SplitMix64::mix(config.seed ^ SplitMix64::mix(static_cast<std::uint64_t>(index) + 1)));
  const int w = config.width, h = config.height;
  auto concept_id = [&](std::string_view name) {
    return static_cast<int>(std::find(config.vocabulary.begin(), config.vocabulary.end(), name) - config.vocabulary.begin());
  };

  struct Part {
    std::string name;
    std::vector<Pixel> pixels;
  };
  std::vector<Part> parts;
  auto rect = [](int x0, int y0, int rw, int rh) {
    std::vector<Pixel> px;
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x) px.push_back({x, y});
    return px;
  };

  const int sky_h = rng.uniform_int(static_cast<int>(0.30 * h), static_cast<int>(0.45 * h));
  parts.push_back({"sky", rect(0, 0, w, sky_h)});

  if (rng.bernoulli(0.5)) {
    const int water_h = h - sky_h;
    std::vector<Pixel> water = rect(0, sky_h, w, water_h);
    if (rng.bernoulli(0.75)) {
      const int bw = rng.uniform_int(w / 8, w / 4);
      const int bh = rng.uniform_int(3, std::max(3, water_h / 3));
      const int bx = rng.uniform_int(2, w - 2 - bw);
      const int by = rng.uniform_int(sky_h + 2, h - 2 - bh);
      std::erase_if(water, [&](Pixel p) { return p.x >= bx && p.x < bx + bw && p.y >= by && p.y < by + bh; });
      parts.push_back({"water", std::move(water)});
      parts.push_back({"boat", rect(bx, by, bw, bh)});
    } else {
      parts.push_back({"water", std::move(water)});
    }
  } else {
    const int grass_top = rng.uniform_int(static_cast<int>(0.70 * h), static_cast<int>(0.80 * h));
    parts.push_back({"grass", rect(0, grass_top, w, h - grass_top)});
    const int band = grass_top - sky_h;
    const bool building = rng.bernoulli(0.8);
    int bx = 0, bw = 0;
    if (building) {
      bw = rng.uniform_int(w / 6, w / 3);
      const int bh = rng.uniform_int(std::max(3, band / 2), band);
      bx = rng.uniform_int(1, w - 1 - bw);
      parts.push_back({"building", rect(bx, grass_top - bh, bw, bh)});
    }
    if (rng.bernoulli(building ? 0.8 : 0.6)) {
      const int rh = rng.uniform_int(2, 4);
      const int rw = rng.uniform_int(w / 6, w / 3);
      int rx;
      if (!building) rx = rng.uniform_int(0, w - rw);
      else if (bx + bw + rw <= w) rx = bx + bw;
      else rx = bx - rw;
      parts.push_back({"road", rect(rx, grass_top - rh, rw, rh)});
    }
  }

  Raster raster(w, h, detail::kBackground);
  std::vector<Region> regions;
  int next_id = 1;
  for (Part& part : parts) {
    const Hsv mean = detail::ambiguous_color(part.name, config.ambiguity);
    const Hsv base{rng.normal(mean.h, 6.0), rng.normal(mean.s, 0.04), rng.normal(mean.v, 0.04)};
    // Value noise is a shared surface texture: its interior edges swamp the
    // boundary edges, so edge histograms do not identify a concept by shape.
    for (const Pixel& p : part.pixels)
      raster.at(p.x, p.y) = hsv_to_rgb({rng.normal(base.h, 2.0), rng.normal(base.s, 0.02), rng.normal(base.v, 0.06)});
    Region r;
    r.id = next_id++;
    r.mask = Mask::from_pixels(std::move(part.pixels));
    r.truth = concept_id(part.name);
    regions.push_back(std::move(r));
  }
  Scene bare(w, h, config.vocabulary, std::move(regions));
  Scene scene = bare.with_regions([&](Region& r) { r.features = extract_features(bare, r.id, &raster); });
  return {std::move(scene), std::move(raster)};
}

inline std::vector<SyntheticScene> generate_corpus(const GeneratorConfig& config) {
  config.validate();
  std::vector<SyntheticScene> out;
  out.reserve(static_cast<std::size_t>(config.scene_count));
  for (int i = 0; i < config.scene_count; ++i) out.push_back(generate_scene(config, i));
  return out;
}

}  // namespace ctxlabel

#endif
