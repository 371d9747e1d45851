#ifndef CTXLABEL_GEOMETRY_HPP
#define CTXLABEL_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "ctxlabel/error.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct RegionGeometry {
  Point2 centroid;
  std::vector<Pixel> boundary;  // mask pixels with a 4-neighbor outside the mask
  int perimeter = 0;            // exposed pixel edges, frame border included
};

/// Raw spatial descriptors of an ordered region pair (i, j).
struct PairDescriptors {
  double theta = 0.0;  // (-pi, pi]; +pi/2 means j is directly above i on screen
  double d = 0.0;      // boundary gap over the image diagonal, [0, 1]
  double rho = 0.0;    // share of i's perimeter bordering j, [0, 1]
};

/// Maps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double pi = std::numbers::pi;
  a = std::fmod(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  if (a > pi) a -= 2.0 * pi;
  return a;
}

/// Per-scene geometry cache: pixel ownership, per-region geometry and
/// shared-edge counts. Built once, then queried for any ordered pair.
class SceneGeometry {
 public:
  explicit SceneGeometry(const Scene& scene)
      : width_(scene.width()), height_(scene.height()), diagonal_(scene.diagonal()), k_(scene.size()),
        owner_(static_cast<std::size_t>(width_) * height_, -1), shared_(k_ * k_, 0) {
    for (std::size_t i = 0; i < k_; ++i)
      scene.regions()[i].mask.for_each_pixel([&](Pixel p) { owner_[cell(p.x, p.y)] = static_cast<int>(i); });

    regions_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      RegionGeometry& g = regions_[i];
      double sx = 0.0, sy = 0.0;
      std::size_t n = 0;
      scene.regions()[i].mask.for_each_pixel([&](Pixel p) {
        sx += p.x;
        sy += p.y;
        ++n;
        bool on_boundary = false;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int e = 0; e < 4; ++e) {
          const int nx = p.x + dx[e], ny = p.y + dy[e];
          const int other = inside(nx, ny) ? owner_[cell(nx, ny)] : -1;
          if (other == static_cast<int>(i)) continue;
          on_boundary = true;
          ++g.perimeter;
          if (other >= 0) ++shared_[i * k_ + static_cast<std::size_t>(other)];
        }
        if (on_boundary) g.boundary.push_back(p);
      });
      g.centroid = {sx / static_cast<double>(n), sy / static_cast<double>(n)};
    }
  }

  std::size_t size() const noexcept { return k_; }
  double diagonal() const noexcept { return diagonal_; }

  /// Geometry of the region at position `i` in the scene's region list.
  const RegionGeometry& region(std::size_t i) const { return regions_.at(i); }

  /// Number of exposed edges of region `i` whose outside neighbor belongs to `j`.
  int shared_edges(std::size_t i, std::size_t j) const { return shared_.at(i * k_ + j); }

  /// Smallest pixel-center distance between the boundaries of `i` and `j`.
  double min_boundary_distance(std::size_t i, std::size_t j) const {
    long best = std::numeric_limits<long>::max();
    for (const Pixel& a : regions_.at(i).boundary) {
      for (const Pixel& b : regions_.at(j).boundary) {
        const long dx = a.x - b.x, dy = a.y - b.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      if (best <= 1) break;  // disjoint pixels cannot be closer than one
    }
    return std::sqrt(static_cast<double>(best));
  }

  /// Descriptors of the ordered pair at positions (i, j).
  PairDescriptors descriptors(std::size_t i, std::size_t j) const {
    if (i == j) throw Error(ErrorKind::InvalidArgument, "pair descriptors need two distinct regions");
    const Point2 ci = regions_.at(i).centroid, cj = regions_.at(j).centroid;
    PairDescriptors out;
    out.theta = normalize_angle(std::atan2(ci.y - cj.y, cj.x - ci.x));
    // Touching pixels sit one unit apart; the gap is measured from there.
    const double gap = std::max(0.0, min_boundary_distance(i, j) - 1.0);
    out.d = std::min(1.0, gap / diagonal_);
    out.rho = static_cast<double>(shared_edges(i, j)) / static_cast<double>(regions_[i].perimeter);
    return out;
  }

 private:
  bool inside(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t cell(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  double diagonal_;
  std::size_t k_;
  std::vector<int> owner_;
  std::vector<int> shared_;
  std::vector<RegionGeometry> regions_;
};

inline RegionGeometry region_geometry(const Scene& scene, int id) {
  const std::size_t i = scene.index_of(id);
  return SceneGeometry(scene).region(i);
}

inline PairDescriptors pair_descriptors(const Scene& scene, int id_i, int id_j) {
  if (id_i == id_j) throw Error(ErrorKind::InvalidArgument, "pair descriptors need i != j");
  const std::size_t i = scene.index_of(id_i), j = scene.index_of(id_j);
  return SceneGeometry(scene).descriptors(i, j);
}

}  // namespace ctxlabel

#endif
