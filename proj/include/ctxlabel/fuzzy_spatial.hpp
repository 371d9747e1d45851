#ifndef CTXLABEL_FUZZY_SPATIAL_HPP
#define CTXLABEL_FUZZY_SPATIAL_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "ctxlabel/error.hpp"
#include "ctxlabel/geometry.hpp"

namespace ctxlabel {

/// Sigmoid shapes of the distance and topology memberships.
struct FuzzyParams {
  double alpha1 = 20.0;  // crispness of near
  double beta1 = 0.25;   // near/far cutoff on d
  double alpha2 = 10.0;  // crispness of surrounded-by
  double beta2 = 0.6;    // surrounded-by cutoff on rho

  void validate() const {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha1 and alpha2 must be positive");
    if (!(beta1 >= 0.0 && beta1 <= 1.0) || !(beta2 >= 0.0 && beta2 <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "beta1 and beta2 must lie in [0, 1]");
  }
};

enum class Direction { Above, Below, Beside };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Above: return "ABOVE";
    case Direction::Below: return "BELOW";
    case Direction::Beside: return "BESIDE";
  }
  return "?";
}

struct DirectionalMemberships {
  double above = 0.0;
  double below = 0.0;
  double beside = 0.0;
};

/// Component order of a relation vector.
enum RelationComponent : std::size_t { kAbove = 0, kBelow = 1, kBeside = 2, kNear = 3, kSurrounded = 4 };
inline constexpr std::size_t kRelationSize = 5;
using Memberships = std::array<double, kRelationSize>;

/// Five fuzzy memberships of an ordered region pair plus the descriptors they came from.
struct RelationVector {
  Memberships mu{};
  Direction dominant = Direction::Beside;
  PairDescriptors descriptors;

  double above() const noexcept { return mu[kAbove]; }
  double below() const noexcept { return mu[kBelow]; }
  double beside() const noexcept { return mu[kBeside]; }
  double near() const noexcept { return mu[kNear]; }
  double surrounded() const noexcept { return mu[kSurrounded]; }
};

/// sin^2 split into above (0 < theta < pi) and below (-pi < theta < 0); cos^2 for beside.
inline DirectionalMemberships directional_memberships(double theta) {
  constexpr double pi = std::numbers::pi;
  const double s = std::sin(theta), c = std::cos(theta);
  DirectionalMemberships m;
  m.above = (theta > 0.0 && theta < pi) ? s * s : 0.0;
  m.below = (theta > -pi && theta < 0.0) ? s * s : 0.0;
  m.beside = c * c;
  return m;
}

inline double near_membership(double d, const FuzzyParams& p) {
  return 1.0 / (1.0 + std::exp(p.alpha1 * (d - p.beta1)));
}

inline double surrounded_membership(double rho, const FuzzyParams& p) {
  return 1.0 / (1.0 + std::exp(-p.alpha2 * (rho - p.beta2)));
}

/// Ties resolve in the order ABOVE, BELOW, BESIDE.
inline Direction dominant_direction(const DirectionalMemberships& m) {
  Direction best = Direction::Above;
  double value = m.above;
  if (m.below > value) {
    best = Direction::Below;
    value = m.below;
  }
  if (m.beside > value) best = Direction::Beside;
  return best;
}

inline RelationVector relation_vector(const PairDescriptors& desc, const FuzzyParams& params) {
  const DirectionalMemberships dir = directional_memberships(desc.theta);
  RelationVector r;
  r.mu = {dir.above, dir.below, dir.beside, near_membership(desc.d, params), surrounded_membership(desc.rho, params)};
  r.dominant = dominant_direction(dir);
  r.descriptors = desc;
  return r;
}

/// Relation vectors for every ordered pair of a scene, row-major k x k (diagonal left default).
inline std::vector<RelationVector> scene_relations(const SceneGeometry& geometry, const FuzzyParams& params) {
  const std::size_t k = geometry.size();
  std::vector<RelationVector> out(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) out[i * k + j] = relation_vector(geometry.descriptors(i, j), params);
  return out;
}

}  // namespace ctxlabel

#endif
