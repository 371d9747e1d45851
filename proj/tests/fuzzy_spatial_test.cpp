#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ctxlabel/fuzzy_spatial.hpp"
#include "ctxlabel/synth.hpp"

namespace ctxlabel {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(DirectionalMemberships, ReferenceAngles) {
  auto m = directional_memberships(kPi / 2);
  EXPECT_NEAR(m.above, 1.0, 1e-15);
  EXPECT_EQ(m.below, 0.0);
  EXPECT_NEAR(m.beside, 0.0, 1e-15);

  m = directional_memberships(0.0);
  EXPECT_EQ(m.above, 0.0);
  EXPECT_EQ(m.below, 0.0);
  EXPECT_EQ(m.beside, 1.0);

  m = directional_memberships(kPi / 4);
  EXPECT_NEAR(m.above, 0.5, 1e-15);
  EXPECT_EQ(m.below, 0.0);
  EXPECT_NEAR(m.beside, 0.5, 1e-15);

  m = directional_memberships(-kPi / 3);
  EXPECT_EQ(m.above, 0.0);
  EXPECT_NEAR(m.below, 0.75, 1e-15);
  EXPECT_NEAR(m.beside, 0.25, 1e-15);
}

TEST(DirectionalMemberships, BoundaryAnglesHaveNoVerticalComponent) {
  for (double theta : {0.0, kPi}) {
    const auto m = directional_memberships(theta);
    EXPECT_EQ(m.above, 0.0);
    EXPECT_EQ(m.below, 0.0);
    EXPECT_NEAR(m.beside, 1.0, 1e-15);
  }
}

TEST(NearMembership, ReferenceValues) {
  const FuzzyParams p;
  EXPECT_EQ(near_membership(0.25, p), 0.5);
  EXPECT_NEAR(near_membership(0.0, p), 0.9933071490757152, 1e-15);
  EXPECT_NEAR(near_membership(1.0, p), 3.059022269256247e-07, 1e-20);
}

TEST(SurroundedMembership, ReferenceValues) {
  const FuzzyParams p;
  EXPECT_EQ(surrounded_membership(0.6, p), 0.5);
  EXPECT_NEAR(surrounded_membership(1.0, p), 0.9820137900379085, 1e-15);
  EXPECT_NEAR(surrounded_membership(0.0, p), 0.0024726231566347743, 1e-17);
}

TEST(RelationVector, Composition) {
  const RelationVector r = relation_vector({kPi / 2, 0.25, 0.6}, FuzzyParams{});
  EXPECT_NEAR(r.above(), 1.0, 1e-15);
  EXPECT_EQ(r.below(), 0.0);
  EXPECT_NEAR(r.beside(), 0.0, 1e-15);
  EXPECT_EQ(r.near(), 0.5);
  EXPECT_EQ(r.surrounded(), 0.5);
  EXPECT_EQ(r.dominant, Direction::Above);

  const RelationVector flat = relation_vector({0.0, 0.0, 0.0}, FuzzyParams{});
  EXPECT_EQ(flat.beside(), 1.0);
  EXPECT_EQ(flat.dominant, Direction::Beside);

  EXPECT_EQ(relation_vector({-kPi / 2, 0.5, 0.1}, FuzzyParams{}).dominant, Direction::Below);
}

TEST(RelationVector, TieBreakPrefersAbove) {
  // sin^2 = cos^2 at pi/4 up to rounding; force an exact tie directly.
  EXPECT_EQ(dominant_direction({0.5, 0.0, 0.5}), Direction::Above);
  EXPECT_EQ(dominant_direction({0.0, 0.5, 0.5}), Direction::Below);
  EXPECT_EQ(dominant_direction({0.0, 0.0, 0.0}), Direction::Above);
}

TEST(FuzzyParams, Validation) {
  EXPECT_NO_THROW(FuzzyParams{}.validate());
  EXPECT_THROW((FuzzyParams{0.0, 0.25, 10.0, 0.6}.validate()), Error);
  EXPECT_THROW((FuzzyParams{20.0, 1.5, 10.0, 0.6}.validate()), Error);
}

TEST(FuzzyProperties, RandomAngles) {
  SplitMix64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double theta = kPi - rng.uniform() * 2 * kPi;  // (-pi, pi]
    const auto m = directional_memberships(theta);
    EXPECT_FALSE(m.above > 0.0 && m.below > 0.0);
    const double vertical = m.above + m.below;
    if (theta != 0.0 && theta != kPi) {
      EXPECT_NEAR(vertical + m.beside, 1.0, 1e-12);
    }
    const auto swapped = directional_memberships(normalize_angle(theta + kPi));
    EXPECT_NEAR(m.above, swapped.below, 1e-12);
    EXPECT_NEAR(m.below, swapped.above, 1e-12);
    EXPECT_NEAR(m.beside, swapped.beside, 1e-12);
    for (double x : {m.above, m.below, m.beside}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(FuzzyProperties, SigmoidsAreMonotone) {
  const FuzzyParams p;
  double prev_near = 2.0, prev_sur = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    const double n = near_membership(x, p), s = surrounded_membership(x, p);
    EXPECT_LT(n, prev_near);
    EXPECT_GT(s, prev_sur);
    EXPECT_GE(n, 0.0);
    EXPECT_LE(s, 1.0);
    prev_near = n;
    prev_sur = s;
  }
}

}  // namespace
}  // namespace ctxlabel
