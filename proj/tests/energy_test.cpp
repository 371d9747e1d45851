#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ctxlabel/energy.hpp"
#include "test_support.hpp"

namespace ctxlabel {
namespace {

constexpr double kPi = std::numbers::pi;

FuzzyLabelSet label_set(std::vector<double> beliefs, std::vector<int> cands) {
  return FuzzyLabelSet{std::move(cands), std::move(beliefs)};
}

std::shared_ptr<ContextModel> uniform_model(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n; ++c) names.push_back("c" + std::to_string(c));
  auto m = std::make_shared<ContextModel>(names);
  for (std::size_t c = 0; c < n; ++c) m->set_prior(int(c), 1.0 / double(n));
  return m;
}

RelationVector rel(double theta, double d, double rho) { return relation_vector({theta, d, rho}, FuzzyParams{}); }

/// Relations for k regions where every ordered pair gets the same vector.
std::vector<RelationVector> flat_relations(std::size_t k, const RelationVector& r) {
  std::vector<RelationVector> out(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) out[i * k + j] = r;
  return out;
}

TEST(AssociationPotential, WorkedExample) {
  auto m = uniform_model(2);
  m->set_prior(0, 0.1);
  m->set_prior(1, 0.9);
  const LabelingInstance inst({label_set({0.8, 0.2}, {0, 1})}, {RelationVector{}}, m, EnergyParams{});
  EXPECT_NEAR(association_potential(inst, 0, 0), 1.15, 1e-15);
  EXPECT_EQ(association_potential(inst.with_params({0.0, 0.0, 0.8}), 0, 1), 0.0);
  EXPECT_THROW(association_potential(inst.with_top_n(1), 0, 1), Error);
}

TEST(SpatialInteraction, DistanceRule) {
  auto m = uniform_model(2);
  const RelationVector r = rel(kPi / 2, 0.1, 0.2);
  EXPECT_EQ(spatial_interaction(*m, 0, 1, r), 0.0);  // unseen
  m->set_relation(0, 1, MeanRelation{3, r.mu});
  EXPECT_EQ(spatial_interaction(*m, 0, 1, r), 1.0);

  m->set_relation(1, 0, MeanRelation{1, {1, 0, 0, 0.5, 0.5}});
  RelationVector far;
  far.mu = {0, 0, 1, 0.5, 0.5};
  EXPECT_EQ(spatial_interaction(*m, 1, 0, far), 0.0);  // 1 - sqrt(2) clamps

  RelationVector close;
  close.mu = {1, 0, 0, 0.5, 0.2};
  EXPECT_NEAR(spatial_interaction(*m, 1, 0, close), 0.7, 1e-15);
}

TEST(ConfigurationPotential, WorkedExamples) {
  const RelationVector r = rel(0.3, 0.05, 0.1);
  auto m = uniform_model(2);
  m->set_relation(0, 1, MeanRelation{1, r.mu});
  m->set_cooc(0, 1, 0.25);
  m->set_cooc(0, 0, 0.5);
  const LabelingInstance inst({label_set({0.6, 0.4}, {0, 1}), label_set({0.3, 0.7}, {1, 0})}, flat_relations(2, r), m,
                              EnergyParams{});
  EXPECT_NEAR(configuration_potential(inst, 0, 0, 1, 1), 0.95, 1e-15);
  // unseen (0, 0) relation: only the co-occurrence term with belief 0.6
  EXPECT_NEAR(configuration_potential(inst, 0, 0, 1, 0), 0.3, 1e-15);
  EXPECT_EQ(configuration_potential(inst.with_params({1.4, 0.3, 0.0}), 1, 1, 0, 1), 0.0);
  EXPECT_THROW(configuration_potential(inst, 0, 0, 0, 0), Error);
}

TEST(TotalEnergy, SingleRegionIsNegatedUnary) {
  auto m = uniform_model(2);
  m->set_prior(0, 0.1);
  m->set_prior(1, 0.9);
  const LabelingInstance inst({label_set({0.8, 0.2}, {0, 1})}, {RelationVector{}}, m, EnergyParams{});
  EXPECT_NEAR(total_energy(inst, {0}), -1.15, 1e-15);
  EXPECT_EQ(total_energy(inst.with_params({0, 0, 0}), {0}), 0.0);
  EXPECT_THROW(total_energy(inst, {0, 0}), Error);
}

TEST(TotalEnergy, TwoRegionHandSum) {
  const RelationVector r01 = rel(kPi / 2, 0.0, 0.0), r10 = rel(-kPi / 2, 0.0, 0.0);
  auto m = uniform_model(2);
  m->set_prior(0, 0.7);
  m->set_prior(1, 0.3);
  m->set_cooc(0, 1, 0.4);
  m->set_relation(0, 1, MeanRelation{1, r01.mu});
  const LabelingInstance inst({label_set({0.9, 0.1}, {0, 1}), label_set({0.2, 0.8}, {1, 0})}, {{}, r01, r10, {}}, m,
                              EnergyParams{});
  // unary: 1.4*0.9 + 0.3*0.7 = 1.47 and 1.4*0.8 + 0.3*0.3 = 1.21
  // (0,1): 0.8*1 + 0.4*0.9 = 1.16; (1,0): unseen relation, 0.4*0.8 = 0.32
  EXPECT_NEAR(total_energy(inst, {0, 1}), -(1.47 + 1.21 + 1.16 + 0.32), 1e-12);
}

TEST(Icm, SingleRegionTakesBestUnary) {
  auto m = uniform_model(2);
  m->set_prior(0, 0.9);
  m->set_prior(1, 0.1);
  // belief prefers 1, but the prior tips the unary score to 0: 0.90 vs 0.80
  const LabelingInstance inst({label_set({0.45, 0.55}, {1, 0})}, {RelationVector{}}, m, EnergyParams{});
  EXPECT_EQ(appearance_labeling(inst).labels, std::vector<int>{1});
  EXPECT_EQ(icm(inst).labels, std::vector<int>{0});
  EXPECT_EQ(icm(inst), exhaustive_min(inst));
}

TEST(Icm, NoPairwiseTermsKeepsAppearance) {
  const LabelingInstance base = testing::random_instance(11, 4, 5, 3);
  auto m = std::make_shared<ContextModel>(base.context());
  for (int l = 0; l < int(m->size()); ++l) {
    m->set_prior(l, 1.0 / double(m->size()));
    for (int k = l; k < int(m->size()); ++k) m->set_cooc(l, k, 0.0);
  }
  std::vector<FuzzyLabelSet> labels;
  std::vector<RelationVector> relations;
  for (std::size_t i = 0; i < base.size(); ++i) {
    labels.push_back(base.labels(i));
    for (std::size_t j = 0; j < base.size(); ++j) relations.push_back(i == j ? RelationVector{} : base.relation(i, j));
  }
  const LabelingInstance inst(labels, relations, m, {1.4, 0.3, 0.0});
  EXPECT_EQ(icm(inst).labels, appearance_labeling(inst).labels);
}

// Region 0 weakly prefers 0 on appearance, but (1, 0) matches both learned
// mean relations exactly. E: (0,0) -1.98, (0,1) -1.70, (1,0) -3.30, (1,1) -1.42.
TEST(Icm, ContextOverridesWeakAppearance) {
  const RelationVector up = rel(kPi / 2, 0.0, 0.0), down = rel(-kPi / 2, 0.0, 0.0);
  auto m = uniform_model(2);
  m->set_relation(1, 0, MeanRelation{1, up.mu});
  m->set_relation(0, 1, MeanRelation{1, down.mu});
  const LabelingInstance inst({label_set({0.6, 0.4}, {0, 1}), label_set({0.6, 0.4}, {0, 1})}, {{}, up, down, {}}, m,
                              EnergyParams{});
  EXPECT_NEAR(total_energy(inst, {0, 0}), -1.98, 1e-12);
  EXPECT_NEAR(total_energy(inst, {0, 1}), -1.70, 1e-12);
  EXPECT_NEAR(total_energy(inst, {1, 0}), -3.30, 1e-12);
  EXPECT_NEAR(total_energy(inst, {1, 1}), -1.42, 1e-12);
  const IcmResult r = icm_traced(inst);
  EXPECT_EQ(r.assignment.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(r.sweeps, 2);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.assignment, exhaustive_min(inst));
}

TEST(Icm, RejectsZeroSweeps) {
  EXPECT_THROW(icm(testing::random_instance(1, 2, 3, 2), 0), Error);
}

// Three regions with two candidates each; the oracle re-derives every energy
// from the raw tables without going through the potential functions.
TEST(ExhaustiveMin, ThreeByTwoEnumeration) {
  const std::vector<double> prior{0.2, 0.5, 0.3};
  const double cooc[3][3] = {{0.1, 0.3, 0.0}, {0.3, 0.0, 0.2}, {0.0, 0.2, 0.2}};
  const std::vector<std::vector<double>> belief{{0.5, 0.3, 0.2}, {0.1, 0.6, 0.3}, {0.4, 0.15, 0.45}};
  const std::vector<std::vector<int>> cands{{0, 1}, {1, 2}, {2, 0}};
  auto m = uniform_model(3);
  for (int c = 0; c < 3; ++c) m->set_prior(c, prior[std::size_t(c)]);
  for (int l = 0; l < 3; ++l)
    for (int k = l; k < 3; ++k) m->set_cooc(l, k, cooc[l][k]);
  const Memberships mean12{0.2, 0.0, 0.8, 0.9, 0.1};
  m->set_relation(1, 2, MeanRelation{2, mean12});
  RelationVector r;
  r.mu = {0.2, 0.0, 0.8, 0.5, 0.1};  // distance 0.4 from mean12
  std::vector<FuzzyLabelSet> labels;
  for (std::size_t i = 0; i < 3; ++i) labels.push_back(label_set(belief[i], cands[i]));
  const EnergyParams p{1.4, 0.3, 0.8};
  const LabelingInstance inst(labels, flat_relations(3, r), m, p);

  auto oracle = [&](const std::vector<int>& a) {
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto c = std::size_t(a[i]);
      s += p.alpha * belief[i][c] + p.beta * prior[c];
      for (std::size_t j = 0; j < 3; ++j) {
        if (j == i) continue;
        const auto d = std::size_t(a[j]);
        s += cooc[c][d] * belief[i][c];
        if (c == 1 && d == 2) s += p.delta * 0.6;
      }
    }
    return -s;
  };
  double best = 1e9;
  std::vector<int> best_labels;
  for (int a0 : {0, 1})
    for (int a1 : {1, 2})
      for (int a2 : {0, 2}) {
        const std::vector<int> a{a0, a1, a2};
        EXPECT_NEAR(total_energy(inst, a), oracle(a), 1e-12);
        if (oracle(a) < best - 1e-12) best = oracle(a), best_labels = a;
      }
  const Assignment ex = exhaustive_min(inst);
  EXPECT_EQ(ex.labels, best_labels);
  EXPECT_NEAR(ex.energy, best, 1e-12);
  EXPECT_LE(ex.energy, icm(inst).energy);
}

TEST(ExhaustiveMin, TiesGoToSmallestSequence) {
  auto m = uniform_model(3);
  const LabelingInstance inst({label_set({0.2, 0.3, 0.5}, {2, 1}), label_set({0.5, 0.5, 0.0}, {1, 0})},
                              flat_relations(2, RelationVector{}), m, {0.0, 0.0, 0.0});
  EXPECT_EQ(exhaustive_min(inst).labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(icm(inst).labels, (std::vector<int>{1, 0}));
}

TEST(ExhaustiveMin, GuardRejectsHugeSpaces) {
  auto m = uniform_model(8);
  std::vector<FuzzyLabelSet> labels(7, fuzzy_memberships(std::vector<double>(8, 0.5)));
  const LabelingInstance inst(labels, flat_relations(7, RelationVector{}), m, EnergyParams{});
  try {
    exhaustive_min(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SearchSpace);
  }
  EXPECT_NO_THROW(exhaustive_min(inst.with_top_n(2)));
}

TEST(LabelingInstance, Validation) {
  auto m = uniform_model(2);
  EXPECT_THROW(LabelingInstance({label_set({0.5, 0.5}, {0, 1})}, {}, m, EnergyParams{}), Error);
  EXPECT_THROW(LabelingInstance({label_set({1.0}, {0})}, {RelationVector{}}, m, EnergyParams{}), Error);
  EXPECT_THROW(LabelingInstance({label_set({0.5, 0.5}, {})}, {RelationVector{}}, m, EnergyParams{}), Error);
  EXPECT_THROW(LabelingInstance({label_set({0.5, 0.5}, {0})}, {RelationVector{}}, nullptr, EnergyParams{}), Error);
  EXPECT_THROW(LabelingInstance({label_set({0.5, 0.5}, {0})}, {RelationVector{}}, m, {NAN, 0, 0}), Error);
}

TEST(EnergyProperties, RandomInstances) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const std::size_t k = 1 + seed % 5;
    const LabelingInstance inst = testing::random_instance(seed, k, 5, 3);
    const Assignment start = appearance_labeling(inst);
    const IcmResult r = icm_traced(inst);
    const Assignment ex = exhaustive_min(inst);

    EXPECT_LE(ex.energy, r.assignment.energy + 1e-12) << seed;
    EXPECT_LE(r.assignment.energy, start.energy + 1e-12) << seed;
    EXPECT_TRUE(testing::is_one_opt(inst, r.assignment.labels)) << seed;
    EXPECT_NEAR(r.assignment.energy, total_energy(inst, r.assignment.labels), 1e-9);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.sweeps, kDefaultMaxSweeps);
    double prev = start.energy;
    for (double e : r.sweep_energies) {
      EXPECT_LE(e, prev + 1e-12) << seed;
      prev = e;
    }
    EXPECT_EQ(icm(inst), r.assignment);

    const LabelingInstance single = inst.with_top_n(1);
    EXPECT_EQ(icm(single).labels, appearance_labeling(single).labels);
    EXPECT_EQ(icm(single).labels, start.labels);
  }
}

TEST(EnergyProperties, AffineInEachWeight) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const LabelingInstance inst = testing::random_instance(seed, 4, 4, 3);
    const std::vector<int> labels = icm(inst).labels;
    const EnergyParams p = inst.params();
    auto at = [&](EnergyParams q) { return total_energy(inst.with_params(q), labels); };
    for (int w = 0; w < 3; ++w) {
      auto shifted = [&](double h) {
        EnergyParams q = p;
        (w == 0 ? q.alpha : w == 1 ? q.beta : q.delta) += h;
        return at(q);
      };
      const double e0 = shifted(0.0), e1 = shifted(0.5), e2 = shifted(1.0), e3 = shifted(-2.0);
      EXPECT_NEAR(e1 - e0, e2 - e1, 1e-12);
      EXPECT_NEAR(e3 - e0, -4.0 * (e1 - e0), 1e-12);
    }
  }
}

}  // namespace
}  // namespace ctxlabel
