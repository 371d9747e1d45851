#include <gtest/gtest.h>

#include <algorithm>

#include "ctxlabel/context_model.hpp"
#include "ctxlabel/synth.hpp"
#include "test_support.hpp"

namespace ctxlabel {
namespace {

using testing::block;

const std::vector<std::string> kVocab{"sky", "water", "boat"};

/// Horizontal strips, one per listed concept, top to bottom.
Scene strips(const std::vector<int>& concepts) {
  std::vector<Region> regions;
  int id = 1;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    Region r;
    r.id = id++;
    r.mask = Mask::rectangle(0, static_cast<int>(2 * i), 6, 2);
    r.truth = concepts[i];
    regions.push_back(std::move(r));
  }
  return Scene(6, static_cast<int>(2 * concepts.size()), kVocab, std::move(regions));
}

TEST(TrainContext, PriorIsRegionFrequency) {
  // 10 regions over two scenes, 3 of them sky
  const ContextModel m = train_context({strips({0, 1, 1, 1, 2}), strips({0, 0, 1, 2, 2})}, FuzzyParams{});
  EXPECT_DOUBLE_EQ(m.prior(0), 0.3);
  EXPECT_DOUBLE_EQ(m.prior(1), 0.4);
  EXPECT_DOUBLE_EQ(m.prior(2), 0.3);
}

TEST(TrainContext, CooccurrenceCountsPresencePerImage) {
  const ContextModel m = train_context({strips({0, 1}), strips({0, 1, 2})}, FuzzyParams{});
  EXPECT_DOUBLE_EQ(m.cooc(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.cooc(0, 2), 0.25);
  EXPECT_DOUBLE_EQ(m.cooc(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(m.cooc(2, 1), 0.25);
  EXPECT_EQ(m.cooc(0, 0), 0.0);
}

TEST(TrainContext, RepeatedConceptPairsWithItselfOnce) {
  // three sky regions and one water: {sky,sky} once and {sky,water} once
  const ContextModel m = train_context({strips({0, 0, 0, 1})}, FuzzyParams{});
  EXPECT_DOUBLE_EQ(m.cooc(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.cooc(0, 1), 0.5);
  EXPECT_EQ(m.relation(0, 0).count, 6u);
  EXPECT_EQ(m.relation(0, 1).count, 3u);
  EXPECT_EQ(m.relation(1, 0).count, 3u);
}

TEST(TrainContext, SinglePairMeanIsThatPair) {
  std::vector<Region> regions(2);
  regions[0].id = 1;
  regions[0].truth = 1;
  std::vector<Pixel> water;
  for (auto [x, y] : block(0, 0, 8, 8))
    if (!(x >= 3 && x < 5 && y >= 3 && y < 5)) water.push_back({x, y});
  regions[0].mask = Mask::from_pixels(water);
  regions[1].id = 2;
  regions[1].truth = 2;
  regions[1].mask = Mask::rectangle(3, 3, 2, 2);
  const Scene s(8, 8, kVocab, regions);
  const ContextModel m = train_context({s}, FuzzyParams{});
  const RelationVector expected = relation_vector(pair_descriptors(s, 2, 1), FuzzyParams{});
  ASSERT_NE(m.mean_relation(2, 1), nullptr);
  EXPECT_EQ(*m.mean_relation(2, 1), expected.mu);
  EXPECT_GT(expected.surrounded(), 0.98);  // boat fully inside water
  EXPECT_EQ(m.relation(2, 1).count, 1u);
}

TEST(TrainContext, Errors) {
  EXPECT_THROW(train_context({}, FuzzyParams{}), Error);
  Scene no_truth = strips({0, 1}).with_regions([](Region& r) { r.truth.reset(); });
  try {
    train_context({no_truth}, FuzzyParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingInput);
  }
}

TEST(Lookup, TrainedUnseenAndUnknown) {
  const ContextModel m = train_context({strips({0, 1})}, FuzzyParams{});
  const ContextEntry seen = lookup(m, "sky", "water");
  EXPECT_DOUBLE_EQ(seen.cooc, 1.0);
  ASSERT_TRUE(seen.mean.has_value());
  EXPECT_EQ(*seen.mean, m.relation(0, 1).mu);

  const ContextEntry unseen = lookup(m, "sky", "boat");
  EXPECT_EQ(unseen.cooc, 0.0);
  EXPECT_FALSE(unseen.mean.has_value());

  try {
    lookup(m, "sky", "plane");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownConcept);
  }
}

class CorpusContext : public ::testing::Test {
 protected:
  static std::vector<Scene> corpus(std::uint64_t seed, int n) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.scene_count = n;
    cfg.ambiguity = 0.5;
    std::vector<Scene> out;
    for (const auto& s : generate_corpus(cfg)) out.push_back(s.scene);
    return out;
  }
};

TEST_F(CorpusContext, NormalizationsHold) {
  const ContextModel m = train_context(corpus(3, 40), FuzzyParams{});
  double prior = 0, cooc = 0;
  for (int l = 0; l < int(m.size()); ++l) {
    prior += m.prior(l);
    for (int k = l; k < int(m.size()); ++k) {
      cooc += m.cooc(l, k);
      EXPECT_EQ(m.cooc(l, k), m.cooc(k, l));
      EXPECT_GE(m.cooc(l, k), 0.0);
    }
  }
  EXPECT_NEAR(prior, 1.0, 1e-9);
  EXPECT_NEAR(cooc, 1.0, 1e-9);
}

TEST_F(CorpusContext, OrderIndependent) {
  std::vector<Scene> scenes = corpus(8, 30);
  const ContextModel reference = train_context(scenes, FuzzyParams{});
  SplitMix64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = scenes.size() - 1; i > 0; --i)
      std::swap(scenes[i], scenes[static_cast<std::size_t>(rng.uniform_int(0, int(i)))]);
    EXPECT_EQ(train_context(scenes, FuzzyParams{}), reference);
  }
}

TEST_F(CorpusContext, MeansStayWithinSampleRange) {
  const std::vector<Scene> scenes = corpus(21, 30);
  const ContextModel m = train_context(scenes, FuzzyParams{});
  const std::size_t n = m.size();
  std::vector<Memberships> lo(n * n), hi(n * n);
  std::vector<bool> seen(n * n, false);
  for (const Scene& s : scenes) {
    const SceneGeometry g(s);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i == j) continue;
        const auto mu = relation_vector(g.descriptors(i, j), FuzzyParams{}).mu;
        const std::size_t p = std::size_t(*s.regions()[i].truth) * n + std::size_t(*s.regions()[j].truth);
        for (std::size_t c = 0; c < kRelationSize; ++c) {
          lo[p][c] = seen[p] ? std::min(lo[p][c], mu[c]) : mu[c];
          hi[p][c] = seen[p] ? std::max(hi[p][c], mu[c]) : mu[c];
        }
        seen[p] = true;
      }
  }
  for (std::size_t p = 0; p < n * n; ++p) {
    const Memberships* mean = m.mean_relation(int(p / n), int(p % n));
    EXPECT_EQ(mean != nullptr, bool(seen[p]));
    if (!mean) continue;
    for (std::size_t c = 0; c < kRelationSize; ++c) {
      EXPECT_GE((*mean)[c], lo[p][c]);
      EXPECT_LE((*mean)[c], hi[p][c]);
    }
  }
}

TEST_F(CorpusContext, FileRoundTrip) {
  const ContextModel m = train_context(corpus(4, 20), FuzzyParams{});
  const std::string text = serialize_context_model(m);
  const ContextModel back = parse_context_model(text);
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_context_model(back), text);
}

TEST(ParseContextModel, RejectsBadDocuments) {
  EXPECT_THROW(parse_context_model(R"({"vocabulary":["a","b"],"prior":{"a":1},"cooc":[[0,1],[0,0]],"mean_relation":{}})"), Error);
  EXPECT_THROW(parse_context_model(R"({"vocabulary":["a"],"prior":{"a":1},"cooc":[[1]],"mean_relation":{"a-a":{"count":1,"mu":[0,0,0,0,0]}}})"), Error);
  EXPECT_THROW(parse_context_model(R"({"vocabulary":["a"],"prior":{"z":1},"cooc":[[1]],"mean_relation":{}})"), Error);
  EXPECT_NO_THROW(parse_context_model(R"({"vocabulary":["a"],"prior":{"a":1},"cooc":[[1]],"mean_relation":{"a|a":{"count":2,"mu":[0,0,1,1,0]}}})"));
}

}  // namespace
}  // namespace ctxlabel
