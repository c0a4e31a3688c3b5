#include <gtest/gtest.h>

#include <random>

#include "ovcd/error.hpp"
#include "ovcd/memory.hpp"
#include "ovcd/synthetic.hpp"
#include "random.hpp"

using namespace ovcd;

namespace {

// Returns a fixed result and records how it was called.
class FixedTracker final : public MaskPropagator {
 public:
  explicit FixedTracker(TrackResult r) : result_(std::move(r)) {}
  int max_sessions() const override { return 1; }
  TrackResult propagate(const BitMask&, std::span<const RasterImage> frames) const override {
    ++calls;
    last_frames = frames.size();
    if (fail) throw std::runtime_error("tracker down");
    return result_;
  }
  mutable int calls = 0;
  mutable std::size_t last_frames = 0;
  bool fail = false;

 private:
  TrackResult result_;
};

StableRegion region(int w, std::vector<std::int32_t> px, double alpha) {
  return {w, 1, std::move(px), alpha, Direction::Forward};
}

}  // namespace

TEST(Propagate, EmptyInitSkipsTracker) {
  FixedTracker t({BitMask(4, 4, true), ScalarMap(4, 4, 1.0f)});
  const auto seq = build_bridged_sequence(RasterImage(4, 4), RasterImage(4, 4), 3);
  const auto r = propagate(BitMask(4, 4), seq, t);
  EXPECT_EQ(t.calls, 0);
  EXPECT_TRUE(r.propagated_mask.none());
}

TEST(Propagate, PassesWholeSequenceAndWrapsFailures) {
  FixedTracker t({BitMask(4, 4, true), ScalarMap(4, 4, 1.0f)});
  const auto seq = build_bridged_sequence(RasterImage(4, 4), RasterImage(4, 4), 3,
                                          Direction::Backward);
  const auto r = propagate(BitMask(4, 4, true), seq, t);
  EXPECT_EQ(t.last_frames, 5u);
  EXPECT_EQ(r.direction, Direction::Backward);
  t.fail = true;
  EXPECT_THROW(propagate(BitMask(4, 4, true), seq, t), BackendError);
}

TEST(Propagate, InvalidTrackerOutputIsRejected) {
  FixedTracker t({BitMask(4, 4, true), ScalarMap(4, 4, 1.5f)});
  const auto seq = build_bridged_sequence(RasterImage(4, 4), RasterImage(4, 4), 1);
  EXPECT_THROW(propagate(BitMask(4, 4, true), seq, t), SchemaViolation);
}

TEST(StableRegions, SubsetOfBothMasksAndThresholded) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    PropagationResult prop{ovcd::testing::random_mask(rng, 24, 24, 0.6),
                           ovcd::testing::random_map(rng, 24, 24, 0.0f, 1.0f), Direction::Forward};
    const BitMask coarse = ovcd::testing::random_mask(rng, 24, 24, 0.6);
    const auto regions = extract_stable_regions(prop, coarse, 0.5);
    for (const auto& r : regions) {
      EXPECT_GE(r.alpha, 0.5);
      double sum = 0.0;
      for (auto p : r.pixels) {
        EXPECT_TRUE(prop.propagated_mask[p]);
        EXPECT_TRUE(coarse[p]);
        sum += prop.confidence[p];
      }
      EXPECT_NEAR(r.alpha, sum / r.pixels.size(), 1e-12);
    }
  }
}

TEST(StableRegions, LowConfidenceComponentDropped) {
  PropagationResult prop{BitMask(6, 1), ScalarMap(6, 1, 0.0f), Direction::Forward};
  for (int x : {0, 1, 4, 5}) prop.propagated_mask.set(x, 0);
  prop.confidence[0] = prop.confidence[1] = 0.9f;
  prop.confidence[4] = prop.confidence[5] = 0.2f;
  const auto regions = extract_stable_regions(prop, BitMask(6, 1, true), 0.5);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].pixels, (std::vector<std::int32_t>{0, 1}));
  EXPECT_NEAR(regions[0].alpha, 0.9, 1e-6);
}

TEST(PoolRegion, PixelWeightedCellMean) {
  // 4x1 image, stride 2: cells {0,1} -> 0 and {2,3} -> 1.
  FeatureMap f{2, 1, 1, 2, {10.0f, 20.0f}};
  EXPECT_EQ(pool_region_feature(region(4, {0, 1, 2}, 1.0), f), std::vector<double>{40.0 / 3.0});
  EXPECT_THROW(pool_region_feature(region(4, {}, 1.0), f), InvalidArgument);
}

TEST(AggregateExemplar, WeightedMeanMatchesBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 7, dim = 1 + trial % 5;
    std::vector<StableRegion> regions;
    std::vector<std::vector<double>> feats;
    for (int i = 0; i < n; ++i) {
      regions.push_back(region(1, {0}, 0.05 + u(rng)));
      std::vector<double> z(dim);
      for (auto& v : z) v = 4.0 * u(rng) - 2.0;
      feats.push_back(z);
    }
    const auto e = aggregate_exemplar(regions, feats, ExemplarFusion::Weighted);
    const auto eq = aggregate_exemplar(regions, feats, ExemplarFusion::Equal);
    ASSERT_TRUE(e && eq);
    for (int d = 0; d < dim; ++d) {
      double num = 0, den = 0, plain = 0;
      for (int i = 0; i < n; ++i) {
        num += regions[i].alpha * feats[i][d];
        den += regions[i].alpha;
        plain += feats[i][d];
      }
      EXPECT_NEAR(e->vector[d], num / den, 1e-9);
      EXPECT_NEAR(eq->vector[d], plain / n, 1e-9);
    }
  }
}

TEST(AggregateExemplar, SingleRegionIdentityAndEmpty) {
  const std::vector<StableRegion> one{region(1, {0}, 0.7)};
  const std::vector<std::vector<double>> z{{0.25, -1.5}};
  EXPECT_EQ(aggregate_exemplar(one, z, ExemplarFusion::Weighted)->vector, z[0]);
  EXPECT_EQ(aggregate_exemplar(one, z, ExemplarFusion::Equal)->vector, z[0]);
  EXPECT_FALSE(aggregate_exemplar({}, {}, ExemplarFusion::Weighted));
  const std::vector<StableRegion> zero{region(1, {0}, 0.0)};
  EXPECT_FALSE(aggregate_exemplar(zero, z, ExemplarFusion::Weighted));
}

TEST(BuildPrompt, ReplicationOnlyWithExemplar) {
  const QuerySpec q{"b", {"building", "house"}, std::nullopt};
  const PromptSpec text_only = build_prompt(q, std::nullopt, 4);
  EXPECT_EQ(text_only.replication, 0);
  EXPECT_EQ(text_only.token_count(), 2u);
  Exemplar e{{0.1, 0.2, 0.3}, 1.0, Direction::Forward};
  const PromptSpec with = build_prompt(q, e, 4);
  EXPECT_EQ(with.replication, 4);
  EXPECT_EQ(with.token_count(), 6u);
  EXPECT_THROW(build_prompt({"x", {}, std::nullopt}, e, 4), InvalidArgument);
}

TEST(SyntheticTracker, StaticSceneKeepsMask) {
  RasterImage img(10, 10, 120);
  const auto red = synthetic::hsv_to_rgb({20.0, 0.7, 0.8});
  BitMask init(10, 10);
  for (int y = 2; y < 6; ++y) {
    for (int x = 3; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = red[c];
      init.set(x, y);
    }
  }
  const auto seq = build_bridged_sequence(img, img, 3);
  const synthetic::SyntheticPropagator t;
  const auto r = propagate(init, seq, t);
  EXPECT_EQ(r.propagated_mask, init);
}
