#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ovcd/decode.hpp"
#include "ovcd/error.hpp"
#include "random.hpp"

using namespace ovcd;

namespace {

void fill_rect(BitMask& m, int x0, int y0, int w, int h) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) m.set(x, y);
  }
}

ScalarMap logits_from(const BitMask& m) {
  ScalarMap out(m.width(), m.height(), -1.0f);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out[i] = 1.0f;
  }
  return out;
}

// Direct pairwise overlap check over pixel sets.
BitMask oracle_change(const InstanceSet& a, const InstanceSet& b, double theta) {
  std::vector<char> ma(a.instances.size()), mb(b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    const std::set<std::int32_t> pa(a.instances[i].pixels.begin(), a.instances[i].pixels.end());
    for (std::size_t j = 0; j < b.instances.size(); ++j) {
      std::size_t inter = 0;
      for (std::int32_t p : b.instances[j].pixels) inter += pa.count(p);
      if (inter == 0) continue;
      const double ra = double(inter) / double(a.instances[i].area);
      const double rb = double(inter) / double(b.instances[j].area);
      if (ra >= theta || rb >= theta) ma[i] = mb[j] = 1;
    }
  }
  BitMask out(a.width, a.height);
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    if (!ma[i]) {
      for (auto p : a.instances[i].pixels) out.set(static_cast<std::size_t>(p));
    }
  }
  for (std::size_t j = 0; j < b.instances.size(); ++j) {
    if (!mb[j]) {
      for (auto p : b.instances[j].pixels) out.set(static_cast<std::size_t>(p));
    }
  }
  return out;
}

}  // namespace

TEST(SelectBestPrompt, ArgmaxAndTies) {
  EXPECT_EQ(select_best_prompt({"a", "b", "c"}, {{"a", 0.2}, {"b", 0.9}, {"c", 0.5}}), "b");
  EXPECT_EQ(select_best_prompt({"only"}, {{"only", 0.0}}), "only");
  EXPECT_EQ(select_best_prompt({"a", "b"}, {{"a", 0.7}, {"b", 0.7}}), "a");
  EXPECT_EQ(select_best_prompt({"b", "a"}, {{"a", 0.7}, {"b", 0.7}}), "b");
  EXPECT_EQ(select_best_prompt({"missing", "x"}, {{"x", 0.1}}), "x");
  EXPECT_THROW(select_best_prompt({}, {}), InvalidArgument);
}

TEST(DecodeSemantic, BoundaryInclusive) {
  const ScalarMap l(3, 1, std::vector<float>{-1.0f, 0.0f, 1.0f});
  const BitMask m = decode_semantic(l, 0.0);
  EXPECT_FALSE(m[0]);
  EXPECT_TRUE(m[1]);
  EXPECT_TRUE(m[2]);
  EXPECT_TRUE(decode_semantic(l, 5.0).none());
  EXPECT_EQ(decode_semantic(l, -5.0).count(), 3u);
}

TEST(MatchInstances, IdenticalSetsAllMatch) {
  std::mt19937_64 rng(4);
  const BitMask m = ovcd::testing::random_mask(rng, 30, 30, 0.3);
  const auto r = decode_change(logits_from(m), logits_from(m), 0.0, 0.5);
  EXPECT_TRUE(r.change_mask.none());
  EXPECT_TRUE(r.unmatched_t1.empty());
  EXPECT_TRUE(r.unmatched_t2.empty());
}

TEST(MatchInstances, NewObjectIsChange) {
  BitMask a(40, 40), b(40, 40);
  fill_rect(a, 2, 2, 8, 8);
  fill_rect(b, 2, 2, 8, 8);
  fill_rect(b, 20, 20, 10, 6);
  const auto r = decode_change(logits_from(a), logits_from(b), 0.0, 0.5, "building");
  BitMask expected(40, 40);
  fill_rect(expected, 20, 20, 10, 6);
  EXPECT_EQ(r.change_mask, expected);
  EXPECT_EQ(r.unmatched_t2, std::vector<int>{2});
  ASSERT_EQ(r.matched_pairs.size(), 1u);
  EXPECT_EQ(r.matched_pairs[0], std::make_pair(1, 1));
  EXPECT_EQ(r.selected_prompt, "building");
}

TEST(MatchInstances, SmallOverlapLeavesBothUnmatched) {
  // 10x10 blobs sharing a 3x10 strip: 30% of each.
  BitMask a(30, 12), b(30, 12);
  fill_rect(a, 0, 0, 10, 10);
  fill_rect(b, 7, 0, 10, 10);
  const auto r = match_instances(decouple_instances(a, 1), decouple_instances(b, 2), 0.5);
  EXPECT_EQ(r.change_mask, mask_union(a, b));
  const auto loose = match_instances(decouple_instances(a, 1), decouple_instances(b, 2), 0.3);
  EXPECT_TRUE(loose.change_mask.none());
}

TEST(MatchInstances, EitherDirectionRatioSuffices) {
  // Small blob fully inside a large one: ratio 1 from the small side.
  BitMask a(20, 20), b(20, 20);
  fill_rect(a, 0, 0, 20, 20);
  fill_rect(b, 5, 5, 2, 2);
  const auto r = match_instances(decouple_instances(a, 1), decouple_instances(b, 2), 0.9);
  EXPECT_TRUE(r.change_mask.none());
}

TEST(MatchInstances, MatchesOracleOnRandomMasks) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const BitMask a = ovcd::testing::random_mask(rng, 25, 25, 0.35);
    const BitMask b = ovcd::testing::random_mask(rng, 25, 25, 0.35);
    const InstanceSet sa = decouple_instances(a, 1), sb = decouple_instances(b, 2);
    for (double theta : {0.1, 0.5, 1.0}) {
      const auto r = match_instances(sa, sb, theta);
      EXPECT_EQ(r.change_mask, oracle_change(sa, sb, theta));
      EXPECT_EQ(mask_intersect(r.change_mask, mask_union(a, b)), r.change_mask);
      EXPECT_EQ(r.unmatched_t1.size() + std::set<int>([&] {
                  std::set<int> s;
                  for (auto [i, j] : r.matched_pairs) s.insert(i);
                  return s;
                }()).size(),
                sa.instances.size());
    }
  }
}

TEST(MatchInstances, ChangeGrowsWithTheta) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const InstanceSet sa = decouple_instances(ovcd::testing::random_mask(rng, 25, 25, 0.4), 1);
    const InstanceSet sb = decouple_instances(ovcd::testing::random_mask(rng, 25, 25, 0.4), 2);
    BitMask prev(25, 25);
    for (double theta = 0.05; theta <= 1.0; theta += 0.05) {
      const BitMask cur = match_instances(sa, sb, theta).change_mask;
      EXPECT_EQ(mask_intersect(prev, cur), prev);
      prev = cur;
    }
  }
}

TEST(MatchInstances, Errors) {
  const InstanceSet a = decouple_instances(BitMask(4, 4), 1);
  const InstanceSet b = decouple_instances(BitMask(4, 5), 2);
  EXPECT_THROW(match_instances(a, b, 0.5), DimensionMismatch);
  EXPECT_THROW(match_instances(a, a, 0.0), InvalidArgument);
  EXPECT_THROW(match_instances(a, a, 1.5), InvalidArgument);
}

TEST(DecodeChange, ThresholdAboveAllLogitsGivesEmpty) {
  std::mt19937_64 rng(7);
  const ScalarMap l1 = ovcd::testing::random_map(rng, 16, 16, -1.0f, 1.0f);
  const ScalarMap l2 = ovcd::testing::random_map(rng, 16, 16, -1.0f, 1.0f);
  const auto r = decode_change(l1, l2, 2.0, 0.5);
  EXPECT_TRUE(r.change_mask.none());
  EXPECT_TRUE(r.instances_t1.instances.empty());
}
