#include <random>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/pairs.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace iml;

namespace {

void expect_routing_sound(const LabeledDataset& d, const PairSets& p) {
    auto check = [&](const std::vector<IndexPair>& set, Label a, Label b) {
        for (const auto& q : set) {
            EXPECT_NE(q.anchor, q.partner);
            EXPECT_EQ(d.label(q.anchor), a);
            EXPECT_EQ(d.label(q.partner), b);
        }
    };
    check(p.sim_pos, Label::positive, Label::positive);
    check(p.sim_neg, Label::negative, Label::negative);
    check(p.dis_pos, Label::positive, Label::negative);
    check(p.dis_neg, Label::negative, Label::positive);
}

} // namespace

TEST(KnnPairs, OneDimensionalHandCase) {
    const auto d = synthetic::from_rows({{0}, {1}, {5}, {10}, {11}}, {1, 1, 1, -1, -1});
    const auto p = build_pairs_knn(d, 1);
    EXPECT_EQ(p.sim_pos, (std::vector<IndexPair>{{0, 1}, {1, 0}, {2, 1}}));
    EXPECT_EQ(p.sim_neg, (std::vector<IndexPair>{{3, 4}, {4, 3}}));
    EXPECT_EQ(p.dis_pos, (std::vector<IndexPair>{{0, 3}, {1, 3}, {2, 3}}));
    EXPECT_EQ(p.dis_neg, (std::vector<IndexPair>{{3, 2}, {4, 2}}));
}

TEST(KnnPairs, TotalIsTwoNkWhenClassesAreLarge) {
    const auto d = synthetic::gaussians(20, 80, 1.0, 3, 3);
    const auto p = build_pairs_knn(d, 3);
    EXPECT_EQ(p.total(), 2u * 100u * 3u);
    expect_routing_sound(d, p);
}

TEST(KnnPairs, ClampsToClassSize) {
    const auto d = synthetic::gaussians(2, 10, 1.0, 4);
    const auto p = build_pairs_knn(d, 3);
    EXPECT_EQ(p.sim_pos.size(), 2u);  // one per positive
    EXPECT_EQ(p.dis_pos.size(), 6u);  // three per positive
    EXPECT_EQ(p.sim_neg.size(), 30u);
    EXPECT_EQ(p.dis_neg.size(), 20u);  // only two positives exist
}

TEST(KnnPairs, SingletonClassGivesOnlyDissimilarPairs) {
    const auto d = synthetic::gaussians(1, 6, 1.0, 4);
    const auto p = build_pairs_knn(d, 2);
    EXPECT_TRUE(p.sim_pos.empty());
    EXPECT_EQ(p.dis_pos.size(), 2u);
    EXPECT_EQ(p.dis_neg.size(), 6u);
}

TEST(KnnPairs, TiesGoToLowerIndex) {
    const auto d = synthetic::from_rows({{0}, {1}, {-1}, {1}, {5}}, {1, 1, 1, 1, -1});
    const auto p = build_pairs_knn(d, 1);
    EXPECT_EQ(p.sim_pos.front(), (IndexPair{0, 1}));
}

TEST(KnnPairs, MatchesBruteForceOracle) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = synthetic::gaussians(5 + seed, 30, 0.5, seed, 1 + seed % 4);
        for (std::size_t k : {1u, 3u, 7u}) EXPECT_EQ(build_pairs_knn(d, k), oracle::knn_pairs(d, k));
    }
    EXPECT_THROW(build_pairs_knn(synthetic::gaussians(3, 3, 1, 1), 0), Error);
}

TEST(KnnPairs, DissimilarSetsNeedNotMirrorEachOther) {
    const auto d = synthetic::gaussians(5, 40, 0.5, 8);
    const auto p = build_pairs_knn(d, 3);
    std::size_t mirrored = 0;
    for (const auto& q : p.dis_pos)
        for (const auto& r : p.dis_neg) mirrored += q.anchor == r.partner && q.partner == r.anchor;
    EXPECT_LT(mirrored, p.dis_pos.size() + p.dis_neg.size());
}

TEST(RandomPairs, CountRoutingAndDeterminism) {
    const auto d = synthetic::gaussians(30, 70, 1.0, 2);
    const auto p = build_pairs_random(d, 2 * 100 * 3, 17);
    EXPECT_EQ(p.total(), 600u);
    expect_routing_sound(d, p);
    EXPECT_EQ(p, build_pairs_random(d, 600, 17));
    EXPECT_NE(p, build_pairs_random(d, 600, 18));
}

TEST(RandomPairs, AllNegativeSample) {
    const auto d = synthetic::gaussians(0, 12, 1.0, 2);
    const auto p = build_pairs_random(d, 50, 1);
    EXPECT_EQ(p.sim_neg.size(), 50u);
    EXPECT_THROW(build_pairs_random(synthetic::gaussians(0, 1, 1.0, 2), 5, 1), Error);
}

TEST(RandomPairs, HeavyImbalanceMayLackMinoritySimilarPairs) {
    const auto d = synthetic::gaussians(2, 500, 1.0, 3);
    const auto p = build_pairs_random(d, 60, 5);
    EXPECT_TRUE(p.sim_pos.empty());
}

TEST(PairSets, AddRejectsSelfPairs) {
    const auto d = synthetic::gaussians(2, 2, 1.0, 3);
    PairSets p;
    EXPECT_THROW(p.add(d, {1, 1}), Error);
}
