#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/resample.hpp"
#include "synthetic.hpp"

using namespace iml;

namespace {

// Distance from s to the closest segment between two positive rows of `data`.
double segment_residual(const LabeledDataset& data, const Eigen::RowVectorXd& s) {
    const auto pos = data.indices_of(Label::positive);
    double best = std::numeric_limits<double>::infinity();
    for (auto i : pos)
        for (auto j : pos) {
            const Eigen::RowVectorXd a = data.row(i), b = data.row(j);
            const Eigen::RowVectorXd ab = b - a;
            const double len = ab.squaredNorm();
            double t = len > 0 ? (s - a).dot(ab) / len : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, (a + t * ab - s).norm());
        }
    return best;
}

std::multiset<std::vector<double>> rows_of(const LabeledDataset& d, Label y) {
    std::multiset<std::vector<double>> out;
    for (auto i : d.indices_of(y)) {
        const Eigen::RowVectorXd r = d.row(i);
        out.insert(std::vector<double>(r.data(), r.data() + r.size()));
    }
    return out;
}

} // namespace

TEST(Smote, BalancesAndKeepsOriginalsFirst) {
    const auto train = synthetic::gaussians(13, 50, 2.0, 1, 3);
    const auto out = smote(train, 99);
    EXPECT_EQ(out.count(Label::positive), 50u);
    EXPECT_EQ(out.count(Label::negative), 50u);
    ASSERT_GE(out.size(), train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        EXPECT_EQ(out.label(i), train.label(i));
        EXPECT_EQ(out.row(i), train.row(i));
    }
    for (std::size_t i = train.size(); i < out.size(); ++i) {
        EXPECT_EQ(out.label(i), Label::positive);
        EXPECT_LT(segment_residual(train, out.row(i)), 1e-9);
    }
}

TEST(Smote, SingleMinorityPairStaysOnSegment) {
    const auto train = synthetic::from_rows({{0, 0}, {2, 0}, {5, 5}, {6, 5}, {5, 6}, {7, 7}}, {1, 1, -1, -1, -1, -1});
    const auto out = smote(train, 3);
    ASSERT_EQ(out.count(Label::positive), 4u);
    for (std::size_t i = train.size(); i < out.size(); ++i) {
        EXPECT_GE(out.row(i)(0), 0.0);
        EXPECT_LE(out.row(i)(0), 2.0);
        EXPECT_EQ(out.row(i)(1), 0.0);
    }
}

TEST(Smote, BalancesSixtyFiveAgainstOneFifty) {
    const auto train = synthetic::gaussians(65, 150, 1.0, 4, 5);
    const auto out = smote(train, 8);
    EXPECT_EQ(out.count(Label::positive), 150u);
    EXPECT_EQ(out.count(Label::negative), 150u);
}

TEST(Smote, BalancedInputUnchangedAndErrors) {
    const auto balanced = synthetic::gaussians(10, 10, 1.0, 2);
    const auto out = smote(balanced, 1);
    EXPECT_EQ(out.features(), balanced.features());
    EXPECT_THROW(smote(synthetic::gaussians(1, 10, 1.0, 2), 1), Error);
}

TEST(Smote, Deterministic) {
    const auto train = synthetic::gaussians(7, 30, 1.0, 5);
    EXPECT_EQ(smote(train, 12).features(), smote(train, 12).features());
}

TEST(RandomUnderSample, SubsetWithBalancedCounts) {
    const auto train = synthetic::gaussians(65, 150, 1.0, 6, 3);
    const auto out = random_under_sample(train, 10);
    EXPECT_EQ(out.count(Label::positive), 65u);
    EXPECT_EQ(out.count(Label::negative), 65u);
    EXPECT_EQ(rows_of(out, Label::positive), rows_of(train, Label::positive));
    const auto kept = rows_of(out, Label::negative);
    const auto original = rows_of(train, Label::negative);
    EXPECT_TRUE(std::includes(original.begin(), original.end(), kept.begin(), kept.end()));
}

TEST(RandomUnderSample, BalancedUnchanged) {
    const auto balanced = synthetic::gaussians(10, 10, 1.0, 2);
    EXPECT_EQ(random_under_sample(balanced, 4).features(), balanced.features());
}

TEST(RandomUnderSample, NegativesAreRoughlyUniform) {
    const auto train = synthetic::gaussians(5, 20, 1.0, 3);
    std::map<double, int> hits;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const auto out = random_under_sample(train, s);
        for (auto i : out.indices_of(Label::negative)) ++hits[out.row(i)(0)];
    }
    ASSERT_EQ(hits.size(), 20u);
    for (const auto& [_, count] : hits) EXPECT_NEAR(count, 2000 * 5 / 20, 120);
}

TEST(ImbalanceVariant, SpectfheartAtTenPercent) {
    const auto counts = imbalance_variant_counts(55, 212, {0.10, 20});
    ASSERT_TRUE(counts);
    // 0.1 * 212 / 0.9 = 23.56; 24/236 is nearer to 0.1 than 23/235.
    EXPECT_EQ(counts->positives, 24u);
    EXPECT_EQ(counts->negatives, 212u);
}

TEST(ImbalanceVariant, SpectfheartAtFivePercentIsRejected) {
    EXPECT_FALSE(imbalance_variant_counts(55, 212, {0.05, 20}));
    const auto data = synthetic::gaussians(55, 212, 1.0, 1);
    EXPECT_FALSE(make_imbalance_variant(data, {0.05, 20}, 1));
}

TEST(ImbalanceVariant, BalancedAtHalfUnchanged) {
    const auto data = synthetic::gaussians(100, 100, 1.0, 1);
    const auto v = make_imbalance_variant(data, {0.5, 20}, 3);
    ASSERT_TRUE(v);
    EXPECT_EQ(v->count(Label::positive), 100u);
    EXPECT_EQ(v->count(Label::negative), 100u);
}

TEST(ImbalanceVariant, RaisingTheFractionCutsTheMajority) {
    const auto counts = imbalance_variant_counts(55, 212, {0.5, 20});
    ASSERT_TRUE(counts);
    EXPECT_EQ(counts->positives, 55u);
    EXPECT_EQ(counts->negatives, 55u);
}

TEST(ImbalanceVariant, NearestFractionAndMonotone) {
    for (std::size_t p : {30u, 55u, 126u, 288u})
        for (std::size_t q : {100u, 212u, 337u}) {
            std::size_t previous = std::numeric_limits<std::size_t>::max();
            for (double f : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01}) {
                const auto c = imbalance_variant_counts(p, q, {f, 1});
                if (!c) continue;
                EXPECT_LE(c->positives, p);
                EXPECT_LE(c->negatives, q);
                EXPECT_LE(c->positives, previous);
                previous = c->positives;
                const double got = double(c->positives) / double(c->positives + c->negatives);
                // no single-example change on the cut class gets closer
                if (c->positives < p) {
                    const double up = double(c->positives + 1) / double(c->positives + 1 + c->negatives);
                    EXPECT_LE(std::abs(got - f), std::abs(up - f) + 1e-12);
                }
                if (c->positives > 0) {
                    const double down = double(c->positives - 1) / double(c->positives - 1 + c->negatives);
                    if (c->negatives == q) EXPECT_LE(std::abs(got - f), std::abs(down - f) + 1e-12);
                }
            }
        }
}

TEST(ImbalanceVariant, RowsComeFromTheInput) {
    const auto data = synthetic::gaussians(40, 160, 1.0, 9);
    const auto v = make_imbalance_variant(data, {0.1, 5}, 2);
    ASSERT_TRUE(v);
    const auto pos = rows_of(*v, Label::positive), all_pos = rows_of(data, Label::positive);
    EXPECT_TRUE(std::includes(all_pos.begin(), all_pos.end(), pos.begin(), pos.end()));
    EXPECT_EQ(rows_of(*v, Label::negative), rows_of(data, Label::negative));
}

TEST(ImbalanceVariant, Errors) {
    EXPECT_THROW(imbalance_variant_counts(10, 10, {0.0, 1}), Error);
    EXPECT_THROW(imbalance_variant_counts(10, 10, {1.0, 1}), Error);
    EXPECT_THROW(imbalance_variant_counts(0, 10, {0.5, 1}), Error);
}

TEST(Resample, Dispatch) {
    const auto train = synthetic::gaussians(6, 20, 1.0, 2);
    EXPECT_EQ(resample(train, Resampling::none, 1).size(), 26u);
    EXPECT_EQ(resample(train, Resampling::smote, 1).size(), 40u);
    EXPECT_EQ(resample(train, Resampling::rus, 1).size(), 12u);
    EXPECT_EQ(parse_resampling("smote"), Resampling::smote);
    EXPECT_THROW(parse_resampling("bogus"), Error);
}
