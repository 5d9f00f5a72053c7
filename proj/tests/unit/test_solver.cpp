#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "iml/error.hpp"
#include "iml/eval.hpp"
#include "iml/knn.hpp"
#include "iml/solver.hpp"
#include "synthetic.hpp"

using namespace iml;

TEST(Minimize, QuadraticConvergesToTarget) {
    Eigen::MatrixXd C(3, 3);
    C << 1, -2, 0.5, 3, 0, 1, -1, 4, 2;
    const auto r = minimize(
        [&](const Eigen::MatrixXd& L, Eigen::MatrixXd& g) {
            g = 2.0 * (L - C);
            return (L - C).squaredNorm();
        },
        ProjectionMatrix::identity(3));
    EXPECT_LT((r.L.matrix() - C).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_EQ(r.reason, StopReason::gradient_tolerance);
}

TEST(Minimize, IllConditionedQuadratic) {
    Eigen::VectorXd scale(4);
    scale << 1, 10, 100, 1000;
    const auto r = minimize(
        [&](const Eigen::MatrixXd& L, Eigen::MatrixXd& g) {
            const Eigen::VectorXd v = L.reshaped() - Eigen::VectorXd::Constant(4, 0.5);
            g = (2.0 * scale.cwiseProduct(v)).reshaped(2, 2);
            return v.dot(scale.cwiseProduct(v));
        },
        ProjectionMatrix::identity(2));
    EXPECT_LT((r.L.matrix().array() - 0.5).abs().maxCoeff(), 1e-6);
}

TEST(Minimize, SeparateValueAndGradientOverload) {
    const auto r = minimize([](const Eigen::MatrixXd& L) { return (L.array() - 2.0).square().sum(); },
                            [](const Eigen::MatrixXd& L) { return Eigen::MatrixXd(2.0 * (L.array() - 2.0)); },
                            ProjectionMatrix::identity(2));
    EXPECT_NEAR(r.L.matrix()(0, 1), 2.0, 1e-5);
}

TEST(Minimize, StationaryStartReturnsImmediately) {
    const auto data = synthetic::gaussians(5, 5, 1.0, 1);
    HyperParams hp;
    hp.lambda = 1.0;
    const auto r = fit_with_pairs(data, PairSets{}, hp);
    EXPECT_EQ(r.solve.iterations, 0);
    EXPECT_EQ(r.L.matrix(), Eigen::MatrixXd::Identity(2, 2));
}

TEST(Minimize, NonFiniteObjectiveAtStart) {
    EXPECT_THROW(minimize(
                     [](const Eigen::MatrixXd&, Eigen::MatrixXd& g) {
                         g = Eigen::MatrixXd::Zero(1, 1);
                         return std::numeric_limits<double>::quiet_NaN();
                     },
                     ProjectionMatrix::identity(1)),
                 SolverError);
    EXPECT_THROW(minimize(
                     [](const Eigen::MatrixXd& L, Eigen::MatrixXd& g) {
                         g = Eigen::MatrixXd::Constant(1, 1, std::numeric_limits<double>::infinity());
                         return L(0, 0);
                     },
                     ProjectionMatrix::identity(1)),
                 SolverError);
}

TEST(Minimize, OptionsValidation) {
    SolverOptions o;
    o.max_iterations = 0;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.sufficient_decrease = 0.95;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.history_size = 0;
    EXPECT_THROW(o.validate(), Error);
}

TEST(FitIml, DescendsMonotonicallyOnGaussianToy) {
    const auto data = synthetic::gaussians(30, 60, 1.5, 3);
    HyperParams hp;
    hp.tradeoff = 0.5;
    hp.margin = 1;
    hp.lambda = 0.1;
    const auto r = fit_iml_detailed(data, hp);
    EXPECT_LT(r.solve.objective, r.solve.initial_objective);
    for (std::size_t i = 1; i < r.solve.accepted.size(); ++i) EXPECT_LE(r.solve.accepted[i], r.solve.accepted[i - 1]);
    EXPECT_EQ(r.solve.accepted.front(), r.solve.initial_objective);
    EXPECT_EQ(r.solve.accepted.back(), r.solve.objective);
}

TEST(FitIml, NeverIncreasesObjectiveAcrossHyperParams) {
    const auto data = synthetic::gaussians(12, 50, 1.0, 8, 4);
    for (double m : {0.0, 1.0, 100.0, 10000.0})
        for (double lambda : {0.0, 0.1, 10.0})
            for (double a : {0.0, 0.5, 1.0}) {
                HyperParams hp;
                hp.margin = m;
                hp.lambda = lambda;
                hp.tradeoff = a;
                const auto r = fit_iml_detailed(data, hp);
                EXPECT_LE(r.solve.objective, r.solve.initial_objective);
                EXPECT_TRUE(r.L.matrix().allFinite());
            }
}

TEST(FitIml, HugeLambdaKeepsIdentity) {
    const auto data = synthetic::gaussians(20, 40, 1.0, 5, 3);
    HyperParams hp;
    hp.lambda = 1e6;
    hp.margin = 100;
    const auto L = fit_iml(data, hp);
    EXPECT_LT((L.matrix() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(FitIml, TradeoffOneIgnoresDissimilarPairs) {
    const auto data = synthetic::gaussians(20, 40, 1.0, 6, 3);
    HyperParams hp;
    hp.tradeoff = 1.0;
    auto pairs = build_pairs_knn(data, 3);
    const auto a = fit_with_pairs(data, pairs, hp).L.matrix();
    std::reverse(pairs.dis_pos.begin(), pairs.dis_pos.end());
    pairs.dis_neg.resize(pairs.dis_neg.size() / 2);
    pairs.dis_pos.push_back({0, 25});
    const auto b = fit_with_pairs(data, pairs, hp).L.matrix();
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitIml, Deterministic) {
    const auto data = synthetic::gaussians(15, 45, 1.0, 7, 3);
    HyperParams hp;
    hp.pair_strategy = PairStrategy::random;
    hp.weighting = Weighting::unweighted;
    EXPECT_EQ(fit_iml(data, hp, {}, 3).matrix(), fit_iml(data, hp, {}, 3).matrix());
}

TEST(FitIml, HelpsKnnWhenANoiseAxisDominates) {
    // informative first axis, a four times wider noise axis second; averaged over draws
    double learned = 0.0, euclid = 0.0;
    const int draws = 8;
    for (int seed = 0; seed < draws; ++seed) {
        const auto raw = synthetic::gaussians(100, 100, 4.0, seed, 2, 4.0);
        const auto split = stratified_split(raw, {0.3, 1, 4}, 0);
        HyperParams hp;
        hp.tradeoff = 0.5;
        hp.margin = 1;
        const auto L = fit_iml(split.train, hp);
        const auto I = ProjectionMatrix::identity(2);
        const auto& test = split.test;
        learned += f1(confusion(test.labels(), knn_predict(KnnModel::fit(L, split.train), L, test.features())));
        euclid += f1(confusion(test.labels(), knn_predict(KnnModel::fit(I, split.train), I, test.features())));
    }
    EXPECT_GE(learned / draws, euclid / draws);
}

TEST(FitIml, RequiresBothClasses) {
    EXPECT_THROW(fit_iml(synthetic::gaussians(0, 10, 1.0, 1), HyperParams{}), Error);
}
