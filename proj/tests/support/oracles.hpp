#pragma once

// Straightforward reference implementations used to check the library.
// They share no code with it: distances go through M = L^T L element by
// element, neighbours come from a full sort, gradients from central
// differences.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "iml/dataset.hpp"
#include "iml/objective.hpp"
#include "iml/pairs.hpp"

namespace iml::oracle {

inline double mahalanobis_sq(const Eigen::MatrixXd& L, const Eigen::MatrixXd& X, std::size_t i, std::size_t j) {
    const Eigen::Index d = X.cols();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index r = 0; r < L.rows(); ++r) M(a, b) += L(r, a) * L(r, b);
    double s = 0.0;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            s += (X(i, a) - X(j, a)) * M(a, b) * (X(i, b) - X(j, b));
    return s;
}

inline double hinge(double v) { return v > 0.0 ? v : 0.0; }

/// Objective evaluated term by term from its definition.
inline double objective(const Eigen::MatrixXd& L, const PairSets& pairs, const Eigen::MatrixXd& X,
                        const HyperParams& hp) {
    auto sim_sum = [&](const std::vector<IndexPair>& set) {
        double s = 0.0;
        for (const auto& p : set) s += hinge(mahalanobis_sq(L, X, p.anchor, p.partner) - 1.0);
        return s;
    };
    auto dis_sum = [&](const std::vector<IndexPair>& set) {
        double s = 0.0;
        for (const auto& p : set) s += hinge(1.0 + hp.margin - mahalanobis_sq(L, X, p.anchor, p.partner));
        return s;
    };
    const double a = hp.tradeoff;
    double value = 0.0;
    if (hp.weighting == Weighting::balanced) {
        if (!pairs.sim_pos.empty()) value += a / (4.0 * pairs.sim_pos.size()) * sim_sum(pairs.sim_pos);
        if (!pairs.sim_neg.empty()) value += a / (4.0 * pairs.sim_neg.size()) * sim_sum(pairs.sim_neg);
        if (!pairs.dis_pos.empty()) value += (1.0 - a) / (4.0 * pairs.dis_pos.size()) * dis_sum(pairs.dis_pos);
        if (!pairs.dis_neg.empty()) value += (1.0 - a) / (4.0 * pairs.dis_neg.size()) * dis_sum(pairs.dis_neg);
    } else {
        value += a * (sim_sum(pairs.sim_pos) + sim_sum(pairs.sim_neg));
        value += (1.0 - a) * (dis_sum(pairs.dis_pos) + dis_sum(pairs.dis_neg));
    }
    double reg = 0.0;
    const Eigen::Index d = L.cols();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double m = 0.0;
            for (Eigen::Index r = 0; r < L.rows(); ++r) m += L(r, i) * L(r, j);
            const double e = m - (i == j ? 1.0 : 0.0);
            reg += e * e;
        }
    return value + hp.lambda * reg;
}

inline Eigen::MatrixXd central_difference(const std::function<double(const Eigen::MatrixXd&)>& f,
                                          const Eigen::MatrixXd& L, double h = 1e-6) {
    Eigen::MatrixXd g(L.rows(), L.cols());
    for (Eigen::Index i = 0; i < L.rows(); ++i)
        for (Eigen::Index j = 0; j < L.cols(); ++j) {
            Eigen::MatrixXd up = L, down = L;
            up(i, j) += h;
            down(i, j) -= h;
            g(i, j) = (f(up) - f(down)) / (2.0 * h);
        }
    return g;
}

/// Indices of the k nearest training rows to `query` under L, by full sort.
inline std::vector<std::size_t> nearest(const Eigen::MatrixXd& L, const Eigen::MatrixXd& train,
                                        const Eigen::RowVectorXd& query, std::size_t k) {
    Eigen::MatrixXd both(train.rows() + 1, train.cols());
    both.topRows(train.rows()) = train;
    both.row(train.rows()) = query;
    std::vector<std::pair<double, std::size_t>> order;
    for (Eigen::Index i = 0; i < train.rows(); ++i)
        order.emplace_back(mahalanobis_sq(L, both, static_cast<std::size_t>(train.rows()), static_cast<std::size_t>(i)),
                           static_cast<std::size_t>(i));
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < order.size(); ++i) out.push_back(order[i].second);
    return out;
}

inline std::vector<Label> knn_predict(const Eigen::MatrixXd& L, const LabeledDataset& train,
                                      const Eigen::MatrixXd& test, std::size_t k) {
    std::vector<Label> out;
    for (Eigen::Index t = 0; t < test.rows(); ++t) {
        int vote = 0;
        for (std::size_t i : nearest(L, train.features(), test.row(t), k)) vote += to_int(train.label(i));
        out.push_back(vote > 0 ? Label::positive : Label::negative);
    }
    return out;
}

/// F1 from counts by the textbook definitions.
inline double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp == 0) return 0.0;
    const double p = double(tp) / double(tp + fp);
    const double r = double(tp) / double(tp + fn);
    return 2.0 * p * r / (p + r);
}

/// Nearest same-class / other-class neighbours of every example by full sort.
inline PairSets knn_pairs(const LabeledDataset& data, std::size_t k) {
    PairSets out;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(data.dim(), data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> same, other;
        for (std::size_t j = 0; j < data.size(); ++j) {
            if (j == i) continue;
            const double d = mahalanobis_sq(I, data.features(), i, j);
            (data.label(j) == data.label(i) ? same : other).emplace_back(d, j);
        }
        std::sort(same.begin(), same.end());
        std::sort(other.begin(), other.end());
        for (std::size_t s = 0; s < std::min(k, same.size()); ++s) out.add(data, {i, same[s].second});
        for (std::size_t s = 0; s < std::min(k, other.size()); ++s) out.add(data, {i, other[s].second});
    }
    return out;
}

} // namespace iml::oracle
