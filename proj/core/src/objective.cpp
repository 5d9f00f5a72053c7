#include "iml/objective.hpp"

#include <algorithm>
#include <sstream>

#include "iml/error.hpp"

namespace iml {

void HyperParams::validate() const {
    if (!(margin >= 0.0)) throw Error("margin must be >= 0");
    if (!(lambda >= 0.0)) throw Error("lambda must be >= 0");
    if (!(tradeoff >= 0.0 && tradeoff <= 1.0)) throw Error("tradeoff a must lie in [0,1]");
    if (k == 0) throw Error("k must be positive");
}

std::string HyperParams::describe() const {
    std::ostringstream out;
    out << "m=" << margin << " lambda=" << lambda << " a=" << tradeoff << " k=" << k
        << (weighting == Weighting::balanced ? " balanced" : " unweighted")
        << (pair_strategy == PairStrategy::knn ? " knn" : " random");
    return out.str();
}

double loss_sim(const ProjectionMatrix& L, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x2) {
    return std::max(0.0, L.sq_distance(x, x2) - 1.0);
}

double loss_dis(const ProjectionMatrix& L, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x2, double margin) {
    return std::max(0.0, 1.0 + margin - L.sq_distance(x, x2));
}

SetWeights set_weights(const PairSets& pairs, const HyperParams& hp) {
    const double a = hp.tradeoff;
    if (hp.weighting == Weighting::unweighted) return {a, a, 1.0 - a, 1.0 - a};
    auto mean_weight = [](double coef, std::size_t size) {
        return size == 0 ? 0.0 : coef / (4.0 * static_cast<double>(size));
    };
    return {mean_weight(a, pairs.sim_pos.size()), mean_weight(a, pairs.sim_neg.size()),
            mean_weight(1.0 - a, pairs.dis_pos.size()), mean_weight(1.0 - a, pairs.dis_neg.size())};
}

PairObjective::PairObjective(const LabeledDataset& train, const PairSets& pairs, const HyperParams& hp)
    : lambda_(hp.lambda) {
    hp.validate();
    const auto total = static_cast<Eigen::Index>(pairs.total());
    deltas_.resize(total, train.features().cols());
    weights_.resize(total);
    direction_.resize(total);
    offset_.resize(total);

    const SetWeights w = set_weights(pairs, hp);
    Eigen::Index row = 0;
    auto append = [&](const std::vector<IndexPair>& set, double weight, bool similar) {
        for (const auto& p : set) {
            if (p.anchor >= train.size() || p.partner >= train.size()) throw Error("pair index out of range");
            deltas_.row(row) = train.row(p.anchor) - train.row(p.partner);
            weights_(row) = weight;
            direction_(row) = similar ? 1.0 : -1.0;
            offset_(row) = similar ? 0.0 : hp.margin;
            ++row;
        }
    };
    append(pairs.sim_pos, w.sim_pos, true);
    append(pairs.sim_neg, w.sim_neg, true);
    append(pairs.dis_pos, w.dis_pos, false);
    append(pairs.dis_neg, w.dis_neg, false);
}

double PairObjective::value(const Eigen::MatrixXd& L) const { return evaluate(L, nullptr); }

double PairObjective::value_and_gradient(const Eigen::MatrixXd& L, Eigen::MatrixXd& grad) const {
    return evaluate(L, &grad);
}

double PairObjective::evaluate(const Eigen::MatrixXd& L, Eigen::MatrixXd* grad) const {
    if (L.cols() != deltas_.cols()) throw Error("objective: L has the wrong number of columns");

    double value = 0.0;
    if (grad) grad->setZero(L.rows(), L.cols());

    if (deltas_.rows() > 0) {
        const Eigen::MatrixXd projected = deltas_ * L.transpose();  // rows: L (x - x')
        const Eigen::ArrayXd sq = projected.rowwise().squaredNorm().array();
        const Eigen::ArrayXd hinge = direction_ * (sq - 1.0) + offset_;
        // Hinge kink counts as inactive.
        const Eigen::ArrayXd active = (hinge > 0.0).cast<double>();
        value = (weights_ * active * hinge).sum();
        if (grad) {
            // d/dL  w [+-(||L d||^2 - 1) + off]_+ = +-2 w L d d^T on active pairs
            const Eigen::VectorXd coef = (2.0 * weights_ * direction_ * active).matrix();
            grad->noalias() += (projected.array().colwise() * coef.array()).matrix().transpose() * deltas_;
        }
    }

    if (lambda_ > 0.0) {
        Eigen::MatrixXd gap = L.transpose() * L;
        gap.diagonal().array() -= 1.0;
        value += lambda_ * gap.squaredNorm();
        if (grad) grad->noalias() += (4.0 * lambda_) * (L * gap);
    }
    return value;
}

double objective(const ProjectionMatrix& L, const PairSets& pairs, const LabeledDataset& train,
                 const HyperParams& hp) {
    return PairObjective(train, pairs, hp).value(L.matrix());
}

Eigen::MatrixXd gradient(const ProjectionMatrix& L, const PairSets& pairs, const LabeledDataset& train,
                         const HyperParams& hp) {
    Eigen::MatrixXd g;
    PairObjective(train, pairs, hp).value_and_gradient(L.matrix(), g);
    return g;
}

} // namespace iml
