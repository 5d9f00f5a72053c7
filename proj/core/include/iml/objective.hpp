#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "iml/dataset.hpp"
#include "iml/metric.hpp"
#include "iml/pairs.hpp"

namespace iml {

/// How the four pair sets are combined.
///   balanced:   each set's hinge sum is divided by 4 |set| (empty sets add 0)
///   unweighted: plain sums, similar sums times a, dissimilar sums times (1 - a)
enum class Weighting { balanced, unweighted };

enum class PairStrategy { knn, random };

struct HyperParams {
    double margin = 1.0;    // m >= 0: dissimilar pairs should sit beyond 1 + m
    double lambda = 0.0;    // weight of ||L^T L - I||_F^2
    double tradeoff = 0.5;  // a in [0,1]: similar vs dissimilar terms
    std::size_t k = 3;      // neighbours per example when building pairs
    Weighting weighting = Weighting::balanced;
    PairStrategy pair_strategy = PairStrategy::knn;

    void validate() const;
    std::string describe() const;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// [d^2 - 1]_+
double loss_sim(const ProjectionMatrix& L, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x2);
/// [1 + m - d^2]_+
double loss_dis(const ProjectionMatrix& L, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x2, double margin);

/// Multiplier applied to every hinge term of each set.
struct SetWeights {
    double sim_pos = 0.0;
    double sim_neg = 0.0;
    double dis_pos = 0.0;
    double dis_neg = 0.0;
};
SetWeights set_weights(const PairSets& pairs, const HyperParams& hp);

/// Objective over L with the pair differences cached, so repeated evaluation
/// during optimization costs two dense products per call.
class PairObjective {
public:
    PairObjective(const LabeledDataset& train, const PairSets& pairs, const HyperParams& hp);

    double value(const Eigen::MatrixXd& L) const;
    /// Writes dF/dL into `grad` (resized to L's shape) and returns F(L).
    double value_and_gradient(const Eigen::MatrixXd& L, Eigen::MatrixXd& grad) const;

    std::size_t pair_count() const noexcept { return static_cast<std::size_t>(deltas_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(deltas_.cols()); }

private:
    double evaluate(const Eigen::MatrixXd& L, Eigen::MatrixXd* grad) const;

    Eigen::MatrixXd deltas_;    // one row x - x' per pair
    Eigen::ArrayXd weights_;    // set weight of each pair
    Eigen::ArrayXd direction_;  // +1 similar, -1 dissimilar
    Eigen::ArrayXd offset_;     // 0 similar, m dissimilar
    double lambda_;
};

double objective(const ProjectionMatrix& L, const PairSets& pairs, const LabeledDataset& train,
                 const HyperParams& hp);
Eigen::MatrixXd gradient(const ProjectionMatrix& L, const PairSets& pairs, const LabeledDataset& train,
                         const HyperParams& hp);

} // namespace iml
