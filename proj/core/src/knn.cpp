#include "iml/knn.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "iml/error.hpp"

namespace iml {

KnnModel KnnModel::fit(const ProjectionMatrix& L, const LabeledDataset& train, std::size_t k) {
    if (k == 0) throw Error("k must be positive");
    if (k > train.size()) throw Error("k (" + std::to_string(k) + ") exceeds training size (" +
                                      std::to_string(train.size()) + ")");
    return {L.project(train.features()), {train.labels().begin(), train.labels().end()}, k};
}

std::vector<Label> knn_predict(const KnnModel& model, const ProjectionMatrix& L, const Eigen::MatrixXd& test_features) {
    const auto n = static_cast<std::size_t>(model.projected.rows());
    if (model.k == 0 || model.k > n) throw Error("k must lie in [1, n]");
    if (model.labels.size() != n) throw Error("knn model labels do not match its points");
    if (static_cast<std::size_t>(model.projected.cols()) != L.rank())
        throw Error("knn model was built with a different projection rank");

    const Eigen::MatrixXd queries = L.project(test_features);
    std::vector<Label> out;
    out.reserve(static_cast<std::size_t>(queries.rows()));
    std::vector<std::pair<double, std::size_t>> by_distance(n);
    const auto kth = static_cast<std::ptrdiff_t>(model.k);
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        for (std::size_t i = 0; i < n; ++i)
            by_distance[i] = {(model.projected.row(static_cast<Eigen::Index>(i)) - queries.row(q)).squaredNorm(), i};
        std::partial_sort(by_distance.begin(), by_distance.begin() + kth, by_distance.end());
        int vote = 0;
        for (std::ptrdiff_t j = 0; j < kth; ++j) vote += to_int(model.labels[by_distance[static_cast<std::size_t>(j)].second]);
        out.push_back(vote > 0 ? Label::positive : Label::negative);
    }
    return out;
}

} // namespace iml
