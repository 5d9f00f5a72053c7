#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "iml/dataset.hpp"
#include "iml/metric.hpp"

namespace iml {

/// Majority-vote k-NN over training points already mapped through L.
struct KnnModel {
    Eigen::MatrixXd projected;  // n x r
    std::vector<Label> labels;
    std::size_t k = 3;

    static KnnModel fit(const ProjectionMatrix& L, const LabeledDataset& train, std::size_t k = 3);
};

/// Distance ties go to the lower training index; vote ties go to -1.
std::vector<Label> knn_predict(const KnnModel& model, const ProjectionMatrix& L, const Eigen::MatrixXd& test_features);

} // namespace iml
