#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <iml/dataset.hpp>

namespace bench {

inline iml::LabeledDataset gaussian_data(std::size_t n, std::size_t dim, double positive_rate, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    std::vector<iml::Label> y(n);
    const auto positives = static_cast<std::size_t>(positive_rate * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i < positives;
        y[i] = pos ? iml::Label::positive : iml::Label::negative;
        for (std::size_t c = 0; c < dim; ++c)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = noise(rng) + (pos && c == 0 ? 2.0 : 0.0);
    }
    return iml::LabeledDataset(std::move(X), std::move(y));
}

} // namespace bench
