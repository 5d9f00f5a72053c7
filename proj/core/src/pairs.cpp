#include "iml/pairs.hpp"

#include <algorithm>
#include <string>

#include "iml/error.hpp"
#include "iml/log.hpp"
#include "iml/random.hpp"

namespace iml {

void PairSets::add(const LabeledDataset& data, IndexPair pair) {
    if (pair.anchor == pair.partner) throw Error("pair anchor equals partner");
    const Label a = data.label(pair.anchor);
    const Label b = data.label(pair.partner);
    if (a == Label::positive) {
        (b == Label::positive ? sim_pos : dis_pos).push_back(pair);
    } else {
        (b == Label::negative ? sim_neg : dis_neg).push_back(pair);
    }
}

PairSets build_pairs_knn(const LabeledDataset& train, std::size_t k) {
    if (k == 0) throw Error("pair neighbourhood k must be positive");
    const std::size_t n = train.size();
    const Eigen::MatrixXd& x = train.features();

    // Exact pairwise squared distances (no norm-expansion shortcut, so ties stay exact).
    Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < dist.cols(); ++j) dist(i, j) = dist(j, i) = (x.row(i) - x.row(j)).squaredNorm();
    }

    PairSets out;
    bool warned[2] = {false, false};
    std::vector<std::pair<double, std::size_t>> same, other;
    for (std::size_t i = 0; i < n; ++i) {
        same.clear();
        other.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            (train.label(j) == train.label(i) ? same : other).emplace_back(d, j);
        }
        if (same.empty()) {
            const int c = train.label(i) == Label::positive ? 0 : 1;
            if (!warned[c]) {
                log_warning(std::string("class ") + (c == 0 ? "+1" : "-1") +
                            " has a single member; it contributes dissimilar pairs only");
                warned[c] = true;
            }
        }
        const auto take_same = std::min(k, same.size());
        const auto take_other = std::min(k, other.size());
        std::partial_sort(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(take_same), same.end());
        std::partial_sort(other.begin(), other.begin() + static_cast<std::ptrdiff_t>(take_other), other.end());
        for (std::size_t t = 0; t < take_same; ++t) out.add(train, {i, same[t].second});
        for (std::size_t t = 0; t < take_other; ++t) out.add(train, {i, other[t].second});
    }
    return out;
}

PairSets build_pairs_random(const LabeledDataset& train, std::size_t count, std::uint64_t seed) {
    const std::size_t n = train.size();
    if (n < 2) throw Error("random pairs need at least 2 examples");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::uniform_int_distribution<std::size_t> second(0, n - 2);
    PairSets out;
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        out.add(train, {i, j});
    }
    return out;
}

} // namespace iml
