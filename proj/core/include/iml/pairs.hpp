#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iml/dataset.hpp"

namespace iml {

struct IndexPair {
    std::size_t anchor;
    std::size_t partner;

    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Pairs split by the labels involved:
///   sim_pos (+,+)  sim_neg (-,-)  dis_pos (+ anchor, - partner)  dis_neg (- anchor, + partner)
struct PairSets {
    std::vector<IndexPair> sim_pos;
    std::vector<IndexPair> sim_neg;
    std::vector<IndexPair> dis_pos;
    std::vector<IndexPair> dis_neg;

    std::size_t total() const noexcept { return sim_pos.size() + sim_neg.size() + dis_pos.size() + dis_neg.size(); }

    /// Files the pair into the set its labels dictate.
    void add(const LabeledDataset& data, IndexPair pair);

    friend bool operator==(const PairSets&, const PairSets&) = default;
};

/// Each example takes its min(k, same-class size - 1) nearest same-class
/// neighbours as similar pairs and its min(k, other-class size) nearest
/// other-class neighbours as dissimilar pairs. Euclidean distance on the
/// given features, ties to the lower index. Deterministic.
PairSets build_pairs_knn(const LabeledDataset& train, std::size_t k);

/// `count` ordered pairs (i != j) drawn uniformly, routed by label.
PairSets build_pairs_random(const LabeledDataset& train, std::size_t count, std::uint64_t seed);

} // namespace iml
