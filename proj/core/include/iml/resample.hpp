#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "iml/dataset.hpp"

namespace iml {

struct SmoteOptions {
    std::size_t neighbors = 5;  // clamped to n+ - 1
};

/// Over-samples the positive class until n+ == n-. Originals come first, in
/// their input order; synthetic points are appended.
LabeledDataset smote(const LabeledDataset& train, std::uint64_t seed, const SmoteOptions& options = {});

/// Keeps every positive and a uniform subset of n+ negatives (input order kept).
LabeledDataset random_under_sample(const LabeledDataset& train, std::uint64_t seed);

struct ImbalanceTarget {
    double minority_fraction = 0.5;
    std::size_t min_minority = 20;
};

/// Minority/majority counts whose fraction is nearest the target, reached by
/// removing examples only. nullopt when the positive count would fall below
/// target.min_minority.
struct VariantCounts {
    std::size_t positives;
    std::size_t negatives;
};
std::optional<VariantCounts> imbalance_variant_counts(std::size_t positives, std::size_t negatives,
                                                      const ImbalanceTarget& target);

/// Under-samples whichever class is in excess to hit the target minority
/// fraction. nullopt signals a rejected variant (too few minority examples).
std::optional<LabeledDataset> make_imbalance_variant(const LabeledDataset& data, const ImbalanceTarget& target,
                                                     std::uint64_t seed);

enum class Resampling { none, smote, rus };

std::string_view to_string(Resampling r);
Resampling parse_resampling(const std::string& text);

/// Dispatches to smote / random_under_sample; `none` returns the input.
LabeledDataset resample(const LabeledDataset& train, Resampling how, std::uint64_t seed);

} // namespace iml
