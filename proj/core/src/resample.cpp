#include "iml/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "iml/error.hpp"
#include "iml/random.hpp"

namespace iml {
namespace {

std::vector<std::size_t> sample_sorted(const std::vector<std::size_t>& pool, std::size_t count, Rng& rng) {
    std::vector<std::size_t> picked;
    picked.reserve(count);
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), count, rng);
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Minority rows nearest to `anchor` (Euclidean, lower index first on ties).
std::vector<std::size_t> minority_neighbors(const Eigen::MatrixXd& minority, Eigen::Index anchor, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(static_cast<std::size_t>(minority.rows()));
    for (Eigen::Index j = 0; j < minority.rows(); ++j) {
        if (j == anchor) continue;
        by_distance.emplace_back((minority.row(anchor) - minority.row(j)).squaredNorm(), static_cast<std::size_t>(j));
    }
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k), by_distance.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(by_distance[i].second);
    return out;
}

} // namespace

LabeledDataset smote(const LabeledDataset& train, std::uint64_t seed, const SmoteOptions& options) {
    const auto pos = train.indices_of(Label::positive);
    const std::size_t n_pos = pos.size();
    const std::size_t n_neg = train.size() - n_pos;
    if (n_pos < 2) throw Error("SMOTE needs at least 2 minority examples");
    if (n_pos >= n_neg) return train;
    if (options.neighbors == 0) throw Error("SMOTE neighborhood must be positive");

    Eigen::MatrixXd minority(static_cast<Eigen::Index>(n_pos), train.features().cols());
    for (std::size_t i = 0; i < n_pos; ++i) minority.row(static_cast<Eigen::Index>(i)) = train.row(pos[i]);

    const std::size_t k = std::min(options.neighbors, n_pos - 1);
    std::vector<std::vector<std::size_t>> neighbors(n_pos);
    for (std::size_t i = 0; i < n_pos; ++i) neighbors[i] = minority_neighbors(minority, static_cast<Eigen::Index>(i), k);

    const std::size_t synthetic = n_neg - n_pos;
    Eigen::MatrixXd features(static_cast<Eigen::Index>(train.size() + synthetic), train.features().cols());
    features.topRows(static_cast<Eigen::Index>(train.size())) = train.features();
    std::vector<Label> labels(train.labels().begin(), train.labels().end());
    labels.resize(train.size() + synthetic, Label::positive);

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::uniform_real_distribution<double> step(0.0, 1.0);
    for (std::size_t s = 0; s < synthetic; ++s) {
        const std::size_t parent = s % n_pos;  // round-robin over the minority
        const std::size_t partner = neighbors[parent][pick(rng)];
        const double u = step(rng);
        const auto x = minority.row(static_cast<Eigen::Index>(parent));
        features.row(static_cast<Eigen::Index>(train.size() + s)) =
            x + u * (minority.row(static_cast<Eigen::Index>(partner)) - x);
    }
    return {std::move(features), std::move(labels), train.name(), train.feature_names()};
}

LabeledDataset random_under_sample(const LabeledDataset& train, std::uint64_t seed) {
    const auto pos = train.indices_of(Label::positive);
    const auto neg = train.indices_of(Label::negative);
    if (pos.empty()) throw Error("random under-sampling needs at least 1 minority example");
    if (neg.size() <= pos.size()) return train;

    Rng rng(seed);
    const auto kept = sample_sorted(neg, pos.size(), rng);
    std::vector<std::size_t> rows;
    std::merge(pos.begin(), pos.end(), kept.begin(), kept.end(), std::back_inserter(rows));
    return train.subset(rows);
}

std::optional<VariantCounts> imbalance_variant_counts(std::size_t positives, std::size_t negatives,
                                                      const ImbalanceTarget& target) {
    const double f = target.minority_fraction;
    if (!(f > 0.0 && f <= 1.0)) throw Error("minority fraction must lie in (0,1]");
    if (target.min_minority == 0) throw Error("min_minority must be positive");
    if (positives == 0 || negatives == 0) throw Error("imbalance variant needs both classes");

    const double current = static_cast<double>(positives) / static_cast<double>(positives + negatives);
    auto fraction = [](std::size_t p, std::size_t q) { return static_cast<double>(p) / static_cast<double>(p + q); };

    VariantCounts out{positives, negatives};
    if (f > current) {
        if (f >= 1.0) throw Error("minority fraction 1 is unreachable without removing every negative");
        // Keep all positives, pick the negative count q >= 1 whose fraction is nearest f.
        const double ideal = static_cast<double>(positives) * (1.0 - f) / f;
        std::size_t best = negatives;
        double best_gap = std::abs(fraction(positives, negatives) - f);
        const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(ideal)));
        for (std::size_t q = lo; q <= std::min(negatives, lo + 1); ++q) {
            const double gap = std::abs(fraction(positives, q) - f);
            if (gap < best_gap) {
                best = q;
                best_gap = gap;
            }
        }
        out.negatives = best;
    } else if (f < current) {
        // Keep all negatives, pick the positive count p whose fraction is nearest f.
        const double ideal = static_cast<double>(negatives) * f / (1.0 - f);
        std::size_t best = positives;
        double best_gap = std::abs(current - f);
        const auto lo = static_cast<std::size_t>(std::floor(ideal));
        for (std::size_t p = std::max<std::size_t>(lo, 1); p <= std::min(positives, lo + 1); ++p) {
            const double gap = std::abs(fraction(p, negatives) - f);
            if (gap < best_gap) {
                best = p;
                best_gap = gap;
            }
        }
        out.positives = best;
    }
    if (out.positives < target.min_minority) return std::nullopt;
    return out;
}

std::optional<LabeledDataset> make_imbalance_variant(const LabeledDataset& data, const ImbalanceTarget& target,
                                                     std::uint64_t seed) {
    const auto pos = data.indices_of(Label::positive);
    const auto neg = data.indices_of(Label::negative);
    const auto counts = imbalance_variant_counts(pos.size(), neg.size(), target);
    if (!counts) return std::nullopt;
    if (counts->positives == pos.size() && counts->negatives == neg.size()) return data;

    Rng rng(seed);
    const auto keep_pos = counts->positives == pos.size() ? pos : sample_sorted(pos, counts->positives, rng);
    const auto keep_neg = counts->negatives == neg.size() ? neg : sample_sorted(neg, counts->negatives, rng);
    std::vector<std::size_t> rows;
    std::merge(keep_pos.begin(), keep_pos.end(), keep_neg.begin(), keep_neg.end(), std::back_inserter(rows));
    return data.subset(rows);
}

std::string_view to_string(Resampling r) {
    switch (r) {
    case Resampling::none: return "none";
    case Resampling::smote: return "smote";
    case Resampling::rus: return "rus";
    }
    return "none";
}

Resampling parse_resampling(const std::string& text) {
    if (text == "none") return Resampling::none;
    if (text == "smote") return Resampling::smote;
    if (text == "rus") return Resampling::rus;
    throw Error("unknown preprocessing '" + text + "' (expected none|smote|rus)");
}

LabeledDataset resample(const LabeledDataset& train, Resampling how, std::uint64_t seed) {
    switch (how) {
    case Resampling::smote: return smote(train, seed);
    case Resampling::rus: return random_under_sample(train, seed);
    case Resampling::none: break;
    }
    return train;
}

} // namespace iml
