#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iml/dataset.hpp"
#include "iml/objective.hpp"
#include "iml/resample.hpp"
#include "iml/solver.hpp"

namespace iml {

/// Positive class is +1.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const Label> truth, std::span<const Label> predicted);
/// Integer labels; anything other than -1/+1 is rejected.
ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
/// Harmonic mean of precision and recall; 0 when tp == 0.
double f1(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);

/// Cartesian hyper-parameter grid; defaults are the m / lambda / a ranges used
/// for model selection (5 x 5 x 21 = 525 combinations).
struct HyperGrid {
    std::vector<double> margins{1, 10, 100, 1000, 10000};
    std::vector<double> lambdas{0, 0.01, 0.1, 1, 10};
    std::vector<double> tradeoffs = default_tradeoffs();

    std::size_t size() const noexcept { return margins.size() * lambdas.size() * tradeoffs.size(); }
    static std::vector<double> default_tradeoffs();  // 0, 0.05, ..., 1
};

/// `count` distinct grid points chosen uniformly without replacement. Fields
/// not on the grid (k, weighting, pair strategy) are copied from `base`.
std::vector<HyperParams> sample_hp_combinations(const HyperGrid& grid, std::size_t count, std::uint64_t seed,
                                                const HyperParams& base = {});

struct CrossValidationOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    Resampling resampling = Resampling::none;  // applied to each fold's training part only
    SolverOptions solver;
    std::size_t knn_k = 3;
};

struct CandidateScore {
    HyperParams hp;
    double mean_f1 = 0.0;
    std::vector<double> fold_f1;
};

struct CrossValidationResult {
    HyperParams best;
    std::size_t best_index = 0;
    std::vector<CandidateScore> scores;  // empty when there was a single candidate
};

/// Mean validation F1 over stratified folds for every candidate; the first
/// candidate with the highest mean wins.
CrossValidationResult cross_validate(const LabeledDataset& train, std::span<const HyperParams> candidates,
                                     const CrossValidationOptions& options);

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

Aggregate aggregate(std::span<const double> values);

/// One evaluated train/test split.
struct SplitRecord {
    std::size_t split = 0;
    std::uint64_t seed = 0;
    std::optional<HyperParams> hp;  // none for the untuned Euclidean baseline
    double f1 = 0.0;
    double accuracy = 0.0;
    ConfusionCounts confusion;
    double fit_seconds = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::string method;
    std::string preprocess;
    std::vector<SplitRecord> splits;

    Aggregate f1() const;
    Aggregate accuracy() const;

    /// One row per split. Timing is the last column so it can be dropped for comparisons.
    void write_csv(std::ostream& out, bool include_timing = true) const;
    /// Per-split rows plus aggregates.
    void write_json(std::ostream& out) const;
};

} // namespace iml
