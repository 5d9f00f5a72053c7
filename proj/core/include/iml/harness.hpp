#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "iml/dataset.hpp"
#include "iml/eval.hpp"
#include "iml/objective.hpp"
#include "iml/resample.hpp"
#include "iml/solver.hpp"

namespace iml {

/// euclidean: 3NN with L = I, nothing tuned.
/// iml:       balanced weighting, kNN pairs.
/// ml2:       unweighted, kNN pairs.
/// ml1:       unweighted, 2nk random pairs.
enum class Method { euclidean, iml, ml2, ml1 };

std::string_view to_string(Method m);
Method parse_method(const std::string& text);
/// HyperParams carrying the method's weighting and pair strategy.
HyperParams method_defaults(Method m, std::size_t k = 3);

struct ExperimentConfig {
    std::filesystem::path registry = "data/registry.json";
    std::vector<std::string> datasets;  // empty: every registry entry
    std::vector<Method> methods{Method::euclidean, Method::iml};
    Resampling preprocess = Resampling::none;
    SplitSpec split{0.3, 20, 0};
    std::vector<double> sweep_fractions{0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01};
    double sweep_train_fraction = 0.5;
    std::size_t min_minority = 20;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "results";
    std::size_t jobs = 1;
    bool verbose = false;

    std::size_t candidates = 100;
    std::size_t folds = 5;
    std::size_t knn_k = 3;
    std::size_t pair_k = 3;
    HyperGrid grid;
    SolverOptions solver;

    void validate() const;
    /// Overlays the keys present in a JSON file onto `base`.
    static ExperimentConfig load(const std::filesystem::path& path, ExperimentConfig base);
    static ExperimentConfig load(const std::filesystem::path& path);
};

/// Everything one train/test evaluation needs besides the data.
struct EvalSettings {
    Resampling preprocess = Resampling::none;
    std::size_t candidates = 100;
    std::size_t folds = 5;
    std::size_t knn_k = 3;
    std::size_t pair_k = 3;
    HyperGrid grid;
    SolverOptions solver;

    static EvalSettings from(const ExperimentConfig& config);
};

/// z-scores with train statistics, resamples the training part, tunes by
/// cross-validation (skipped for euclidean or a single candidate), refits on
/// the whole training part and scores the test part.
/// `seed` drives every random choice; it does not depend on the method, so
/// methods compared under one seed share folds and candidate lists.
SplitRecord evaluate_split(const LabeledDataset& train, const LabeledDataset& test, Method method,
                           const EvalSettings& settings, std::uint64_t seed, std::ostream* telemetry = nullptr);

/// Seed from which a dataset's splits are derived; depends only on the
/// master seed and the dataset name.
std::uint64_t dataset_seed(std::uint64_t master, std::string_view dataset);

struct DatasetFailure {
    std::string dataset;
    std::string message;
};

struct BenchmarkResult {
    std::vector<EvalReport> reports;  // dataset-major, then method order
    std::vector<DatasetFailure> failures;
};

/// Loader used by the runners; defaults to the registry named in the config.
using DatasetLoader = std::function<LabeledDataset(const std::string& name)>;

/// Repeated stratified splits per dataset and method. Writes
/// <dataset>_<method>_<preprocess>.csv/.json per report and summary.csv.
BenchmarkResult run_benchmark(const ExperimentConfig& config, const DatasetLoader& loader = {});

/// Table-2 shaped summary: one row per dataset, mean and std of test F1 in
/// percent per method, and a final Mean row.
void write_summary_csv(std::ostream& out, const std::vector<EvalReport>& reports,
                       const std::vector<Method>& methods);

struct SweepRow {
    std::string dataset;
    double fraction = 0.0;
    std::string method;
    std::string metric;  // "f1" or "accuracy"
    Aggregate value;
    std::size_t iterations = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<DatasetFailure> failures;
    std::vector<std::pair<std::string, double>> rejected;  // (dataset, fraction)
};

/// For every dataset and fraction, `split.repeats` freshly drawn imbalance
/// variants, each split with sweep_train_fraction. Writes sweep.csv.
SweepResult run_sweep(const ExperimentConfig& config, const DatasetLoader& loader = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Runs task(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

} // namespace iml
