// iml: metric learning for imbalanced binary data.
//
//   iml benchmark --registry data/registry.json --methods euclidean,iml --out results
//   iml sweep --datasets spectfheart --ablation --out sweep
//   iml fit --data train.csv --positive 1 --out L.csv

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iml/dataset.hpp"
#include "iml/harness.hpp"
#include "iml/log.hpp"
#include "iml/solver.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct CommonFlags {
    std::string config;
    std::string registry;
    std::string datasets;
    std::string methods;
    std::string preprocess;
    std::uint64_t seed = 0;
    std::size_t splits = 0;
    std::string out;
    std::size_t jobs = 0;
    std::size_t candidates = 0;
    std::size_t folds = 0;
    bool verbose = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "JSON experiment config; flags override its values");
    app->add_option("--registry", f.registry, "dataset registry (JSON)");
    app->add_option("--datasets", f.datasets, "comma-separated dataset names (default: whole registry)");
    app->add_option("--methods", f.methods, "comma-separated subset of euclidean,iml,ml2,ml1");
    app->add_option("--preprocess", f.preprocess, "none | smote | rus")
        ->check(CLI::IsMember({"none", "smote", "rus"}));
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--splits", f.splits, "number of repeated splits (sweep: variants per fraction)");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--jobs", f.jobs, "worker threads");
    app->add_option("--candidates", f.candidates, "random hyper-parameter combinations per split");
    app->add_option("--folds", f.folds, "cross-validation folds");
    app->add_flag("--verbose", f.verbose, "progress on stderr and fit telemetry as JSON lines");
}

iml::ExperimentConfig build_config(const CLI::App& app, const CommonFlags& f) {
    iml::ExperimentConfig c;
    if (!f.config.empty()) c = iml::ExperimentConfig::load(f.config);
    if (app.count("--registry")) c.registry = f.registry;
    if (app.count("--datasets")) c.datasets = split_list(f.datasets);
    if (app.count("--methods")) {
        c.methods.clear();
        for (const auto& m : split_list(f.methods)) c.methods.push_back(iml::parse_method(m));
    }
    if (app.count("--preprocess")) c.preprocess = iml::parse_resampling(f.preprocess);
    if (app.count("--seed")) c.seed = f.seed;
    if (app.count("--splits")) c.split.repeats = f.splits;
    if (app.count("--out")) c.out_dir = f.out;
    if (app.count("--jobs")) c.jobs = f.jobs;
    if (app.count("--candidates")) c.candidates = f.candidates;
    if (app.count("--folds")) c.folds = f.folds;
    if (f.verbose) c.verbose = true;
    return c;
}

int report_failures(const std::vector<iml::DatasetFailure>& failures) {
    for (const auto& fail : failures) std::cerr << "failed: " << fail.dataset << ": " << fail.message << '\n';
    return failures.empty() ? EXIT_SUCCESS : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mahalanobis metric learning for imbalanced binary classification"};
    app.require_subcommand(1);

    CommonFlags bench_flags;
    auto* bench = app.add_subcommand("benchmark", "repeated stratified splits with tuned 3NN, summary table");
    add_common(bench, bench_flags);

    CommonFlags sweep_flags;
    bool ablation = false;
    std::string fractions;
    auto* sweep = app.add_subcommand("sweep", "F1 and accuracy as the minority fraction shrinks");
    add_common(sweep, sweep_flags);
    sweep->add_flag("--ablation", ablation, "compare iml, ml2 and ml1");
    sweep->add_option("--fractions", fractions, "comma-separated minority fractions");

    std::string data_path, label_column = "last", positives, out_path = "L.csv";
    iml::HyperParams hp;
    std::string weighting = "balanced", strategy = "knn";
    std::uint64_t fit_seed = 0;
    bool fit_verbose = false;
    auto* fit = app.add_subcommand("fit", "learn L on one CSV and write it as CSV");
    fit->add_option("--data", data_path, "CSV file")->required()->check(CLI::ExistingFile);
    fit->add_option("--label-column", label_column, "first, last, a 0-based index or a header name");
    fit->add_option("--positive", positives, "comma-separated raw labels forming the positive class")->required();
    fit->add_option("--out", out_path, "where to write L");
    fit->add_option("--margin", hp.margin, "margin m");
    fit->add_option("--lambda", hp.lambda, "identity regularization weight");
    fit->add_option("--tradeoff", hp.tradeoff, "similar/dissimilar trade-off a in [0,1]");
    fit->add_option("-k", hp.k, "neighbours per example for pair construction");
    fit->add_option("--weighting", weighting)->check(CLI::IsMember({"balanced", "unweighted"}));
    fit->add_option("--pairs", strategy)->check(CLI::IsMember({"knn", "random"}));
    fit->add_option("--seed", fit_seed, "seed for random pairs");
    fit->add_flag("--verbose", fit_verbose, "solver telemetry on stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            auto config = build_config(*bench, bench_flags);
            iml::set_log_level(config.verbose ? iml::LogLevel::info : iml::LogLevel::warning);
            const auto result = iml::run_benchmark(config);
            std::ifstream summary(config.out_dir / "summary.csv");
            std::cout << summary.rdbuf();
            return report_failures(result.failures);
        }
        if (sweep->parsed()) {
            auto config = build_config(*sweep, sweep_flags);
            if (ablation) config.methods = {iml::Method::iml, iml::Method::ml2, iml::Method::ml1};
            if (!fractions.empty()) {
                config.sweep_fractions.clear();
                for (const auto& f : split_list(fractions)) config.sweep_fractions.push_back(std::stod(f));
            }
            iml::set_log_level(config.verbose ? iml::LogLevel::info : iml::LogLevel::warning);
            const auto result = iml::run_sweep(config);
            for (const auto& [name, fraction] : result.rejected)
                std::cerr << "skipped " << name << " at fraction " << fraction << " (too few minority examples)\n";
            std::cout << "wrote " << (config.out_dir / "sweep.csv").string() << " (" << result.rows.size()
                      << " rows)\n";
            return report_failures(result.failures);
        }
        if (fit->parsed()) {
            const auto raw = iml::load_csv(data_path, iml::LabelColumn::parse(label_column));
            const auto pos = split_list(positives);
            const auto data = iml::binarize_labels(raw, std::set<std::string>(pos.begin(), pos.end()));
            const auto normalized = iml::normalize_zscore(data);
            hp.weighting = weighting == "balanced" ? iml::Weighting::balanced : iml::Weighting::unweighted;
            hp.pair_strategy = strategy == "knn" ? iml::PairStrategy::knn : iml::PairStrategy::random;
            hp.validate();
            iml::SolverOptions opts;
            if (fit_verbose) opts.telemetry = &std::cerr;
            const auto result = iml::fit_iml_detailed(normalized.data, hp, opts, fit_seed);
            result.L.save_csv(out_path);
            std::cout << "objective " << result.solve.initial_objective << " -> " << result.solve.objective << " after "
                      << result.solve.iterations << " iterations (" << iml::to_string(result.solve.reason)
                      << "); L written to " << out_path << '\n';
            return EXIT_SUCCESS;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
