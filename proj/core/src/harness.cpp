#include "iml/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "iml/error.hpp"
#include "iml/knn.hpp"
#include "iml/log.hpp"
#include "iml/random.hpp"
#include "iml/registry.hpp"

namespace iml {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::euclidean: return "euclidean";
    case Method::iml: return "iml";
    case Method::ml2: return "ml2";
    case Method::ml1: return "ml1";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Method m : {Method::euclidean, Method::iml, Method::ml2, Method::ml1})
        if (t == to_string(m)) return m;
    throw Error("unknown method '" + text + "' (expected euclidean, iml, ml2 or ml1)");
}

HyperParams method_defaults(Method m, std::size_t k) {
    HyperParams hp;
    hp.k = k;
    hp.weighting = m == Method::iml || m == Method::euclidean ? Weighting::balanced : Weighting::unweighted;
    hp.pair_strategy = m == Method::ml1 ? PairStrategy::random : PairStrategy::knn;
    return hp;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw Error("config: no methods");
    split.validate();
    if (!(sweep_train_fraction > 0.0 && sweep_train_fraction < 1.0))
        throw Error("config: sweep_train_fraction must lie in (0,1)");
    for (double f : sweep_fractions)
        if (!(f > 0.0 && f <= 1.0)) throw Error("config: sweep fraction outside (0,1]");
    if (min_minority == 0) throw Error("config: min_minority must be positive");
    if (jobs == 0) throw Error("config: jobs must be positive");
    if (candidates == 0) throw Error("config: candidates must be positive");
    if (folds < 2) throw Error("config: folds must be at least 2");
    if (knn_k == 0 || pair_k == 0) throw Error("config: k must be positive");
    if (candidates > grid.size()) throw Error("config: more candidates than grid points");
    solver.validate();
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, ExperimentConfig c) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    const auto base_dir = path.parent_path();
    try {
        if (j.contains("registry")) {
            std::filesystem::path p = j["registry"].get<std::string>();
            c.registry = p.is_relative() ? base_dir / p : p;
        }
        if (j.contains("datasets")) c.datasets = j["datasets"].get<std::vector<std::string>>();
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("preprocess")) c.preprocess = parse_resampling(j["preprocess"].get<std::string>());
        if (j.contains("train_fraction")) c.split.train_fraction = j["train_fraction"].get<double>();
        if (j.contains("splits")) c.split.repeats = j["splits"].get<std::size_t>();
        if (j.contains("sweep_fractions")) c.sweep_fractions = j["sweep_fractions"].get<std::vector<double>>();
        if (j.contains("sweep_train_fraction")) c.sweep_train_fraction = j["sweep_train_fraction"].get<double>();
        if (j.contains("min_minority")) c.min_minority = j["min_minority"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
        if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
        if (j.contains("verbose")) c.verbose = j["verbose"].get<bool>();
        if (j.contains("candidates")) c.candidates = j["candidates"].get<std::size_t>();
        if (j.contains("folds")) c.folds = j["folds"].get<std::size_t>();
        if (j.contains("knn_k")) c.knn_k = j["knn_k"].get<std::size_t>();
        if (j.contains("pair_k")) c.pair_k = j["pair_k"].get<std::size_t>();
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            if (g.contains("margins")) c.grid.margins = g["margins"].get<std::vector<double>>();
            if (g.contains("lambdas")) c.grid.lambdas = g["lambdas"].get<std::vector<double>>();
            if (g.contains("tradeoffs")) c.grid.tradeoffs = g["tradeoffs"].get<std::vector<double>>();
        }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            if (s.contains("max_iterations")) c.solver.max_iterations = s["max_iterations"].get<int>();
            if (s.contains("gradient_tolerance")) c.solver.gradient_tolerance = s["gradient_tolerance"].get<double>();
            if (s.contains("relative_tolerance")) c.solver.relative_tolerance = s["relative_tolerance"].get<double>();
            if (s.contains("history_size")) c.solver.history_size = s["history_size"].get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    return load(path, ExperimentConfig{});
}

EvalSettings EvalSettings::from(const ExperimentConfig& config) {
    EvalSettings s;
    s.preprocess = config.preprocess;
    s.candidates = config.candidates;
    s.folds = config.folds;
    s.knn_k = config.knn_k;
    s.pair_k = config.pair_k;
    s.grid = config.grid;
    s.solver = config.solver;
    s.solver.telemetry = nullptr;
    return s;
}

SplitRecord evaluate_split(const LabeledDataset& train, const LabeledDataset& test, Method method,
                           const EvalSettings& settings, std::uint64_t seed, std::ostream* telemetry) {
    const auto start = std::chrono::steady_clock::now();
    const auto stats = Standardizer::fit(train.features());
    const LabeledDataset train_z = stats.transform(train);
    const LabeledDataset test_z = stats.transform(test);
    const LabeledDataset fit_set = resample(train_z, settings.preprocess, derive_seed(seed, "resample"));

    SplitRecord record;
    record.seed = seed;
    ProjectionMatrix L = ProjectionMatrix::identity(train.dim());

    if (method != Method::euclidean) {
        const auto candidates = sample_hp_combinations(settings.grid, settings.candidates, derive_seed(seed, "hp"),
                                                       method_defaults(method, settings.pair_k));
        CrossValidationOptions cv;
        cv.folds = settings.folds;
        cv.seed = derive_seed(seed, "cv");
        cv.resampling = settings.preprocess;
        cv.solver = settings.solver;
        cv.knn_k = settings.knn_k;
        const auto chosen = cross_validate(train_z, candidates, cv);

        SolverOptions final_opts = settings.solver;
        final_opts.telemetry = telemetry;
        L = fit_iml_detailed(fit_set, chosen.best, final_opts, derive_seed(seed, "pairs")).L;
        record.hp = chosen.best;
    }

    const auto model = KnnModel::fit(L, fit_set, settings.knn_k);
    const auto predicted = knn_predict(model, L, test_z.features());
    record.confusion = confusion(test_z.labels(), predicted);
    record.f1 = f1(record.confusion);
    record.accuracy = accuracy(record.confusion);
    record.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

std::uint64_t dataset_seed(std::uint64_t master, std::string_view dataset) {
    return derive_seed(master, hash_tag(dataset));
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

namespace {

struct LoadedDataset {
    std::string name;
    LabeledDataset data;
};

DatasetLoader registry_loader(const ExperimentConfig& config) {
    auto registry = std::make_shared<std::vector<DatasetEntry>>(load_registry(config.registry));
    return [registry](const std::string& name) { return load_entry(find_entry(*registry, name)); };
}

std::vector<std::string> dataset_names(const ExperimentConfig& config) {
    if (!config.datasets.empty()) return config.datasets;
    std::vector<std::string> names;
    for (const auto& e : load_registry(config.registry)) names.push_back(e.name);
    return names;
}

std::vector<LoadedDataset> load_all(const std::vector<std::string>& names, const DatasetLoader& loader,
                                    std::vector<DatasetFailure>& failures) {
    std::vector<LoadedDataset> out;
    for (const auto& name : names) {
        try {
            auto data = loader(name);
            if (!data.has_both_classes()) throw Error("dataset has a single class");
            out.push_back({name, std::move(data)});
        } catch (const std::exception& e) {
            log_warning("dataset " + name + ": " + e.what());
            failures.push_back({name, e.what()});
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    body(out);
    if (!out) throw Error("failed writing " + path.string());
}

std::string fraction_label(double f) {
    std::ostringstream s;
    s << f;
    return s.str();
}

} // namespace

void write_summary_csv(std::ostream& out, const std::vector<EvalReport>& reports, const std::vector<Method>& methods) {
    std::vector<std::string> datasets;
    std::map<std::pair<std::string, std::string>, Aggregate> cells;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
        cells[{r.dataset, r.method}] = r.f1();
    }
    out << "dataset";
    for (Method m : methods) out << ',' << to_string(m) << "_f1_mean," << to_string(m) << "_f1_std";
    out << '\n';
    out << std::fixed << std::setprecision(4);
    std::vector<double> mean_sum(methods.size(), 0.0), std_sum(methods.size(), 0.0);
    std::vector<std::size_t> counted(methods.size(), 0);
    for (const auto& d : datasets) {
        out << d;
        for (std::size_t i = 0; i < methods.size(); ++i) {
            const auto it = cells.find({d, std::string(to_string(methods[i]))});
            if (it == cells.end()) {
                out << ",,";
                continue;
            }
            out << ',' << 100.0 * it->second.mean << ',' << 100.0 * it->second.std;
            mean_sum[i] += 100.0 * it->second.mean;
            std_sum[i] += 100.0 * it->second.std;
            ++counted[i];
        }
        out << '\n';
    }
    out << "Mean";
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (counted[i] == 0) out << ",,";
        else out << ',' << mean_sum[i] / counted[i] << ',' << std_sum[i] / counted[i];
    }
    out << '\n';
    out.unsetf(std::ios::floatfield);
}

BenchmarkResult run_benchmark(const ExperimentConfig& config, const DatasetLoader& loader_in) {
    config.validate();
    const DatasetLoader loader = loader_in ? loader_in : registry_loader(config);
    const auto names = loader_in && config.datasets.empty() ? std::vector<std::string>{} : dataset_names(config);

    BenchmarkResult result;
    const auto datasets = load_all(names, loader, result.failures);
    const EvalSettings settings = EvalSettings::from(config);
    const std::size_t n_methods = config.methods.size();
    const std::size_t n_splits = config.split.repeats;

    // Splits are computed once per dataset and shared by every method.
    std::vector<std::vector<TrainTestSplit>> splits(datasets.size());
    std::vector<std::optional<std::string>> errors(datasets.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        SplitSpec spec = config.split;
        spec.seed = dataset_seed(config.seed, datasets[d].name);
        try {
            for (std::size_t r = 0; r < n_splits; ++r) splits[d].push_back(stratified_split(datasets[d].data, spec, r));
        } catch (const std::exception& e) {
            errors[d] = e.what();
        }
    }

    const std::size_t total = datasets.size() * n_methods * n_splits;
    std::vector<SplitRecord> records(total);
    std::vector<std::string> telemetry(config.verbose ? total : 0);
    std::mutex error_mutex;

    parallel_for(total, config.jobs, [&](std::size_t job) {
        const std::size_t d = job / (n_methods * n_splits);
        const std::size_t m = (job / n_splits) % n_methods;
        const std::size_t r = job % n_splits;
        {
            std::lock_guard lock(error_mutex);
            if (errors[d]) return;
        }
        const auto& name = datasets[d].name;
        const std::uint64_t split_seed = derive_seed(dataset_seed(config.seed, name), r);
        try {
            std::ostringstream tel;
            if (config.verbose)
                tel << nlohmann::json{{"event", "fit"}, {"dataset", name}, {"method", to_string(config.methods[m])},
                                      {"split", r}}.dump()
                    << '\n';
            auto rec = evaluate_split(splits[d][r].train, splits[d][r].test, config.methods[m], settings,
                                      derive_seed(split_seed, "eval"), config.verbose ? &tel : nullptr);
            rec.split = r;
            rec.seed = split_seed;
            records[job] = std::move(rec);
            if (config.verbose) {
                telemetry[job] = tel.str();
                std::ostringstream msg;
                msg << name << ' ' << to_string(config.methods[m]) << " split " << r << ": F1 "
                    << records[job].f1;
                log_info(msg.str());
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(error_mutex);
            if (!errors[d]) errors[d] = e.what();
        }
    });

    std::filesystem::create_directories(config.out_dir);
    const std::string pre(to_string(config.preprocess));
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        if (errors[d]) {
            log_warning("dataset " + datasets[d].name + ": " + *errors[d]);
            result.failures.push_back({datasets[d].name, *errors[d]});
            continue;
        }
        for (std::size_t m = 0; m < n_methods; ++m) {
            EvalReport report;
            report.dataset = datasets[d].name;
            report.method = std::string(to_string(config.methods[m]));
            report.preprocess = pre;
            const std::size_t first = (d * n_methods + m) * n_splits;
            report.splits.assign(records.begin() + static_cast<std::ptrdiff_t>(first),
                                 records.begin() + static_cast<std::ptrdiff_t>(first + n_splits));
            const auto stem = report.dataset + "_" + report.method + "_" + pre;
            write_file(config.out_dir / (stem + ".csv"), [&](std::ostream& o) { report.write_csv(o); });
            write_file(config.out_dir / (stem + ".json"), [&](std::ostream& o) { report.write_json(o); });
            result.reports.push_back(std::move(report));
        }
    }
    write_file(config.out_dir / "summary.csv",
               [&](std::ostream& o) { write_summary_csv(o, result.reports, config.methods); });
    if (config.verbose) {
        write_file(config.out_dir / "telemetry.jsonl", [&](std::ostream& o) {
            for (const auto& t : telemetry) o << t;
        });
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "dataset,fraction,method,metric,mean,std\n";
    for (const auto& r : rows)
        out << r.dataset << ',' << fraction_label(r.fraction) << ',' << r.method << ',' << r.metric << ','
            << r.value.mean << ',' << r.value.std << '\n';
    out.precision(old);
}

SweepResult run_sweep(const ExperimentConfig& config, const DatasetLoader& loader_in) {
    config.validate();
    const DatasetLoader loader = loader_in ? loader_in : registry_loader(config);
    const auto names = loader_in && config.datasets.empty() ? std::vector<std::string>{} : dataset_names(config);

    SweepResult result;
    const auto datasets = load_all(names, loader, result.failures);
    const EvalSettings settings = EvalSettings::from(config);

    struct Cell {
        std::size_t dataset;
        std::size_t fraction;
    };
    std::vector<Cell> cells;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const auto& data = datasets[d].data;
        for (std::size_t f = 0; f < config.sweep_fractions.size(); ++f) {
            const ImbalanceTarget target{config.sweep_fractions[f], config.min_minority};
            if (!imbalance_variant_counts(data.count(Label::positive), data.count(Label::negative), target)) {
                result.rejected.emplace_back(datasets[d].name, config.sweep_fractions[f]);
                continue;
            }
            cells.push_back({d, f});
        }
    }

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_iter = config.split.repeats;
    const std::size_t total = cells.size() * n_iter * n_methods;
    std::vector<double> f1s(total), accs(total);
    std::vector<std::optional<std::string>> errors(datasets.size());
    std::mutex error_mutex;

    parallel_for(total, config.jobs, [&](std::size_t job) {
        const std::size_t c = job / (n_iter * n_methods);
        const std::size_t r = (job / n_methods) % n_iter;
        const std::size_t m = job % n_methods;
        const auto [d, f] = cells[c];
        {
            std::lock_guard lock(error_mutex);
            if (errors[d]) return;
        }
        try {
            const std::uint64_t base = derive_seed(derive_seed(dataset_seed(config.seed, datasets[d].name), "sweep"), f);
            const std::uint64_t variant_seed = derive_seed(base, r);
            const ImbalanceTarget target{config.sweep_fractions[f], config.min_minority};
            const auto variant = make_imbalance_variant(datasets[d].data, target, variant_seed);
            if (!variant) throw Error("variant unexpectedly rejected");
            const SplitSpec spec{config.sweep_train_fraction, 1, derive_seed(variant_seed, "split")};
            const auto split = stratified_split(*variant, spec, 0);
            const auto rec = evaluate_split(split.train, split.test, config.methods[m], settings,
                                            derive_seed(variant_seed, "eval"));
            f1s[job] = rec.f1;
            accs[job] = rec.accuracy;
            if (config.verbose) {
                std::ostringstream msg;
                msg << datasets[d].name << " fraction " << config.sweep_fractions[f] << ' '
                    << to_string(config.methods[m]) << " iteration " << r << ": F1 " << rec.f1;
                log_info(msg.str());
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(error_mutex);
            if (!errors[d]) errors[d] = e.what();
        }
    });

    for (std::size_t d = 0; d < datasets.size(); ++d)
        if (errors[d]) {
            log_warning("dataset " + datasets[d].name + ": " + *errors[d]);
            result.failures.push_back({datasets[d].name, *errors[d]});
        }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [d, f] = cells[c];
        if (errors[d]) continue;
        for (std::size_t m = 0; m < n_methods; ++m) {
            std::vector<double> fv, av;
            for (std::size_t r = 0; r < n_iter; ++r) {
                const std::size_t job = (c * n_iter + r) * n_methods + m;
                fv.push_back(f1s[job]);
                av.push_back(accs[job]);
            }
            const std::string method(to_string(config.methods[m]));
            result.rows.push_back({datasets[d].name, config.sweep_fractions[f], method, "f1", aggregate(fv), n_iter});
            result.rows.push_back(
                {datasets[d].name, config.sweep_fractions[f], method, "accuracy", aggregate(av), n_iter});
        }
    }

    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, result.rows); });
    return result;
}

} // namespace iml
