#include "iml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "iml/error.hpp"
#include "iml/knn.hpp"
#include "iml/random.hpp"

namespace iml {

ConfusionCounts confusion(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) throw Error("confusion: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == Label::positive;
        const bool guess = predicted[i] == Label::positive;
        if (actual && guess) ++c.tp;
        else if (!actual && guess) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw Error("confusion: length mismatch");
    auto convert = [](std::span<const int> in) {
        std::vector<Label> out;
        out.reserve(in.size());
        for (int v : in) {
            if (v != 1 && v != -1) throw Error("confusion: label " + std::to_string(v) + " outside {-1,+1}");
            out.push_back(static_cast<Label>(v));
        }
        return out;
    };
    const auto t = convert(truth);
    const auto p = convert(predicted);
    return confusion(std::span<const Label>(t), std::span<const Label>(p));
}

double precision(const ConfusionCounts& c) {
    return c.tp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ConfusionCounts& c) {
    return c.tp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(const ConfusionCounts& c) {
    if (c.tp == 0) return 0.0;
    const double p = precision(c), r = recall(c);
    return 2.0 * p * r / (p + r);
}

double accuracy(const ConfusionCounts& c) {
    return c.total() == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::vector<double> HyperGrid::default_tradeoffs() {
    std::vector<double> out;
    for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
    return out;
}

std::vector<HyperParams> sample_hp_combinations(const HyperGrid& grid, std::size_t count, std::uint64_t seed,
                                                const HyperParams& base) {
    if (grid.size() == 0) throw Error("hyper-parameter grid is empty");
    if (count > grid.size())
        throw Error("requested " + std::to_string(count) + " combinations from a grid of " +
                    std::to_string(grid.size()));
    std::vector<HyperParams> all;
    all.reserve(grid.size());
    for (double m : grid.margins)
        for (double l : grid.lambdas)
            for (double a : grid.tradeoffs) {
                HyperParams hp = base;
                hp.margin = m;
                hp.lambda = l;
                hp.tradeoff = a;
                hp.validate();
                all.push_back(hp);
            }
    Rng rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    return all;
}

CrossValidationResult cross_validate(const LabeledDataset& train, std::span<const HyperParams> candidates,
                                     const CrossValidationOptions& options) {
    if (candidates.empty()) throw Error("cross_validate: no candidates");
    const auto folds = stratified_folds(train.labels(), options.folds, options.seed);

    CrossValidationResult result;
    if (candidates.size() == 1) {
        result.best = candidates.front();
        return result;
    }

    result.scores.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) result.scores[c].hp = candidates[c];

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> fit_rows;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) fit_rows.insert(fit_rows.end(), folds[g].begin(), folds[g].end());
        std::sort(fit_rows.begin(), fit_rows.end());

        const std::uint64_t fold_seed = derive_seed(options.seed, f);
        const LabeledDataset fit_part =
            resample(train.subset(fit_rows), options.resampling, derive_seed(fold_seed, "resample"));
        const LabeledDataset held_out = train.subset(folds[f]);

        // Pair sets depend only on (strategy, k) here, so candidates share them.
        std::map<std::pair<PairStrategy, std::size_t>, PairSets> pair_cache;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const HyperParams& hp = candidates[c];
            const auto key = std::make_pair(hp.pair_strategy, hp.k);
            auto it = pair_cache.find(key);
            if (it == pair_cache.end())
                it = pair_cache.emplace(key, build_pairs(fit_part, hp, derive_seed(fold_seed, "pairs"))).first;
            const auto fitted = fit_with_pairs(fit_part, it->second, hp, options.solver);
            const auto model = KnnModel::fit(fitted.L, fit_part, options.knn_k);
            const auto predicted = knn_predict(model, fitted.L, held_out.features());
            result.scores[c].fold_f1.push_back(f1(confusion(held_out.labels(), predicted)));
        }
    }

    for (std::size_t c = 0; c < candidates.size(); ++c) {
        auto& s = result.scores[c];
        s.mean_f1 = std::accumulate(s.fold_f1.begin(), s.fold_f1.end(), 0.0) / static_cast<double>(s.fold_f1.size());
        if (s.mean_f1 > result.scores[result.best_index].mean_f1) result.best_index = c;
    }
    result.best = candidates[result.best_index];
    return result;
}

Aggregate aggregate(std::span<const double> values) {
    Aggregate out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / n);
    return out;
}

Aggregate EvalReport::f1() const {
    std::vector<double> v;
    for (const auto& s : splits) v.push_back(s.f1);
    return aggregate(v);
}

Aggregate EvalReport::accuracy() const {
    std::vector<double> v;
    for (const auto& s : splits) v.push_back(s.accuracy);
    return aggregate(v);
}

} // namespace iml
