#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "iml/eval.hpp"

namespace iml {
namespace {

nlohmann::json to_json(const HyperParams& hp) {
    return {{"margin", hp.margin},
            {"lambda", hp.lambda},
            {"tradeoff", hp.tradeoff},
            {"k", hp.k},
            {"weighting", hp.weighting == Weighting::balanced ? "balanced" : "unweighted"},
            {"pair_strategy", hp.pair_strategy == PairStrategy::knn ? "knn" : "random"}};
}

} // namespace

void EvalReport::write_csv(std::ostream& out, bool include_timing) const {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "dataset,method,preprocess,split,seed,margin,lambda,tradeoff,f1,accuracy,tp,fp,fn,tn";
    if (include_timing) out << ",fit_seconds";
    out << '\n';
    for (const auto& s : splits) {
        out << dataset << ',' << method << ',' << preprocess << ',' << s.split << ',' << s.seed << ',';
        if (s.hp) out << s.hp->margin << ',' << s.hp->lambda << ',' << s.hp->tradeoff;
        else out << ",,";
        out << ',' << s.f1 << ',' << s.accuracy << ',' << s.confusion.tp << ',' << s.confusion.fp << ','
            << s.confusion.fn << ',' << s.confusion.tn;
        if (include_timing) out << ',' << s.fit_seconds;
        out << '\n';
    }
    out.precision(old_precision);
}

void EvalReport::write_json(std::ostream& out) const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : splits) {
        rows.push_back({{"split", s.split},
                        {"seed", s.seed},
                        {"hyperparameters", s.hp ? to_json(*s.hp) : nlohmann::json(nullptr)},
                        {"f1", s.f1},
                        {"accuracy", s.accuracy},
                        {"confusion", {{"tp", s.confusion.tp}, {"fp", s.confusion.fp}, {"fn", s.confusion.fn}, {"tn", s.confusion.tn}}},
                        {"fit_seconds", s.fit_seconds}});
    }
    const auto f = f1();
    const auto a = accuracy();
    const nlohmann::json doc = {{"dataset", dataset},
                                {"method", method},
                                {"preprocess", preprocess},
                                {"splits", rows},
                                {"aggregate", {{"f1_mean", f.mean}, {"f1_std", f.std}, {"accuracy_mean", a.mean}, {"accuracy_std", a.std}}}};
    out << doc.dump(2) << '\n';
}

} // namespace iml
