#include "iml/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "iml/error.hpp"

namespace iml {
namespace {

double dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }
double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Point {
    Eigen::MatrixXd x;
    double f = 0.0;
    Eigen::MatrixXd g;
    double slope = 0.0;  // directional derivative along the search direction
};

struct LineSearchOutcome {
    enum class Kind { wolfe, armijo_only, failed } kind = Kind::failed;
    Point point;
    double step = 0.0;
};

class Evaluator {
public:
    Evaluator(const ValueAndGradient& fg, int& evaluations) : fg_(fg), evaluations_(evaluations) {}

    Point at(const Eigen::MatrixXd& x, const Eigen::MatrixXd& direction, int iteration) const {
        Point p;
        p.x = x;
        p.f = fg_(p.x, p.g);
        ++evaluations_;
        if (std::isfinite(p.f)) {
            if (p.g.rows() != x.rows() || p.g.cols() != x.cols())
                throw SolverError("gradient shape does not match L", iteration);
            if (!p.g.allFinite()) throw SolverError("non-finite gradient", iteration);
            p.slope = direction.size() ? dot(p.g, direction) : 0.0;
        }
        return p;
    }

private:
    const ValueAndGradient& fg_;
    int& evaluations_;
};

// Minimizer of the cubic through (a, fa, da), (b, fb, db), kept inside the
// bracket's interior; falls back to bisection.
double interpolate(double a, double fa, double da, double b, double fb, double db) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    double t = 0.5 * (a + b);
    if (std::isfinite(fa) && std::isfinite(fb)) {
        const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
        const double disc = d1 * d1 - da * db;
        if (disc >= 0.0) {
            const double d2 = std::copysign(std::sqrt(disc), b - a);
            const double denom = db - da + 2.0 * d2;
            if (denom != 0.0) {
                const double c = b - (b - a) * (db + d2 - d1) / denom;
                if (std::isfinite(c)) t = c;
            }
        }
    }
    return std::clamp(t, lo + margin, hi - margin);
}

// Strong-Wolfe bracketing and zoom along `direction` from `start`.
LineSearchOutcome line_search(const Evaluator& eval, const Point& start, const Eigen::MatrixXd& direction,
                              double initial_step, const SolverOptions& opt, int iteration) {
    const double f0 = start.f;
    const double d0 = start.slope;
    const double c1 = opt.sufficient_decrease;
    const double c2 = opt.curvature;
    int budget = opt.max_line_search_evaluations;

    LineSearchOutcome best;  // best Armijo point seen, for the fallback
    auto note_armijo = [&](const Point& p, double step) {
        if (std::isfinite(p.f) && p.f <= f0 + c1 * step * d0 && p.f < f0 &&
            (best.kind == LineSearchOutcome::Kind::failed || p.f < best.point.f)) {
            best.kind = LineSearchOutcome::Kind::armijo_only;
            best.point = p;
            best.step = step;
        }
    };
    auto wolfe = [&](const Point& p, double step) {
        LineSearchOutcome out;
        out.kind = LineSearchOutcome::Kind::wolfe;
        out.point = p;
        out.step = step;
        return out;
    };

    auto zoom = [&](double lo, Point p_lo, double hi, Point p_hi) -> LineSearchOutcome {
        while (budget-- > 0) {
            const double step = interpolate(lo, p_lo.f, p_lo.slope, hi, p_hi.f, p_hi.slope);
            Point p = eval.at(start.x + step * direction, direction, iteration);
            note_armijo(p, step);
            if (!std::isfinite(p.f) || p.f > f0 + c1 * step * d0 || p.f >= p_lo.f) {
                hi = step;
                p_hi = std::move(p);
            } else {
                if (std::abs(p.slope) <= -c2 * d0) return wolfe(p, step);
                if (p.slope * (hi - lo) >= 0.0) {
                    hi = lo;
                    p_hi = p_lo;
                }
                lo = step;
                p_lo = std::move(p);
            }
            if (std::abs(hi - lo) <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo))) break;
        }
        return best;
    };

    double prev_step = 0.0;
    Point prev = start;
    double step = initial_step;
    for (int i = 0; budget-- > 0; ++i) {
        Point p = eval.at(start.x + step * direction, direction, iteration);
        note_armijo(p, step);
        if (!std::isfinite(p.f) || p.f > f0 + c1 * step * d0 || (i > 0 && p.f >= prev.f))
            return zoom(prev_step, prev, step, p);
        if (std::abs(p.slope) <= -c2 * d0) return wolfe(p, step);
        if (p.slope >= 0.0) return zoom(step, p, prev_step, prev);
        prev_step = step;
        prev = std::move(p);
        step *= 2.0;
        if (!std::isfinite(step)) break;
    }
    return best;
}

void emit(std::ostream* out, const nlohmann::json& line) {
    if (out) *out << line.dump() << '\n';
}

} // namespace

void SolverOptions::validate() const {
    if (max_iterations <= 0) throw Error("max_iterations must be positive");
    if (!(gradient_tolerance > 0.0)) throw Error("gradient_tolerance must be positive");
    if (!(relative_tolerance > 0.0)) throw Error("relative_tolerance must be positive");
    if (history_size == 0) throw Error("history_size must be positive");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < curvature && curvature < 1.0))
        throw Error("line search constants need 0 < c1 < c2 < 1");
    if (max_line_search_evaluations <= 0) throw Error("max_line_search_evaluations must be positive");
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::gradient_tolerance: return "gradient_tolerance";
    case StopReason::relative_change: return "relative_change";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::line_search_failure: return "line_search_failure";
    }
    return "unknown";
}

SolverResult minimize(const ValueAndGradient& fg, const ProjectionMatrix& L0, const SolverOptions& opt) {
    opt.validate();
    const auto started = std::chrono::steady_clock::now();

    SolverResult result;
    const Evaluator eval(fg, result.evaluations);
    Point current = eval.at(L0.matrix(), Eigen::MatrixXd(), 0);
    if (!std::isfinite(current.f)) throw SolverError("non-finite objective at the initial point", 0);
    result.initial_objective = current.f;
    result.accepted.push_back(current.f);

    std::deque<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> memory;  // (s, y)
    std::deque<double> rho;
    auto finish = [&](StopReason reason) {
        result.L = ProjectionMatrix(current.x);
        result.objective = current.f;
        result.max_abs_gradient = max_abs(current.g);
        result.reason = reason;
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        emit(opt.telemetry, {{"event", "done"},
                             {"reason", std::string(to_string(reason))},
                             {"iterations", result.iterations},
                             {"evaluations", result.evaluations},
                             {"objective", result.objective},
                             {"max_abs_gradient", result.max_abs_gradient},
                             {"seconds", result.seconds}});
        return result;
    };

    if (max_abs(current.g) < opt.gradient_tolerance) return finish(StopReason::gradient_tolerance);

    while (result.iterations < opt.max_iterations) {
        const int iteration = result.iterations + 1;

        // Two-loop recursion: direction = -H g.
        Eigen::MatrixXd direction = -current.g;
        std::vector<double> alpha(memory.size());
        for (std::size_t i = memory.size(); i-- > 0;) {
            alpha[i] = rho[i] * dot(memory[i].first, direction);
            direction -= alpha[i] * memory[i].second;
        }
        if (!memory.empty()) {
            const auto& [s, y] = memory.back();
            direction *= dot(s, y) / dot(y, y);
        }
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const double beta = rho[i] * dot(memory[i].second, direction);
            direction += (alpha[i] - beta) * memory[i].first;
        }

        double slope = dot(current.g, direction);
        if (!(slope < 0.0)) {
            memory.clear();
            rho.clear();
            direction = -current.g;
            slope = dot(current.g, direction);
        }
        current.slope = slope;
        double first_step = memory.empty() ? std::min(1.0, 1.0 / std::sqrt(current.g.squaredNorm())) : 1.0;

        auto search = line_search(eval, current, direction, first_step, opt, iteration);
        if (search.kind == LineSearchOutcome::Kind::failed && !memory.empty()) {
            // Retry once along steepest descent with a fresh memory.
            memory.clear();
            rho.clear();
            direction = -current.g;
            current.slope = dot(current.g, direction);
            first_step = std::min(1.0, 1.0 / std::sqrt(current.g.squaredNorm()));
            search = line_search(eval, current, direction, first_step, opt, iteration);
        }
        if (search.kind == LineSearchOutcome::Kind::failed) return finish(StopReason::line_search_failure);

        Point next = std::move(search.point);
        Eigen::MatrixXd s = next.x - current.x;
        Eigen::MatrixXd y = next.g - current.g;
        const double sy = dot(s, y);
        if (search.kind == LineSearchOutcome::Kind::wolfe && sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
            memory.emplace_back(std::move(s), std::move(y));
            rho.push_back(1.0 / sy);
            if (memory.size() > opt.history_size) {
                memory.pop_front();
                rho.pop_front();
            }
        } else if (search.kind == LineSearchOutcome::Kind::armijo_only) {
            memory.clear();
            rho.clear();
        }

        const double previous = current.f;
        current = std::move(next);
        result.iterations = iteration;
        result.accepted.push_back(current.f);
        emit(opt.telemetry, {{"event", "iteration"},
                             {"iteration", iteration},
                             {"objective", current.f},
                             {"max_abs_gradient", max_abs(current.g)},
                             {"step", search.step},
                             {"wolfe", search.kind == LineSearchOutcome::Kind::wolfe},
                             {"evaluations", result.evaluations}});

        if (max_abs(current.g) < opt.gradient_tolerance) return finish(StopReason::gradient_tolerance);
        const double scale = std::max({std::abs(previous), std::abs(current.f), 1.0});
        if ((previous - current.f) <= opt.relative_tolerance * scale) return finish(StopReason::relative_change);
    }
    return finish(StopReason::max_iterations);
}

SolverResult minimize(const std::function<double(const Eigen::MatrixXd&)>& f,
                      const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& g, const ProjectionMatrix& L0,
                      const SolverOptions& options) {
    return minimize(
        [&](const Eigen::MatrixXd& L, Eigen::MatrixXd& grad) {
            const double value = f(L);
            if (std::isfinite(value)) grad = g(L);
            return value;
        },
        L0, options);
}

PairSets build_pairs(const LabeledDataset& train, const HyperParams& hp, std::uint64_t seed) {
    if (hp.pair_strategy == PairStrategy::knn) return build_pairs_knn(train, hp.k);
    return build_pairs_random(train, 2 * train.size() * hp.k, seed);
}

FitResult fit_with_pairs(const LabeledDataset& train, const PairSets& pairs, const HyperParams& hp,
                         const SolverOptions& options) {
    const PairObjective problem(train, pairs, hp);
    FitResult out;
    out.pair_count = pairs.total();
    out.solve = minimize([&](const Eigen::MatrixXd& L, Eigen::MatrixXd& g) { return problem.value_and_gradient(L, g); },
                         ProjectionMatrix::identity(train.dim()), options);
    out.L = out.solve.L;
    return out;
}

FitResult fit_iml_detailed(const LabeledDataset& train, const HyperParams& hp, const SolverOptions& options,
                           std::uint64_t seed) {
    hp.validate();
    if (!train.has_both_classes()) throw Error("fit_iml needs both classes in the training set");
    return fit_with_pairs(train, build_pairs(train, hp, seed), hp, options);
}

} // namespace iml
