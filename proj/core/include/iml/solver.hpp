#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "iml/dataset.hpp"
#include "iml/metric.hpp"
#include "iml/objective.hpp"
#include "iml/pairs.hpp"

namespace iml {

struct SolverOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-5;   // on the max-abs gradient entry
    double relative_tolerance = 1e-9;   // on (f_k - f_k+1) / max(|f_k|, |f_k+1|, 1)
    std::size_t history_size = 10;      // L-BFGS memory
    double sufficient_decrease = 1e-4;  // Wolfe c1
    double curvature = 0.9;             // Wolfe c2
    int max_line_search_evaluations = 40;
    std::ostream* telemetry = nullptr;  // JSON lines per iteration when set

    void validate() const;
};

enum class StopReason { gradient_tolerance, relative_change, max_iterations, line_search_failure };

std::string_view to_string(StopReason reason);

struct SolverResult {
    ProjectionMatrix L;
    double initial_objective = 0.0;
    double objective = 0.0;
    double max_abs_gradient = 0.0;
    int iterations = 0;
    int evaluations = 0;
    StopReason reason = StopReason::max_iterations;
    double seconds = 0.0;
    std::vector<double> accepted;  // objective after each accepted step, starting with f(L0)
};

/// Returns f(L) and writes dF/dL into the second argument.
using ValueAndGradient = std::function<double(const Eigen::MatrixXd&, Eigen::MatrixXd&)>;

/// Limited-memory BFGS over the entries of L with a strong-Wolfe line search.
/// Accepted steps never increase f. When no Wolfe point exists (hinge kinks),
/// a step that satisfies sufficient decrease is still taken and the memory
/// reset; when even that fails the best iterate is returned.
/// Throws SolverError if f or its gradient is non-finite at an iterate.
SolverResult minimize(const ValueAndGradient& fg, const ProjectionMatrix& L0, const SolverOptions& options = {});

SolverResult minimize(const std::function<double(const Eigen::MatrixXd&)>& f,
                      const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& g, const ProjectionMatrix& L0,
                      const SolverOptions& options = {});

struct FitResult {
    ProjectionMatrix L;
    SolverResult solve;
    std::size_t pair_count = 0;
};

/// Pairs per hp.pair_strategy (kNN with hp.k, or 2 n k random pairs drawn
/// with `seed`), then minimization from L0 = I.
PairSets build_pairs(const LabeledDataset& train, const HyperParams& hp, std::uint64_t seed);

FitResult fit_iml_detailed(const LabeledDataset& train, const HyperParams& hp, const SolverOptions& options = {},
                           std::uint64_t seed = 0);
FitResult fit_with_pairs(const LabeledDataset& train, const PairSets& pairs, const HyperParams& hp,
                         const SolverOptions& options = {});

inline ProjectionMatrix fit_iml(const LabeledDataset& train, const HyperParams& hp, const SolverOptions& options = {},
                                std::uint64_t seed = 0) {
    return fit_iml_detailed(train, hp, options, seed).L;
}

} // namespace iml
