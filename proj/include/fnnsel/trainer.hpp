#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fnnsel/bfgs.hpp"
#include "fnnsel/criteria.hpp"
#include "fnnsel/data.hpp"
#include "fnnsel/model.hpp"
#include "fnnsel/random.hpp"

namespace fnnsel {

struct FitConfig {
    std::size_t n_init = 10;
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double init_range = 0.7;
    std::uint64_t seed = 1;

    /// Throws InvalidArgument unless every field is positive.
    void validate() const;
};

struct StartOutcome {
    double rss = 0.0;  // +inf when the start failed
    std::size_t iterations = 0;
    OptimizerStatus status = OptimizerStatus::iteration_limit;
};

struct FitDiagnostics {
    std::vector<StartOutcome> starts;
    std::size_t iterations = 0;       // of the best start
    double gradient_norm = 0.0;       // sup-norm at theta_hat
    OptimizerStatus status = OptimizerStatus::iteration_limit;
};

struct FittedModel {
    Architecture arch;
    ParamVector theta;
    FitSummary summary;
    std::size_t starts_converged = 0;
    std::size_t best_start_index = 0;
    FitDiagnostics diagnostics;
};

/// Each component uniform on [-init_range, +init_range].
ParamVector init_params(const Architecture& arch, Rng& rng, double init_range);

/// Seed of random start `start` for a fit seeded with `base`. Prefix-stable:
/// the first m starts of an n-start fit are the starts of an m-start fit.
std::uint64_t start_seed(std::uint64_t base, std::size_t start) noexcept;

/// Multi-start least-squares fit of a fixed architecture.
///
/// Runs BFGS from config.n_init random starts and keeps the lowest RSS, ties
/// going to the lowest start index. Throws UnderdeterminedFit when
/// n < K + 2, AllStartsFailed when no start yields a finite RSS, and
/// DegenerateFit when the best RSS is exactly zero.
FittedModel fit(const Architecture& arch, const Dataset& data, const FitConfig& config);

}  // namespace fnnsel
