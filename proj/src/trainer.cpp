#include "fnnsel/trainer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fnnsel/errors.hpp"

namespace fnnsel {

void FitConfig::validate() const {
    if (n_init == 0) throw InvalidArgument("n_init must be positive");
    if (max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
    if (!(gradient_tolerance > 0.0)) throw InvalidArgument("gradient_tolerance must be positive");
    if (!(init_range > 0.0)) throw InvalidArgument("init_range must be positive");
}

ParamVector init_params(const Architecture& arch, Rng& rng, double init_range) {
    ParamVector theta(arch.p(), arch.q());
    for (auto& v : theta.values()) v = rng.uniform(-init_range, init_range);
    return theta;
}

std::uint64_t start_seed(std::uint64_t base, std::size_t start) noexcept {
    return derive_seed(base, {0x5354415254ULL, static_cast<std::uint64_t>(start)});
}

FittedModel fit(const Architecture& arch, const Dataset& data, const FitConfig& config) {
    config.validate();
    if (arch.q() == 0) throw InvalidArgument("hidden node count must be at least 1");
    const std::size_t k = arch.param_count();
    if (data.rows() < k + 2)
        throw UnderdeterminedFit("architecture " + arch.key() + " has K = " + std::to_string(k) + " but only " +
                                 std::to_string(data.rows()) + " rows");

    RssObjective objective(arch, data);
    const GradientFunction f = [&objective](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        return objective.value_and_gradient(x, g);
    };
    const BfgsOptions options{config.max_iterations, config.gradient_tolerance};

    FittedModel best;
    best.arch = arch;
    best.diagnostics.starts.reserve(config.n_init);
    double best_rss = std::numeric_limits<double>::infinity();
    bool found = false;

    for (std::size_t s = 0; s < config.n_init; ++s) {
        Rng rng(start_seed(config.seed, s));
        ParamVector start = init_params(arch, rng, config.init_range);
        BfgsResult r = minimize_bfgs(f, std::move(start.values()), options);

        StartOutcome outcome{std::isfinite(r.value) ? r.value : std::numeric_limits<double>::infinity(), r.iterations,
                             r.status};
        best.diagnostics.starts.push_back(outcome);
        if (r.status == OptimizerStatus::gradient_converged) ++best.starts_converged;
        if (std::isfinite(r.value) && r.value < best_rss) {
            found = true;
            best_rss = r.value;
            best.best_start_index = s;
            best.theta = ParamVector(arch.p(), arch.q(), std::move(r.x));
            best.diagnostics.iterations = r.iterations;
            best.diagnostics.gradient_norm = r.gradient_norm;
            best.diagnostics.status = r.status;
        }
    }
    if (!found) throw AllStartsFailed("every start failed for architecture " + arch.key());

    best.summary = summarize(best_rss, data.rows(), k);
    return best;
}

}  // namespace fnnsel
