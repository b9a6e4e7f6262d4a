#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fnnsel/data.hpp"
#include "fnnsel/model.hpp"
#include "fnnsel/selector.hpp"

namespace fnnsel {

/// Law of the "true" network used to generate simulated data. Weights on
/// important paths are drawn with a random sign and a magnitude uniform on
/// [min, max], so every important input has a real effect.
///
/// Defaults give each hidden unit k < p_important one steep weight on input k
/// and centre its transition inside the cube, which keeps the q_true units
/// distinguishable from fewer units at moderate n. `uniform_law()` is the
/// plain law with every weight on [0.5, 2] and unit noise.
struct GeneratorConfig {
    std::size_t p_important = 3;
    std::size_t p_noise = 10;
    std::size_t q_true = 3;
    double input_weight_min = 0.5;
    double input_weight_max = 1.5;
    /// Magnitude range of weight (k, k); 0 disables.
    double dominant_weight_min = 5.0;
    double dominant_weight_max = 10.0;
    double output_weight_min = 1.0;
    double output_weight_max = 3.0;
    double bias_range = 1.0;  // hidden and output biases uniform on [-bias_range, bias_range]
    /// When set, each hidden bias places the unit's transition (pre-activation
    /// zero) at a random point of [0.2, 0.8]^p inside the covariate cube.
    bool center_transitions = true;
    double noise_sd = 0.4;

    static GeneratorConfig uniform_law();
    void validate() const;
};

struct TrueModel {
    std::size_t p_important = 0;
    std::size_t p_noise = 0;
    std::size_t q_true = 0;
    ParamVector weights;  // for Architecture({0..p_important-1}, q_true)
    double noise_sd = 1.0;

    std::size_t p_total() const noexcept { return p_important + p_noise; }
    Architecture architecture() const;
    std::size_t k_true() const { return param_count(p_important, q_true); }
};

TrueModel generate_true_model(std::uint64_t seed, const GeneratorConfig& config = {});

/// Covariates i.i.d. U(0, 1); y = g(x) + N(0, noise_sd^2). Columns are named
/// x1..xP with the important inputs first.
Dataset simulate_dataset(const TrueModel& model, std::size_t n, std::uint64_t seed);

struct ReplicateMetrics {
    std::size_t replicate = 0;
    bool ok = false;
    std::string error;
    std::size_t c = 0;  // noise inputs dropped
    bool pi_hit = false;
    bool ph_hit = false;
    bool pt_hit = false;
    std::size_t selected_p = 0;
    std::size_t selected_q = 0;
    std::size_t selected_k = 0;
    std::string selected_inputs;  // covariate names, comma-separated
    double objective = 0.0;
    double bic = 0.0;
    double aic = 0.0;
    double test_mse = 0.0;  // on a fresh dataset of round(0.2 n) rows
    std::size_t fits = 0;
    double wall_time = 0.0;  // seconds
};

/// Scores a selected architecture against the truth.
ReplicateMetrics score(const TrueModel& truth, const Architecture& selected);

struct AggregateMetrics {
    std::size_t replicates = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double c_mean = 0.0;
    double pi = 0.0;
    double ph = 0.0;
    double pt = 0.0;
    double median_time = 0.0;
    double median_k = 0.0;
    double median_test_mse = 0.0;
};

/// Aggregates over completed replicates; failures are only counted.
AggregateMetrics aggregate(const std::vector<ReplicateMetrics>& replicates);

struct SimulationPlan {
    GeneratorConfig generator;
    std::size_t n = 1000;
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    SelectionConfig selection;  // selection.fit.seed is overridden per replicate
    std::size_t threads = 1;    // replicates run concurrently when > 1
};

struct SimulationResult {
    std::vector<ReplicateMetrics> replicates;
    AggregateMetrics aggregate;
};

/// Seeds of replicate r depend only on (plan.seed, r).
ReplicateMetrics run_replicate(const SimulationPlan& plan, std::size_t r);

using ReplicateCallback = std::function<void(const ReplicateMetrics&)>;

SimulationResult run_replicates(const SimulationPlan& plan, const ReplicateCallback& on_done = {});

}  // namespace fnnsel
