#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fnnsel/data.hpp"
#include "fnnsel/model.hpp"
#include "fnnsel/trainer.hpp"

namespace fnnsel {

enum class Objective { bic, aic, oos };
enum class Strategy { hif, ihf, hi, ih, f };
enum class Phase { hidden, input, fine_hidden, fine_input };
enum class Decision { evaluated, accepted, failed };

std::string_view to_string(Objective objective) noexcept;
std::string_view to_string(Strategy strategy) noexcept;
std::string_view to_string(Phase phase) noexcept;
std::string_view to_string(Decision decision) noexcept;
Objective parse_objective(std::string_view text);
Strategy parse_strategy(std::string_view text);

struct SelectionConfig {
    std::size_t q_max = 10;
    Objective objective = Objective::bic;
    Strategy strategy = Strategy::hif;
    FitConfig fit;
    double validation_fraction = 0.2;  // OOS only: validation size relative to training size
    std::size_t threads = 1;

    void validate() const;
};

/// One candidate evaluation at a decision point.
struct TraceStep {
    Phase phase = Phase::hidden;
    std::size_t round = 0;  // decision-point counter, shared across phases
    Architecture arch;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double rss = std::numeric_limits<double>::quiet_NaN();
    std::size_t starts_converged = 0;
    std::size_t best_start = 0;
    std::size_t iterations = 0;
    OptimizerStatus status = OptimizerStatus::iteration_limit;
    Decision decision = Decision::evaluated;
    std::string error;  // set when decision == failed
};

struct SelectionTrace {
    std::vector<TraceStep> steps;

    /// Accepted steps in order; the last one is the selected architecture.
    std::vector<const TraceStep*> accepted() const;
};

/// Per-architecture seed: the same architecture always receives the same
/// random starts within one selection run, whatever phase asks for it.
std::uint64_t candidate_seed(std::uint64_t base, const Architecture& arch) noexcept;

/// Fits candidate architectures under one objective and memoizes the results.
///
/// Batches of candidates are fitted concurrently when threads > 1; results are
/// stored in canonical (request) order, so outcomes do not depend on the
/// thread count.
class CandidateEvaluator {
public:
    struct Evaluation {
        Architecture arch;
        std::shared_ptr<const FittedModel> model;  // null when the fit failed
        double objective = std::numeric_limits<double>::infinity();
        std::string error;

        bool ok() const noexcept { return model != nullptr; }
    };

    /// `validation` must be non-null when objective == oos; it is ignored otherwise.
    CandidateEvaluator(const Dataset& train, const Dataset* validation, Objective objective, FitConfig fit,
                       std::size_t threads = 1);

    std::vector<Evaluation> evaluate(std::span<const Architecture> candidates);
    Evaluation evaluate(const Architecture& candidate);

    const Dataset& train() const noexcept { return train_; }
    Objective objective() const noexcept { return objective_; }
    std::size_t fits_performed() const noexcept { return cache_.size(); }

private:
    Evaluation compute(const Architecture& arch) const;

    const Dataset& train_;
    const Dataset* validation_;
    Objective objective_;
    FitConfig fit_;
    std::size_t threads_;
    std::map<Architecture, Evaluation> cache_;
};

/// Shared state of one selection run: the evaluator, the incumbent model,
/// and the trace being built.
class SelectionContext {
public:
    explicit SelectionContext(CandidateEvaluator& evaluator) : evaluator_(evaluator) {}

    CandidateEvaluator& evaluator() noexcept { return evaluator_; }
    SelectionTrace& trace() noexcept { return trace_; }
    const SelectionTrace& trace() const noexcept { return trace_; }

    const std::optional<Architecture>& incumbent() const noexcept { return incumbent_; }
    double incumbent_objective() const noexcept { return incumbent_objective_; }

    /// Evaluates a batch at one decision point and appends it to the trace.
    /// Returns the index of each candidate's step in the trace.
    std::vector<std::size_t> record(Phase phase, std::span<const Architecture> candidates);

    /// Makes trace step `step` the incumbent and marks it accepted.
    void accept(std::size_t step);

    /// Makes `arch` the incumbent, evaluating it under `phase` if the current
    /// incumbent differs. Throws SelectionFailure if it cannot be fitted.
    void start_from(Phase phase, const Architecture& arch);

private:
    CandidateEvaluator& evaluator_;
    SelectionTrace trace_;
    std::optional<Architecture> incumbent_;
    double incumbent_objective_ = std::numeric_limits<double>::infinity();
    std::size_t round_ = 0;
};

/// Fits q = 1..q_max on `inputs`; returns the minimizing q, ties toward the
/// smaller q. When an incumbent exists, it is replaced only on strict
/// improvement.
std::size_t hidden_phase(SelectionContext& ctx, const std::vector<std::size_t>& inputs, std::size_t q_max);

/// Backward elimination at fixed q, starting from `start`.
std::vector<std::size_t> input_phase(SelectionContext& ctx, const Architecture& start);

/// Alternating single-step hidden-count and input moves until a full
/// hidden-then-input round accepts nothing.
Architecture fine_tune(SelectionContext& ctx, const Architecture& start, std::size_t q_max, std::size_t p_max);

// Stand-alone forms. For OOS, `data` is split into training and validation
// rows exactly as select() does.
std::size_t hidden_phase(const Dataset& data, const std::vector<std::size_t>& inputs, std::size_t q_max,
                         Objective objective, const FitConfig& fit_config, double validation_fraction = 0.2);
std::vector<std::size_t> input_phase(const Dataset& data, const std::vector<std::size_t>& inputs, std::size_t q,
                                     Objective objective, const FitConfig& fit_config,
                                     double validation_fraction = 0.2);
Architecture fine_tune(const Dataset& data, const Architecture& current, std::size_t q_max, std::size_t p_max,
                       Objective objective, const FitConfig& fit_config, double validation_fraction = 0.2);

struct SelectionResult {
    FittedModel model;  // fitted on the training rows
    double objective = 0.0;
    SelectionTrace trace;
    std::size_t train_rows = 0;
    std::size_t validation_rows = 0;
    std::size_t fits = 0;  // distinct architectures fitted
};

/// Training/validation partition used by the OOS objective: the validation
/// part holds round(f n / (1 + f)) rows, i.e. f times the training size.
std::pair<Dataset, Dataset> validation_split(const Dataset& data, double validation_fraction, std::uint64_t seed);

/// Runs the configured strategy on all covariates of `data`.
SelectionResult select(const Dataset& data, const SelectionConfig& config);

}  // namespace fnnsel
