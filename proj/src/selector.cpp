#include "fnnsel/selector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "fnnsel/errors.hpp"

namespace fnnsel {

std::string_view to_string(Objective objective) noexcept {
    switch (objective) {
        case Objective::bic: return "bic";
        case Objective::aic: return "aic";
        case Objective::oos: return "oos";
    }
    return "?";
}

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::hif: return "hif";
        case Strategy::ihf: return "ihf";
        case Strategy::hi: return "hi";
        case Strategy::ih: return "ih";
        case Strategy::f: return "f";
    }
    return "?";
}

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::hidden: return "hidden";
        case Phase::input: return "input";
        case Phase::fine_hidden: return "fine_hidden";
        case Phase::fine_input: return "fine_input";
    }
    return "?";
}

std::string_view to_string(Decision decision) noexcept {
    switch (decision) {
        case Decision::evaluated: return "evaluated";
        case Decision::accepted: return "accepted";
        case Decision::failed: return "failed";
    }
    return "?";
}

Objective parse_objective(std::string_view text) {
    for (auto o : {Objective::bic, Objective::aic, Objective::oos})
        if (to_string(o) == text) return o;
    throw InvalidArgument("unknown objective '" + std::string(text) + "'");
}

Strategy parse_strategy(std::string_view text) {
    for (auto s : {Strategy::hif, Strategy::ihf, Strategy::hi, Strategy::ih, Strategy::f})
        if (to_string(s) == text) return s;
    throw InvalidArgument("unknown strategy '" + std::string(text) + "'");
}

void SelectionConfig::validate() const {
    if (q_max == 0) throw InvalidArgument("q_max must be at least 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw InvalidArgument("validation fraction must lie in (0, 1)");
    if (threads == 0) throw InvalidArgument("thread count must be at least 1");
    fit.validate();
}

std::vector<const TraceStep*> SelectionTrace::accepted() const {
    std::vector<const TraceStep*> out;
    for (const auto& s : steps)
        if (s.decision == Decision::accepted) out.push_back(&s);
    return out;
}

std::uint64_t candidate_seed(std::uint64_t base, const Architecture& arch) noexcept {
    std::uint64_t h = derive_seed(base, {0x43414e44ULL, arch.q(), arch.p()});
    for (auto c : arch.inputs()) h = mix64(h ^ mix64(c + 1));
    return h;
}

// ---------------------------------------------------------------------------

CandidateEvaluator::CandidateEvaluator(const Dataset& train, const Dataset* validation, Objective objective,
                                       FitConfig fit, std::size_t threads)
    : train_(train), validation_(validation), objective_(objective), fit_(fit), threads_(std::max<std::size_t>(1, threads)) {
    fit_.validate();
    if (objective_ == Objective::oos && (validation_ == nullptr || validation_->rows() == 0))
        throw InvalidArgument("the OOS objective needs a nonempty validation set");
}

CandidateEvaluator::Evaluation CandidateEvaluator::compute(const Architecture& arch) const {
    Evaluation e;
    e.arch = arch;
    try {
        if (arch.p() == 0) throw InvalidArgument("empty input set");
        FitConfig cfg = fit_;
        cfg.seed = candidate_seed(fit_.seed, arch);
        auto model = std::make_shared<FittedModel>(fit(arch, train_, cfg));
        switch (objective_) {
            case Objective::bic: e.objective = model->summary.bic; break;
            case Objective::aic: e.objective = model->summary.aic; break;
            case Objective::oos: e.objective = oos_mse(*model, *validation_); break;
        }
        if (!std::isfinite(e.objective)) throw FitFailure("non-finite objective value");
        e.model = std::move(model);
    } catch (const Error& err) {
        e.model.reset();
        e.objective = std::numeric_limits<double>::infinity();
        e.error = err.what();
    }
    return e;
}

std::vector<CandidateEvaluator::Evaluation> CandidateEvaluator::evaluate(std::span<const Architecture> candidates) {
    std::vector<Architecture> pending;
    for (const auto& a : candidates)
        if (!cache_.contains(a) && std::find(pending.begin(), pending.end(), a) == pending.end()) pending.push_back(a);

    std::vector<Evaluation> fresh(pending.size());
    const std::size_t workers = std::min(threads_, pending.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < pending.size(); ++i) fresh[i] = compute(pending[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < pending.size(); i = next++) {
                        try {
                            fresh[i] = compute(pending[i]);
                        } catch (...) {
                            if (!failed.exchange(true)) failure = std::current_exception();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    for (std::size_t i = 0; i < pending.size(); ++i) cache_.emplace(pending[i], std::move(fresh[i]));

    std::vector<Evaluation> out;
    out.reserve(candidates.size());
    for (const auto& a : candidates) out.push_back(cache_.at(a));
    return out;
}

CandidateEvaluator::Evaluation CandidateEvaluator::evaluate(const Architecture& candidate) {
    return evaluate(std::span<const Architecture>(&candidate, 1)).front();
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> SelectionContext::record(Phase phase, std::span<const Architecture> candidates) {
    const auto evaluations = evaluator_.evaluate(candidates);
    std::vector<std::size_t> indices;
    indices.reserve(evaluations.size());
    for (const auto& e : evaluations) {
        TraceStep step;
        step.phase = phase;
        step.round = round_;
        step.arch = e.arch;
        if (e.ok()) {
            step.objective = e.objective;
            step.rss = e.model->summary.rss;
            step.starts_converged = e.model->starts_converged;
            step.best_start = e.model->best_start_index;
            step.iterations = e.model->diagnostics.iterations;
            step.status = e.model->diagnostics.status;
        } else {
            step.decision = Decision::failed;
            step.error = e.error;
        }
        indices.push_back(trace_.steps.size());
        trace_.steps.push_back(std::move(step));
    }
    ++round_;
    return indices;
}

void SelectionContext::accept(std::size_t step) {
    auto& s = trace_.steps.at(step);
    s.decision = Decision::accepted;
    incumbent_ = s.arch;
    incumbent_objective_ = s.objective;
}

void SelectionContext::start_from(Phase phase, const Architecture& arch) {
    if (incumbent_ && *incumbent_ == arch) return;
    const auto idx = record(phase, std::span<const Architecture>(&arch, 1)).front();
    if (trace_.steps[idx].decision == Decision::failed)
        throw SelectionFailure("starting model " + arch.key() + " could not be fitted: " + trace_.steps[idx].error);
    accept(idx);
}

namespace {

// Index (into `steps`) of the lowest finite objective; earlier entries win ties.
std::optional<std::size_t> best_of(const SelectionTrace& trace, const std::vector<std::size_t>& steps) {
    std::optional<std::size_t> best;
    for (auto i : steps) {
        const auto& s = trace.steps[i];
        if (s.decision == Decision::failed) continue;
        if (!best || s.objective < trace.steps[*best].objective) best = i;
    }
    return best;
}

std::vector<std::size_t> all_inputs(std::size_t p_max) {
    std::vector<std::size_t> v(p_max);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

std::size_t hidden_phase(SelectionContext& ctx, const std::vector<std::size_t>& inputs, std::size_t q_max) {
    if (inputs.empty()) throw InvalidArgument("hidden-node phase needs at least one input");
    if (q_max == 0) throw InvalidArgument("q_max must be at least 1");

    std::vector<Architecture> candidates;
    for (std::size_t q = 1; q <= q_max; ++q) candidates.emplace_back(inputs, q);
    const auto steps = ctx.record(Phase::hidden, candidates);
    const auto best = best_of(ctx.trace(), steps);
    if (!best) throw SelectionFailure("every hidden-node candidate failed to fit");

    const auto& winner = ctx.trace().steps[*best];
    const auto& inc = ctx.incumbent();
    if (inc && inc->inputs() == winner.arch.inputs()) {
        if (winner.arch == *inc || !(winner.objective < ctx.incumbent_objective())) return inc->q();
    }
    ctx.accept(*best);
    return winner.arch.q();
}

std::vector<std::size_t> input_phase(SelectionContext& ctx, const Architecture& start) {
    if (start.p() == 0) throw InvalidArgument("input-node phase needs at least one input");
    ctx.start_from(Phase::input, start);

    Architecture current = start;
    while (current.p() > 1) {
        std::vector<Architecture> candidates;
        for (auto c : current.inputs()) candidates.push_back(current.without_input(c));
        const auto steps = ctx.record(Phase::input, candidates);
        const auto best = best_of(ctx.trace(), steps);
        if (!best) throw SelectionFailure("every input-removal candidate failed to fit");
        if (!(ctx.trace().steps[*best].objective < ctx.incumbent_objective())) break;
        ctx.accept(*best);
        current = ctx.trace().steps[*best].arch;
    }
    return current.inputs();
}

Architecture fine_tune(SelectionContext& ctx, const Architecture& start, std::size_t q_max, std::size_t p_max) {
    if (start.p() == 0) throw InvalidArgument("fine-tuning needs at least one input");
    if (start.q() > q_max) throw InvalidArgument("starting hidden count exceeds q_max");
    ctx.start_from(Phase::fine_hidden, start);

    Architecture current = start;
    while (true) {
        bool moved = false;

        std::vector<Architecture> h_moves;
        if (current.q() > 1) h_moves.push_back(current.with_hidden(current.q() - 1));
        if (current.q() < q_max) h_moves.push_back(current.with_hidden(current.q() + 1));
        if (!h_moves.empty()) {
            const auto steps = ctx.record(Phase::fine_hidden, h_moves);
            const auto best = best_of(ctx.trace(), steps);
            if (best && ctx.trace().steps[*best].objective < ctx.incumbent_objective()) {
                ctx.accept(*best);
                current = ctx.trace().steps[*best].arch;
                moved = true;
            }
        }

        std::vector<Architecture> i_moves;
        if (current.p() > 1)
            for (auto c : current.inputs()) i_moves.push_back(current.without_input(c));
        for (std::size_t c = 0; c < p_max; ++c)
            if (!current.has_input(c)) i_moves.push_back(current.with_input(c));
        if (!i_moves.empty()) {
            const auto steps = ctx.record(Phase::fine_input, i_moves);
            const auto best = best_of(ctx.trace(), steps);
            if (best && ctx.trace().steps[*best].objective < ctx.incumbent_objective()) {
                ctx.accept(*best);
                current = ctx.trace().steps[*best].arch;
                moved = true;
            }
        }

        if (!moved) break;
    }
    return current;
}

// ---------------------------------------------------------------------------

std::pair<Dataset, Dataset> validation_split(const Dataset& data, double validation_fraction, std::uint64_t seed) {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw InvalidArgument("validation fraction must lie in (0, 1)");
    const double n = static_cast<double>(data.rows());
    const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * n / (1.0 + validation_fraction) + 0.5));
    return split_count(data, n_val, derive_seed(seed, {0x56414cULL}));
}

namespace {

// Training/validation pair for a stand-alone phase call.
struct PhaseData {
    Dataset train;
    Dataset validation;
    bool has_validation = false;

    PhaseData(const Dataset& data, Objective objective, const FitConfig& fit, double validation_fraction) {
        if (objective == Objective::oos) {
            auto parts = validation_split(data, validation_fraction, fit.seed);
            train = std::move(parts.first);
            validation = std::move(parts.second);
            has_validation = true;
        } else {
            train = data;
        }
    }

    CandidateEvaluator evaluator(Objective objective, const FitConfig& fit) const {
        return CandidateEvaluator(train, has_validation ? &validation : nullptr, objective, fit);
    }
};

}  // namespace

std::size_t hidden_phase(const Dataset& data, const std::vector<std::size_t>& inputs, std::size_t q_max,
                         Objective objective, const FitConfig& fit_config, double validation_fraction) {
    PhaseData pd(data, objective, fit_config, validation_fraction);
    auto evaluator = pd.evaluator(objective, fit_config);
    SelectionContext ctx(evaluator);
    return hidden_phase(ctx, inputs, q_max);
}

std::vector<std::size_t> input_phase(const Dataset& data, const std::vector<std::size_t>& inputs, std::size_t q,
                                     Objective objective, const FitConfig& fit_config, double validation_fraction) {
    PhaseData pd(data, objective, fit_config, validation_fraction);
    auto evaluator = pd.evaluator(objective, fit_config);
    SelectionContext ctx(evaluator);
    return input_phase(ctx, Architecture(inputs, q));
}

Architecture fine_tune(const Dataset& data, const Architecture& current, std::size_t q_max, std::size_t p_max,
                       Objective objective, const FitConfig& fit_config, double validation_fraction) {
    PhaseData pd(data, objective, fit_config, validation_fraction);
    auto evaluator = pd.evaluator(objective, fit_config);
    SelectionContext ctx(evaluator);
    return fine_tune(ctx, current, q_max, p_max);
}

SelectionResult select(const Dataset& data, const SelectionConfig& config) {
    config.validate();
    const std::size_t p_max = data.covariates();
    if (p_max == 0) throw InvalidArgument("selection needs at least one covariate");

    Dataset train;
    Dataset validation;
    const Dataset* validation_ptr = nullptr;
    if (config.objective == Objective::oos) {
        auto parts = validation_split(data, config.validation_fraction, config.fit.seed);
        train = std::move(parts.first);
        validation = std::move(parts.second);
        validation_ptr = &validation;
    } else {
        train = data;
    }

    CandidateEvaluator evaluator(train, validation_ptr, config.objective, config.fit, config.threads);
    SelectionContext ctx(evaluator);
    const auto inputs = all_inputs(p_max);

    Architecture final_arch;
    switch (config.strategy) {
        case Strategy::hif:
        case Strategy::hi: {
            const auto q = hidden_phase(ctx, inputs, config.q_max);
            const auto kept = input_phase(ctx, Architecture(inputs, q));
            final_arch = Architecture(kept, q);
            if (config.strategy == Strategy::hif) final_arch = fine_tune(ctx, final_arch, config.q_max, p_max);
            break;
        }
        case Strategy::ihf:
        case Strategy::ih: {
            const auto kept = input_phase(ctx, Architecture(inputs, config.q_max));
            const auto q = hidden_phase(ctx, kept, config.q_max);
            final_arch = Architecture(kept, q);
            if (config.strategy == Strategy::ihf) final_arch = fine_tune(ctx, final_arch, config.q_max, p_max);
            break;
        }
        case Strategy::f:
            final_arch = fine_tune(ctx, Architecture(inputs, config.q_max), config.q_max, p_max);
            break;
    }

    const auto final_eval = evaluator.evaluate(final_arch);
    if (!final_eval.ok()) throw SelectionFailure("selected model " + final_arch.key() + " failed: " + final_eval.error);

    SelectionResult result;
    result.model = *final_eval.model;
    result.objective = final_eval.objective;
    result.trace = std::move(ctx.trace());
    result.train_rows = train.rows();
    result.validation_rows = validation_ptr ? validation.rows() : 0;
    result.fits = evaluator.fits_performed();
    return result;
}

}  // namespace fnnsel
