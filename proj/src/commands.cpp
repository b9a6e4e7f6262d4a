#include "fnnsel/commands.hpp"

#include <chrono>
#include <cmath>
#include <tuple>

#include "fnnsel/criteria.hpp"
#include "fnnsel/errors.hpp"
#include "fnnsel/random.hpp"
#include "fnnsel/report.hpp"

namespace fnnsel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::vector<std::string>& parts, char sep = ',') {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

std::vector<std::string> names_of(const Architecture& arch, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (auto c : arch.inputs()) out.push_back(names[c]);
    return out;
}

void echo_fit_config(Report& r, const FitConfig& fit) {
    r.field("n_init", fit.n_init);
    r.field("max_iterations", fit.max_iterations);
    r.field("gradient_tolerance", fit.gradient_tolerance);
    r.field("init_range", fit.init_range);
    r.field("seed", static_cast<std::size_t>(fit.seed));
}

void echo_data(Report& r, const PreparedData& d) {
    r.section("data");
    r.field("rows_read", d.rows_read);
    r.field("rows_rejected", d.rows_rejected);
    r.field("train_rows", d.train.rows());
    r.field("test_rows", d.test.rows());
    r.field("covariates", d.train.covariates());
}

void model_section(Report& r, std::string_view name, const ModelReport& m) {
    const auto& s = m.model.summary;
    r.section(name);
    r.field("inputs", join(m.input_names));
    r.field("p", m.model.arch.p());
    r.field("q", m.model.arch.q());
    r.field("k", m.model.arch.param_count());
    r.field("n", s.n);
    r.field("rss", s.rss);
    r.field("sigma2_hat", s.sigma2_hat);
    r.field("log_lik", s.log_lik);
    r.field("bic", s.bic);
    r.field("aic", s.aic);
    r.field("test_oos", m.test_oos ? format_number(*m.test_oos) : std::string("na"));
    r.field("starts_converged", m.model.starts_converged);
    r.field("best_start", m.model.best_start_index);
    r.field("iterations", m.model.diagnostics.iterations);
    r.field("gradient_norm", m.model.diagnostics.gradient_norm);
    r.field("status", to_string(m.model.diagnostics.status));
}

ModelReport describe(FittedModel model, const PreparedData& data) {
    ModelReport m;
    m.input_names = names_of(model.arch, data.train.covariate_names());
    if (data.test.rows() > 0) m.test_oos = oos_mse(model, data.test);
    m.model = std::move(model);
    return m;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t seed) noexcept { return derive_seed(seed, {0x54455354ULL}); }

PreparedData prepare_data(const std::filesystem::path& path, const std::string& response, double test_fraction,
                          std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw InvalidArgument("test fraction must lie in [0, 1)");
    auto loaded = load_csv(path, response);
    PreparedData out;
    out.rows_read = loaded.rows_read;
    out.rows_rejected = loaded.rows_rejected;
    Dataset train, test;
    if (test_fraction > 0.0) {
        std::tie(train, test) = split(loaded.data, test_fraction, split_seed(seed));
    } else {
        train = std::move(loaded.data);
    }
    const Scaler scaler = fit_scaler(train);
    out.train = apply_scaler(scaler, train);
    if (test.rows() > 0) out.test = apply_scaler(scaler, test);
    return out;
}

std::vector<std::string> trace_header() {
    return {"phase", "round", "inputs", "q", "k", "objective", "rss", "starts_converged", "best_start",
            "iterations", "status", "decision", "error"};
}

std::vector<std::vector<std::string>> trace_rows(const SelectionTrace& trace, const std::vector<std::string>& names) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : trace.steps) {
        rows.push_back({std::string(to_string(s.phase)), std::to_string(s.round), join(names_of(s.arch, names), ';'),
                        std::to_string(s.arch.q()), std::to_string(s.arch.param_count()), format_number(s.objective),
                        format_number(s.rss), std::to_string(s.starts_converged), std::to_string(s.best_start),
                        std::to_string(s.iterations), to_string(s.status), std::string(to_string(s.decision)),
                        s.error});
    }
    return rows;
}

SelectOutcome run_select(const SelectCommand& command) {
    command.selection.validate();
    const auto t0 = Clock::now();
    const auto& cfg = command.selection;
    SelectOutcome out;
    out.data = prepare_data(command.data, command.response, command.test_fraction, cfg.fit.seed);
    const auto& names = out.data.train.covariate_names();

    out.result = select(out.data.train, cfg);

    // The full model is fitted on the rows the selection fitted on.
    Dataset fit_rows = out.data.train;
    if (cfg.objective == Objective::oos)
        fit_rows = validation_split(out.data.train, cfg.validation_fraction, cfg.fit.seed).first;
    std::vector<std::size_t> all(names.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    const Architecture full_arch(all, cfg.q_max);
    FitConfig full_cfg = cfg.fit;
    full_cfg.seed = candidate_seed(cfg.fit.seed, full_arch);

    out.selected = describe(out.result.model, out.data);
    out.full = describe(fit(full_arch, fit_rows, full_cfg), out.data);
    out.wall_time = seconds_since(t0);

    Report r;
    r.section("config");
    r.field("command", "select");
    r.field("data", command.data.string());
    r.field("response", command.response);
    r.field("test_fraction", command.test_fraction);
    r.field("split_seed", static_cast<std::size_t>(split_seed(cfg.fit.seed)));
    r.field("q_max", cfg.q_max);
    r.field("objective", std::string(to_string(cfg.objective)));
    r.field("strategy", std::string(to_string(cfg.strategy)));
    r.field("validation_fraction", cfg.validation_fraction);
    echo_fit_config(r, cfg.fit);
    echo_data(r, out.data);
    r.field("selection_rows", out.result.train_rows);
    r.field("validation_rows", out.result.validation_rows);
    r.field("fits", out.result.fits);
    model_section(r, "selected", out.selected);
    r.field("objective_value", out.result.objective);
    model_section(r, "full", out.full);
    r.section("comparison");
    r.field("delta_bic", out.full.model.summary.bic - out.selected.model.summary.bic);
    r.field("selected_bic_below_full", out.selected.model.summary.bic < out.full.model.summary.bic);
    r.field("selected_k_below_full", out.selected.model.arch.param_count() < out.full.model.arch.param_count());
    r.section("trace");
    const auto rows = trace_rows(out.result.trace, names);
    r.table(trace_header(), rows);
    r.timing("wall_time", out.wall_time);
    out.report = r.str();

    Report t;
    t.table(trace_header(), rows);
    out.trace_csv = t.str();
    return out;
}

FitOutcome run_fit(const FitCommand& command) {
    command.fit.validate();
    if (command.inputs.empty()) throw InvalidArgument("at least one input is required");
    const auto t0 = Clock::now();
    FitOutcome out;
    out.data = prepare_data(command.data, command.response, command.test_fraction, command.fit.seed);
    std::vector<std::size_t> cols;
    for (const auto& name : command.inputs) cols.push_back(out.data.train.covariate_index(name));
    const Architecture arch(cols, command.q);
    out.model = describe(fit(arch, out.data.train, command.fit), out.data);
    out.wall_time = seconds_since(t0);

    Report r;
    r.section("config");
    r.field("command", "fit");
    r.field("data", command.data.string());
    r.field("response", command.response);
    r.field("test_fraction", command.test_fraction);
    r.field("split_seed", static_cast<std::size_t>(split_seed(command.fit.seed)));
    r.field("inputs", join(command.inputs));
    r.field("q", command.q);
    echo_fit_config(r, command.fit);
    echo_data(r, out.data);
    model_section(r, "model", out.model);
    r.timing("wall_time", out.wall_time);
    out.report = r.str();
    return out;
}

SimulateOutcome run_simulate(const SimulationPlan& plan) {
    const auto t0 = Clock::now();
    SimulateOutcome out;
    out.result = run_replicates(plan);
    out.wall_time = seconds_since(t0);

    const auto& g = plan.generator;
    const auto& cfg = plan.selection;
    const auto& a = out.result.aggregate;
    Report r;
    r.section("config");
    r.field("command", "simulate");
    r.field("n", plan.n);
    r.field("replicates", plan.replicates);
    r.field("seed", static_cast<std::size_t>(plan.seed));
    r.field("p_important", g.p_important);
    r.field("p_noise", g.p_noise);
    r.field("q_true", g.q_true);
    r.field("input_weight_min", g.input_weight_min);
    r.field("input_weight_max", g.input_weight_max);
    r.field("dominant_weight_min", g.dominant_weight_min);
    r.field("dominant_weight_max", g.dominant_weight_max);
    r.field("output_weight_min", g.output_weight_min);
    r.field("output_weight_max", g.output_weight_max);
    r.field("bias_range", g.bias_range);
    r.field("center_transitions", g.center_transitions);
    r.field("noise_sd", g.noise_sd);
    r.field("q_max", cfg.q_max);
    r.field("objective", std::string(to_string(cfg.objective)));
    r.field("strategy", std::string(to_string(cfg.strategy)));
    r.field("validation_fraction", cfg.validation_fraction);
    r.field("n_init", cfg.fit.n_init);
    r.field("max_iterations", cfg.fit.max_iterations);
    r.field("gradient_tolerance", cfg.fit.gradient_tolerance);
    r.field("init_range", cfg.fit.init_range);

    r.section("aggregate");
    r.field("completed", a.completed);
    r.field("failed", a.failed);
    r.field("c_mean", a.c_mean);
    r.field("pi", a.pi);
    r.field("ph", a.ph);
    r.field("pt", a.pt);
    r.field("median_k", a.median_k);
    r.field("median_test_mse", a.median_test_mse);

    r.section("replicates");
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : out.result.replicates) {
        rows.push_back({std::to_string(m.replicate), m.ok ? "1" : "0", std::to_string(m.c), m.pi_hit ? "1" : "0",
                        m.ph_hit ? "1" : "0", m.pt_hit ? "1" : "0", std::to_string(m.selected_p),
                        std::to_string(m.selected_q), std::to_string(m.selected_k), m.selected_inputs,
                        format_number(m.objective), format_number(m.bic), format_number(m.aic),
                        format_number(m.test_mse), std::to_string(m.fits), m.error});
    }
    r.table({"replicate", "ok", "c", "pi", "ph", "pt", "p", "q", "k", "inputs", "objective", "bic", "aic", "test_mse",
             "fits", "error"},
            rows);

    r.timing("wall_time", out.wall_time);
    r.timing("median_time", a.median_time);
    for (const auto& m : out.result.replicates) r.timing("replicate_" + std::to_string(m.replicate), m.wall_time);
    out.report = r.str();
    return out;
}

}  // namespace fnnsel
