#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fnnsel/commands.hpp"
#include "fnnsel/errors.hpp"

namespace {

struct CommonFlags {
    std::size_t q_max = 10;
    std::size_t n_init = 10;
    std::string objective = "bic";
    std::string strategy = "hif";
    std::uint64_t seed = 1;
    double val_fraction = 0.2;
    double init_range = 0.7;
    std::size_t max_iter = 500;
    double grad_tol = 1e-6;
    std::size_t threads = 1;
    std::string out;
};

void add_fit_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--n-init", f.n_init, "random starts per fit")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_option("--init-range", f.init_range, "starts are uniform on [-r, r]")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", f.max_iter, "BFGS iterations per start")->check(CLI::PositiveNumber);
    cmd->add_option("--grad-tol", f.grad_tol, "sup-norm gradient tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "write the report here instead of stdout");
}

void add_selection_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--q-max", f.q_max, "largest hidden layer considered")->check(CLI::PositiveNumber);
    cmd->add_option("--objective", f.objective, "bic, aic or oos")
        ->check(CLI::IsMember({"bic", "aic", "oos"}));
    cmd->add_option("--strategy", f.strategy, "hif, ihf, hi, ih or f")
        ->check(CLI::IsMember({"hif", "ihf", "hi", "ih", "f"}));
    cmd->add_option("--val-fraction", f.val_fraction, "validation size relative to training size (oos only)");
    cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

fnnsel::FitConfig fit_config(const CommonFlags& f) {
    fnnsel::FitConfig c;
    c.n_init = f.n_init;
    c.max_iterations = f.max_iter;
    c.gradient_tolerance = f.grad_tol;
    c.init_range = f.init_range;
    c.seed = f.seed;
    return c;
}

fnnsel::SelectionConfig selection_config(const CommonFlags& f) {
    fnnsel::SelectionConfig c;
    c.q_max = f.q_max;
    c.objective = fnnsel::parse_objective(f.objective);
    c.strategy = fnnsel::parse_strategy(f.strategy);
    c.fit = fit_config(f);
    c.validation_fraction = f.val_fraction;
    c.threads = f.threads;
    return c;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw fnnsel::InvalidArgument("cannot open " + path + " for writing");
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Architecture selection for single-hidden-layer neural networks"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string data, response, trace_csv, law = "structured";
    double test_fraction = 0.1;
    std::vector<std::string> inputs;
    std::size_t q = 1;
    std::size_t n = 1000, replicates = 100;
    double noise_sd = -1.0;

    auto* fit_cmd = app.add_subcommand("fit", "fit one architecture");
    fit_cmd->add_option("--data", data, "CSV file with a header row")->required();
    fit_cmd->add_option("--response", response, "response column")->required();
    fit_cmd->add_option("--inputs", inputs, "covariate names")->required()->delimiter(',');
    fit_cmd->add_option("--q", q, "hidden nodes")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--test-fraction", test_fraction, "held-out share of rows, 0 for none");
    add_fit_flags(fit_cmd, flags);

    auto* select_cmd = app.add_subcommand("select", "select an architecture on a CSV dataset");
    select_cmd->add_option("--data", data, "CSV file with a header row")->required();
    select_cmd->add_option("--response", response, "response column")->required();
    select_cmd->add_option("--test-fraction", test_fraction, "held-out share of rows");
    select_cmd->add_option("--trace-csv", trace_csv, "also write the selection trace as CSV");
    add_fit_flags(select_cmd, flags);
    add_selection_flags(select_cmd, flags);

    auto* sim_cmd = app.add_subcommand("simulate", "replicate selection on data from a known network");
    sim_cmd->add_option("--n", n, "rows per simulated dataset")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--replicates", replicates, "number of replicates")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--law", law, "true-weight law: structured or uniform")
        ->check(CLI::IsMember({"structured", "uniform"}));
    sim_cmd->add_option("--noise-sd", noise_sd, "error standard deviation (default depends on --law)");
    add_fit_flags(sim_cmd, flags);
    add_selection_flags(sim_cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit_cmd) {
            fnnsel::FitCommand cmd;
            cmd.data = data;
            cmd.response = response;
            cmd.inputs = inputs;
            cmd.q = q;
            cmd.fit = fit_config(flags);
            cmd.test_fraction = test_fraction;
            emit(fnnsel::run_fit(cmd).report, flags.out);
        } else if (*select_cmd) {
            fnnsel::SelectCommand cmd;
            cmd.data = data;
            cmd.response = response;
            cmd.selection = selection_config(flags);
            cmd.test_fraction = test_fraction;
            const auto outcome = fnnsel::run_select(cmd);
            emit(outcome.report, flags.out);
            if (!trace_csv.empty()) emit(outcome.trace_csv, trace_csv);
        } else if (*sim_cmd) {
            fnnsel::SimulationPlan plan;
            plan.generator = law == "uniform" ? fnnsel::GeneratorConfig::uniform_law() : fnnsel::GeneratorConfig{};
            if (noise_sd >= 0.0) plan.generator.noise_sd = noise_sd;
            plan.n = n;
            plan.replicates = replicates;
            plan.seed = flags.seed;
            plan.selection = selection_config(flags);
            plan.selection.threads = 1;
            plan.threads = flags.threads;
            emit(fnnsel::run_simulate(plan).report, flags.out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fnnsel: %s\n", e.what());
        return 1;
    }
    return 0;
}
