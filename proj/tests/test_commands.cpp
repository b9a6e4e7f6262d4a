#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fnnsel/commands.hpp"
#include "fnnsel/criteria.hpp"
#include "fnnsel/errors.hpp"
#include "fnnsel/report.hpp"
#include "test_support.hpp"

using namespace fnnsel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fnnsel_cmd_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

// 90-row CSV: y depends on a and b, c is noise.
fs::path tiny_csv() {
    static const fs::path path = [] {
        Architecture arch({0, 1}, 1);
        ParamVector t(2, 1);
        t.hidden_bias(0) = -2.0;
        t.input_weight(0, 0) = 3.0;
        t.input_weight(1, 0) = 1.5;
        t.output_bias() = 1.0;
        t.output_weight(0) = 4.0;
        const auto d = test_support::network_dataset(arch, t, 90, 3, 0.2, 4242);
        const auto p = scratch("tiny.csv");
        std::ofstream os(p);
        os << "a,b,c,y\n";
        for (Eigen::Index i = 0; i < d.x().rows(); ++i)
            os << format_number(d.x()(i, 0)) << ',' << format_number(d.x()(i, 1)) << ','
               << format_number(d.x()(i, 2)) << ',' << format_number(d.y()(i)) << '\n';
        return p;
    }();
    return path;
}

// key = value pairs of one [section].
std::map<std::string, std::string> section(const std::string& report, const std::string& name) {
    std::map<std::string, std::string> out;
    std::istringstream in(report);
    std::string line;
    bool inside = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '[') {
            inside = line == "[" + name + "]";
            continue;
        }
        const auto eq = line.find(" = ");
        if (inside && eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

double num(const std::map<std::string, std::string>& s, const std::string& key) { return std::stod(s.at(key)); }

struct Run {
    int status;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(FNNSEL_CLI) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = ::pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("format_number round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("csv_cell quoting") {
    CHECK(csv_cell("plain") == "plain");
    CHECK(csv_cell("a,b") == "\"a,b\"");
    CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("report layout keeps timing last") {
    Report r;
    r.section("config");
    r.field("seed", std::size_t{7});
    r.timing("wall_time", 1.5);
    r.section("result");
    r.field("ok", true);
    r.table({"x", "y"}, {{"1", "a,b"}});
    const auto text = r.str();
    CHECK(text == "[config]\nseed = 7\n\n[result]\nok = true\nx,y\n1,\"a,b\"\n\n[timing]\nwall_time = 1.5\n");
    CHECK(deterministic_part(text) == "[config]\nseed = 7\n\n[result]\nok = true\nx,y\n1,\"a,b\"\n\n");
    CHECK(deterministic_part("[a]\nk = v\n") == "[a]\nk = v\n");
}

TEST_CASE("fit report is internally consistent") {
    FitCommand cmd;
    cmd.data = tiny_csv();
    cmd.response = "y";
    cmd.inputs = {"a"};
    cmd.q = 1;
    cmd.fit.n_init = 3;
    const auto out = run_fit(cmd);
    const auto m = section(out.report, "model");
    const double n = num(m, "n"), k = num(m, "k"), ll = num(m, "log_lik");
    CHECK(k == 4.0);  // (1 + 2) * 1 + 1
    CHECK(n == 81.0);
    CHECK(num(m, "bic") == -2.0 * ll + std::log(n) * (k + 1.0));
    CHECK(num(m, "aic") == -2.0 * ll + 2.0 * (k + 1.0));
    CHECK(num(m, "sigma2_hat") == num(m, "rss") / n);
    CHECK(section(out.report, "data").at("test_rows") == "9");
}

TEST_CASE("fit on a seeded split matches the manual two-step pipeline") {
    FitCommand cmd;
    cmd.data = tiny_csv();
    cmd.response = "y";
    cmd.inputs = {"a", "b"};
    cmd.q = 2;
    cmd.fit.n_init = 2;
    cmd.fit.seed = 19;
    const auto out = run_fit(cmd);

    // manual: load, split, scale on the training rows, fit, score
    const auto loaded = load_csv(tiny_csv(), "y");
    auto [train, test] = split(loaded.data, 0.1, split_seed(19));
    const auto scaler = fit_scaler(train);
    const auto strain = apply_scaler(scaler, train), stest = apply_scaler(scaler, test);
    const auto model = fit(Architecture({0, 1}, 2), strain, cmd.fit);
    CHECK(out.model.model.summary.rss == model.summary.rss);
    REQUIRE(out.model.test_oos.has_value());
    CHECK(*out.model.test_oos == oos_mse(model, stest));
    CHECK(section(out.report, "model").at("test_oos") == format_number(oos_mse(model, stest)));
}

TEST_CASE("fit with no test rows and unknown inputs") {
    FitCommand cmd;
    cmd.data = tiny_csv();
    cmd.response = "y";
    cmd.inputs = {"c"};
    cmd.fit.n_init = 1;
    cmd.test_fraction = 0.0;
    const auto out = run_fit(cmd);
    CHECK_FALSE(out.model.test_oos.has_value());
    CHECK(section(out.report, "model").at("test_oos") == "na");
    cmd.inputs = {"zzz"};
    CHECK_THROWS_AS(run_fit(cmd), DataError);
}

TEST_CASE("select compares the selected and full models") {
    SelectCommand cmd;
    cmd.data = tiny_csv();
    cmd.response = "y";
    cmd.selection.q_max = 3;
    cmd.selection.fit.n_init = 2;
    const auto out = run_select(cmd);
    CHECK(out.full.model.arch == Architecture({0, 1, 2}, 3));
    CHECK(out.full.model.arch.param_count() == 16);
    const auto sel = section(out.report, "selected");
    const auto full = section(out.report, "full");
    CHECK(num(full, "k") == 16.0);
    CHECK(sel.at("inputs") == "a,b");
    CHECK(num(sel, "bic") < num(full, "bic"));
    CHECK(section(out.report, "comparison").at("selected_bic_below_full") == "true");
    CHECK(out.trace_csv.starts_with("phase,round,inputs,q,k,objective"));
    CHECK(out.report.find("[trace]\nphase,round,") != std::string::npos);
}

TEST_CASE("bundled application data has the expected full models") {
    const auto boston = prepare_data(fs::path(FNNSEL_DATA_DIR) / "boston.csv", "medv", 0.1, 1);
    CHECK(boston.train.rows() == 455);
    CHECK(boston.test.rows() == 51);
    CHECK(param_count(boston.train.covariates(), 10) == 141);
    const auto red = prepare_data(fs::path(FNNSEL_DATA_DIR) / "red_wine.csv", "quality", 0.1, 1);
    CHECK(param_count(red.train.covariates(), 10) == 131);
}

TEST_CASE("cli: select reports are reproducible across runs and thread counts") {
    const std::string base = "select --data " + tiny_csv().string() + " --response y --q-max 3 --n-init 2 --seed 5";
    const auto a = run_cli(base);
    const auto b = run_cli(base);
    const auto c = run_cli(base + " --threads 2");
    REQUIRE(a.status == 0);
    CHECK(b.status == 0);
    CHECK(c.status == 0);
    CHECK(deterministic_part(a.out) == deterministic_part(b.out));
    CHECK(deterministic_part(a.out) == deterministic_part(c.out));
    CHECK(a.out.find("[timing]") != std::string::npos);
}

TEST_CASE("cli: hi trace equals hif trace without fine-tuning") {
    const std::string base = "select --data " + tiny_csv().string() + " --response y --q-max 3 --n-init 2";
    const auto hi = run_cli(base + " --strategy hi");
    const auto hif = run_cli(base + " --strategy hif");
    REQUIRE(hi.status == 0);
    REQUIRE(hif.status == 0);
    auto trace_lines = [](const std::string& report, bool drop_fine) {
        std::vector<std::string> lines;
        std::istringstream in(report.substr(report.find("[trace]\n") + 8));
        std::string line;
        while (std::getline(in, line) && !line.empty())
            if (!drop_fine || !line.starts_with("fine_")) lines.push_back(line);
        return lines;
    };
    const auto hi_lines = trace_lines(hi.out, false);
    CHECK(trace_lines(hif.out, true) == hi_lines);
    for (const auto& l : hi_lines) CHECK_FALSE(l.starts_with("fine_"));
    bool hif_has_fine = false;
    for (const auto& l : trace_lines(hif.out, false)) hif_has_fine = hif_has_fine || l.starts_with("fine_");
    CHECK(hif_has_fine);
}

TEST_CASE("cli: simulate is reproducible") {
    const std::string args = "simulate --replicates 1 --seed 7 --n 150 --q-max 2 --n-init 1";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.status == 0);
    CHECK(deterministic_part(a.out) == deterministic_part(b.out));
    const auto agg = section(a.out, "aggregate");
    CHECK(agg.at("completed") == "1");
    CHECK(agg.count("pt") == 1);
    CHECK(agg.count("c_mean") == 1);

    const auto two = run_cli("simulate --replicates 2 --seed 7 --n 150 --q-max 2 --n-init 1 --threads 2");
    const auto one = run_cli("simulate --replicates 2 --seed 7 --n 150 --q-max 2 --n-init 1 --threads 1");
    CHECK(deterministic_part(two.out) == deterministic_part(one.out));
}

TEST_CASE("cli: --out and --trace-csv write files") {
    const auto report = scratch("report.txt"), trace = scratch("trace.csv");
    const auto r = run_cli("select --data " + tiny_csv().string() + " --response y --q-max 2 --n-init 1 --out " +
                           report.string() + " --trace-csv " + trace.string());
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    std::ifstream rep(report), tr(trace);
    std::string first;
    std::getline(rep, first);
    CHECK(first == "[config]");
    std::getline(tr, first);
    CHECK(first.starts_with("phase,round,inputs"));
}

TEST_CASE("cli: failures exit nonzero") {
    CHECK(run_cli("select --data /nonexistent.csv --response y").status != 0);
    CHECK(run_cli("select --data " + tiny_csv().string() + " --response nope").status != 0);
    CHECK(run_cli("select --data " + tiny_csv().string() + " --response y --objective mdl").status != 0);
    CHECK(run_cli("fit --data " + tiny_csv().string() + " --response y --inputs a --q 40").status != 0);
    CHECK(run_cli("").status != 0);
}
