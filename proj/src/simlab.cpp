#include "fnnsel/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "fnnsel/criteria.hpp"
#include "fnnsel/errors.hpp"
#include "fnnsel/random.hpp"

namespace fnnsel {

GeneratorConfig GeneratorConfig::uniform_law() {
    GeneratorConfig c;
    c.input_weight_min = 0.5;
    c.input_weight_max = 2.0;
    c.dominant_weight_min = 0.0;
    c.dominant_weight_max = 0.0;
    c.output_weight_min = 0.5;
    c.output_weight_max = 2.0;
    c.center_transitions = false;
    c.noise_sd = 1.0;
    return c;
}

void GeneratorConfig::validate() const {
    if (p_important == 0) throw InvalidArgument("at least one important input is required");
    if (q_true == 0) throw InvalidArgument("q_true must be at least 1");
    if (!(input_weight_min > 0.0 && input_weight_max >= input_weight_min))
        throw InvalidArgument("input weight magnitudes must satisfy 0 < min <= max");
    if (dominant_weight_max > 0.0 && !(dominant_weight_min > 0.0 && dominant_weight_max >= dominant_weight_min))
        throw InvalidArgument("dominant weight magnitudes must satisfy 0 < min <= max");
    if (!(dominant_weight_max >= 0.0)) throw InvalidArgument("dominant weight range must be nonnegative");
    if (!(output_weight_min > 0.0 && output_weight_max >= output_weight_min))
        throw InvalidArgument("output weight magnitudes must satisfy 0 < min <= max");
    if (!(bias_range >= 0.0)) throw InvalidArgument("bias range must be nonnegative");
    if (!(noise_sd >= 0.0)) throw InvalidArgument("noise sd must be nonnegative");
}

Architecture TrueModel::architecture() const {
    std::vector<std::size_t> inputs(p_important);
    std::iota(inputs.begin(), inputs.end(), std::size_t{0});
    return {std::move(inputs), q_true};
}

namespace {

double signed_magnitude(Rng& rng, double lo, double hi) {
    const double m = rng.uniform(lo, hi);
    return rng.uniform() < 0.5 ? -m : m;
}

}  // namespace

TrueModel generate_true_model(std::uint64_t seed, const GeneratorConfig& config) {
    config.validate();
    Rng rng(seed);
    TrueModel m;
    m.p_important = config.p_important;
    m.p_noise = config.p_noise;
    m.q_true = config.q_true;
    m.noise_sd = config.noise_sd;
    m.weights = ParamVector(config.p_important, config.q_true);
    for (std::size_t k = 0; k < config.q_true; ++k) {
        m.weights.hidden_bias(k) = rng.uniform(-config.bias_range, config.bias_range);
        for (std::size_t j = 0; j < config.p_important; ++j)
            m.weights.input_weight(j, k) = signed_magnitude(rng, config.input_weight_min, config.input_weight_max);
        if (config.dominant_weight_max > 0.0 && k < config.p_important)
            m.weights.input_weight(k, k) = signed_magnitude(rng, config.dominant_weight_min, config.dominant_weight_max);
        if (config.center_transitions) {
            double b = 0.0;
            for (std::size_t j = 0; j < config.p_important; ++j) b -= m.weights.input_weight(j, k) * rng.uniform(0.2, 0.8);
            m.weights.hidden_bias(k) = b;
        }
    }
    m.weights.output_bias() = rng.uniform(-config.bias_range, config.bias_range);
    for (std::size_t k = 0; k < config.q_true; ++k)
        m.weights.output_weight(k) = signed_magnitude(rng, config.output_weight_min, config.output_weight_max);
    return m;
}

Dataset simulate_dataset(const TrueModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("n must be at least 1");
    const auto p = static_cast<Eigen::Index>(model.p_total());
    Rng rng(seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.uniform();

    Eigen::VectorXd y = predict_batch(model.architecture(), model.weights, x);
    if (model.noise_sd > 0.0)
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += model.noise_sd * rng.normal();

    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    return Dataset(std::move(names), "y", std::move(x), std::move(y));
}

ReplicateMetrics score(const TrueModel& truth, const Architecture& selected) {
    ReplicateMetrics m;
    m.ok = true;
    for (std::size_t c = truth.p_important; c < truth.p_total(); ++c)
        if (!selected.has_input(c)) ++m.c;
    m.pi_hit = selected.inputs() == truth.architecture().inputs();
    m.ph_hit = selected.q() == truth.q_true;
    m.pt_hit = m.pi_hit && m.ph_hit;
    m.selected_p = selected.p();
    m.selected_q = selected.q();
    m.selected_k = selected.param_count();
    return m;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

AggregateMetrics aggregate(const std::vector<ReplicateMetrics>& replicates) {
    AggregateMetrics a;
    a.replicates = replicates.size();
    std::vector<double> times, ks, mses;
    double c_sum = 0.0;
    std::size_t pi = 0, ph = 0, pt = 0;
    for (const auto& r : replicates) {
        if (!r.ok) {
            ++a.failed;
            continue;
        }
        ++a.completed;
        c_sum += static_cast<double>(r.c);
        pi += r.pi_hit;
        ph += r.ph_hit;
        pt += r.pt_hit;
        times.push_back(r.wall_time);
        ks.push_back(static_cast<double>(r.selected_k));
        mses.push_back(r.test_mse);
    }
    if (a.completed > 0) {
        const auto n = static_cast<double>(a.completed);
        a.c_mean = c_sum / n;
        a.pi = static_cast<double>(pi) / n;
        a.ph = static_cast<double>(ph) / n;
        a.pt = static_cast<double>(pt) / n;
    }
    a.median_time = median(std::move(times));
    a.median_k = median(std::move(ks));
    a.median_test_mse = median(std::move(mses));
    return a;
}

ReplicateMetrics run_replicate(const SimulationPlan& plan, std::size_t r) {
    const auto key = static_cast<std::uint64_t>(r);
    const TrueModel truth = generate_true_model(derive_seed(plan.seed, {key, 1}), plan.generator);
    const Dataset data = simulate_dataset(truth, plan.n, derive_seed(plan.seed, {key, 2}));
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(plan.n) + 0.5)));
    const Dataset test = simulate_dataset(truth, n_test, derive_seed(plan.seed, {key, 3}));

    SelectionConfig cfg = plan.selection;
    cfg.fit.seed = derive_seed(plan.seed, {key, 4});

    const auto t0 = std::chrono::steady_clock::now();
    ReplicateMetrics m;
    try {
        const auto result = select(data, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        m = score(truth, result.model.arch);
        m.wall_time = std::chrono::duration<double>(t1 - t0).count();
        m.objective = result.objective;
        m.bic = result.model.summary.bic;
        m.aic = result.model.summary.aic;
        m.test_mse = oos_mse(result.model, test);
        m.fits = result.fits;
        for (auto c : result.model.arch.inputs()) {
            if (!m.selected_inputs.empty()) m.selected_inputs += ',';
            m.selected_inputs += data.covariate_names()[c];
        }
    } catch (const Error& e) {
        m = ReplicateMetrics{};
        m.ok = false;
        m.error = e.what();
        m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    m.replicate = r;
    return m;
}

SimulationResult run_replicates(const SimulationPlan& plan, const ReplicateCallback& on_done) {
    if (plan.replicates == 0) throw InvalidArgument("at least one replicate is required");
    plan.generator.validate();
    plan.selection.validate();

    SimulationResult out;
    out.replicates.resize(plan.replicates);
    std::mutex callback_mutex;
    auto run_one = [&](std::size_t r) {
        out.replicates[r] = run_replicate(plan, r);
        if (on_done) {
            std::lock_guard lock(callback_mutex);
            on_done(out.replicates[r]);
        }
    };

    const std::size_t workers = std::min(std::max<std::size_t>(1, plan.threads), plan.replicates);
    if (workers == 1) {
        for (std::size_t r = 0; r < plan.replicates; ++r) run_one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < plan.replicates; r = next++) run_one(r);
            });
    }
    out.aggregate = aggregate(out.replicates);
    return out;
}

}  // namespace fnnsel
