#include "fnnsel/model.hpp"

#include <algorithm>
#include <cmath>

#include "fnnsel/errors.hpp"

namespace fnnsel {

std::size_t param_count(std::size_t p, std::size_t q) {
    if (q == 0) throw InvalidArgument("hidden node count must be at least 1");
    return (p + 2) * q + 1;
}

Architecture::Architecture(std::vector<std::size_t> inputs, std::size_t hidden)
    : inputs_(std::move(inputs)), hidden_(hidden) {
    if (hidden_ == 0) throw InvalidArgument("hidden node count must be at least 1");
    std::sort(inputs_.begin(), inputs_.end());
    inputs_.erase(std::unique(inputs_.begin(), inputs_.end()), inputs_.end());
}

bool Architecture::has_input(std::size_t column) const noexcept {
    return std::binary_search(inputs_.begin(), inputs_.end(), column);
}

Architecture Architecture::without_input(std::size_t column) const {
    std::vector<std::size_t> next;
    next.reserve(inputs_.size());
    std::copy_if(inputs_.begin(), inputs_.end(), std::back_inserter(next), [&](auto c) { return c != column; });
    return {std::move(next), hidden_};
}

Architecture Architecture::with_input(std::size_t column) const {
    auto next = inputs_;
    next.push_back(column);
    return {std::move(next), hidden_};
}

std::string Architecture::key() const {
    std::string s = "{";
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(inputs_[i]);
    }
    s += "}/q=" + std::to_string(hidden_);
    return s;
}

ParamVector::ParamVector(std::size_t p, std::size_t q)
    : p_(p), q_(q), theta_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(p, q)))) {}

ParamVector::ParamVector(std::size_t p, std::size_t q, Eigen::VectorXd theta) : p_(p), q_(q), theta_(std::move(theta)) {
    if (static_cast<std::size_t>(theta_.size()) != param_count(p, q))
        throw InvalidArgument("parameter vector length does not match (p + 2) q + 1");
}

ParamVector ParamVector::pack(const NetworkWeights& w) {
    const auto p = static_cast<std::size_t>(w.input_weights.rows());
    const auto q = static_cast<std::size_t>(w.input_weights.cols());
    if (static_cast<std::size_t>(w.hidden_bias.size()) != q || static_cast<std::size_t>(w.output_weights.size()) != q)
        throw InvalidArgument("inconsistent network weight shapes");
    ParamVector out(p, q);
    for (std::size_t k = 0; k < q; ++k) {
        out.hidden_bias(k) = w.hidden_bias(static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < p; ++j)
            out.input_weight(j, k) = w.input_weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        out.output_weight(k) = w.output_weights(static_cast<Eigen::Index>(k));
    }
    out.output_bias() = w.output_bias;
    return out;
}

NetworkWeights ParamVector::unpack() const {
    NetworkWeights w;
    const auto p = static_cast<Eigen::Index>(p_);
    const auto q = static_cast<Eigen::Index>(q_);
    w.input_weights.resize(p, q);
    w.hidden_bias.resize(q);
    w.output_weights.resize(q);
    for (std::size_t k = 0; k < q_; ++k) {
        w.hidden_bias(static_cast<Eigen::Index>(k)) = hidden_bias(k);
        for (std::size_t j = 0; j < p_; ++j)
            w.input_weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = input_weight(j, k);
        w.output_weights(static_cast<Eigen::Index>(k)) = output_weight(k);
    }
    w.output_bias = output_bias();
    return w;
}

namespace {

void check_shapes(const Architecture& arch, const ParamVector& theta) {
    if (!theta.matches(arch)) throw InvalidArgument("parameter vector does not match architecture " + arch.key());
}

void check_columns(const Architecture& arch, std::size_t available) {
    if (!arch.inputs().empty() && arch.inputs().back() >= available)
        throw InvalidArgument("architecture references a covariate column that does not exist");
}

}  // namespace

double forward(const Architecture& arch, const ParamVector& theta, std::span<const double> row) {
    check_shapes(arch, theta);
    check_columns(arch, row.size());
    const auto& inputs = arch.inputs();
    for (auto c : inputs)
        if (!std::isfinite(row[c])) throw InvalidArgument("non-finite covariate value");

    double out = theta.output_bias();
    for (std::size_t k = 0; k < arch.q(); ++k) {
        double z = theta.hidden_bias(k);
        for (std::size_t j = 0; j < inputs.size(); ++j) z += theta.input_weight(j, k) * row[inputs[j]];
        out += theta.output_weight(k) * logistic(z);
    }
    return out;
}

Eigen::VectorXd predict_batch(const Architecture& arch, const ParamVector& theta, const Eigen::MatrixXd& x) {
    check_shapes(arch, theta);
    check_columns(arch, static_cast<std::size_t>(x.cols()));
    const auto n = x.rows();
    const auto p = static_cast<Eigen::Index>(arch.p());
    if (n == 0) return Eigen::VectorXd(0);

    Eigen::MatrixXd active(n, p);
    for (Eigen::Index j = 0; j < p; ++j) active.col(j) = x.col(static_cast<Eigen::Index>(arch.inputs()[j]));
    if (!active.allFinite()) throw InvalidArgument("non-finite covariate value");

    const auto w = theta.unpack();
    Eigen::MatrixXd z = active * w.input_weights;
    z.rowwise() += w.hidden_bias.transpose();
    Eigen::MatrixXd h = z.unaryExpr([](double v) { return logistic(v); });
    Eigen::VectorXd out = h * w.output_weights;
    out.array() += w.output_bias;
    return out;
}

double rss(const Architecture& arch, const ParamVector& theta, const Dataset& data) {
    check_shapes(arch, theta);
    RssObjective objective(arch, data);
    const double value = objective.value(theta.values());
    if (!std::isfinite(value)) throw FitFailure("non-finite residual sum of squares");
    return value;
}

Eigen::VectorXd rss_gradient(const Architecture& arch, const ParamVector& theta, const Dataset& data) {
    check_shapes(arch, theta);
    RssObjective objective(arch, data);
    Eigen::VectorXd gradient;
    const double value = objective.value_and_gradient(theta.values(), gradient);
    if (!std::isfinite(value) || !gradient.allFinite()) throw FitFailure("non-finite residual sum of squares");
    return gradient;
}

RssObjective::RssObjective(const Architecture& arch, const Dataset& data)
    : p_(arch.p()), q_(arch.q()), k_(arch.param_count()), y_(data.y()) {
    check_columns(arch, data.covariates());
    const auto n = static_cast<Eigen::Index>(data.rows());
    x_.resize(n, static_cast<Eigen::Index>(p_));
    for (std::size_t j = 0; j < p_; ++j)
        x_.col(static_cast<Eigen::Index>(j)) = data.x().col(static_cast<Eigen::Index>(arch.inputs()[j]));
    w_.resize(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(q_));
}

void RssObjective::forward_pass(const Eigen::VectorXd& theta) {
    if (static_cast<std::size_t>(theta.size()) != k_) throw InvalidArgument("parameter vector length mismatch");
    const auto p = static_cast<Eigen::Index>(p_);
    const auto q = static_cast<Eigen::Index>(q_);
    const auto stride = p + 1;
    for (Eigen::Index k = 0; k < q; ++k) w_.col(k) = theta.segment(k * stride + 1, p);

    hidden_.noalias() = x_ * w_;
    for (Eigen::Index k = 0; k < q; ++k) {
        const double bias = theta(k * stride);
        auto col = hidden_.col(k);
        for (Eigen::Index i = 0; i < col.size(); ++i) col(i) = logistic(col(i) + bias);
    }
    const double output_bias = theta(q * stride);
    residual_.noalias() = -(hidden_ * theta.segment(q * stride + 1, q));
    residual_.array() += y_.array() - output_bias;
}

double RssObjective::value(const Eigen::VectorXd& theta) {
    forward_pass(theta);
    return residual_.squaredNorm();
}

double RssObjective::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& gradient) {
    forward_pass(theta);
    const auto p = static_cast<Eigen::Index>(p_);
    const auto q = static_cast<Eigen::Index>(q_);
    const auto stride = p + 1;
    const auto gamma = theta.segment(q * stride + 1, q);

    gradient.resize(static_cast<Eigen::Index>(k_));
    // r = y - g(x); dRSS/dg = -2 r.
    gradient(q * stride) = -2.0 * residual_.sum();
    gradient.segment(q * stride + 1, q).noalias() = -2.0 * (hidden_.transpose() * residual_);

    // delta_ik = -2 r_i gamma_k h_ik (1 - h_ik)
    delta_ = hidden_.array() * (1.0 - hidden_.array());
    for (Eigen::Index k = 0; k < q; ++k) delta_.col(k).array() *= (-2.0 * gamma(k)) * residual_.array();

    const Eigen::MatrixXd weight_grad = x_.transpose() * delta_;  // p x q
    for (Eigen::Index k = 0; k < q; ++k) {
        gradient(k * stride) = delta_.col(k).sum();
        gradient.segment(k * stride + 1, p) = weight_grad.col(k);
    }
    return residual_.squaredNorm();
}

}  // namespace fnnsel
