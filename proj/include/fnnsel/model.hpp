#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fnnsel/data.hpp"

namespace fnnsel {

enum class Activation { logistic };

/// Numerically stable logistic function; never overflows.
inline double logistic(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// K = (p + 2) q + 1. Throws InvalidArgument when q = 0.
std::size_t param_count(std::size_t p, std::size_t q);

/// Active covariate indices (0-based columns of the design matrix, kept
/// sorted and unique) plus the number of hidden nodes.
class Architecture {
public:
    Architecture() = default;
    /// Sorts and deduplicates `inputs`. Throws InvalidArgument when q = 0.
    Architecture(std::vector<std::size_t> inputs, std::size_t hidden);

    const std::vector<std::size_t>& inputs() const noexcept { return inputs_; }
    std::size_t p() const noexcept { return inputs_.size(); }
    std::size_t q() const noexcept { return hidden_; }
    std::size_t param_count() const { return fnnsel::param_count(p(), q()); }

    bool has_input(std::size_t column) const noexcept;
    Architecture with_hidden(std::size_t q) const { return {inputs_, q}; }
    Architecture without_input(std::size_t column) const;
    Architecture with_input(std::size_t column) const;

    /// "{0,2,5}/q=3", used as a stable key and in diagnostics.
    std::string key() const;

    friend auto operator<=>(const Architecture&, const Architecture&) = default;

private:
    std::vector<std::size_t> inputs_;
    std::size_t hidden_ = 1;
};

/// Structured view of the network weights.
struct NetworkWeights {
    Eigen::MatrixXd input_weights;   // p x q; (j, k) connects input j to hidden node k
    Eigen::VectorXd hidden_bias;     // q
    double output_bias = 0.0;
    Eigen::VectorXd output_weights;  // q
};

/// Flat parameter vector. Layout, for hidden node k = 0..q-1:
/// [bias_k, w_1k, ..., w_pk], then the output bias, then output weights
/// gamma_1..gamma_q.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::size_t p, std::size_t q);  // zero-filled
    ParamVector(std::size_t p, std::size_t q, Eigen::VectorXd theta);

    static ParamVector pack(const NetworkWeights& weights);
    NetworkWeights unpack() const;

    std::size_t p() const noexcept { return p_; }
    std::size_t q() const noexcept { return q_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(theta_.size()); }

    const Eigen::VectorXd& values() const noexcept { return theta_; }
    Eigen::VectorXd& values() noexcept { return theta_; }

    double& hidden_bias(std::size_t k) { return theta_(index_hidden_bias(k)); }
    double& input_weight(std::size_t j, std::size_t k) { return theta_(index_input_weight(j, k)); }
    double& output_bias() { return theta_(index_output_bias()); }
    double& output_weight(std::size_t k) { return theta_(index_output_weight(k)); }
    double hidden_bias(std::size_t k) const { return theta_(index_hidden_bias(k)); }
    double input_weight(std::size_t j, std::size_t k) const { return theta_(index_input_weight(j, k)); }
    double output_bias() const { return theta_(index_output_bias()); }
    double output_weight(std::size_t k) const { return theta_(index_output_weight(k)); }

    Eigen::Index index_hidden_bias(std::size_t k) const { return static_cast<Eigen::Index>(k * (p_ + 1)); }
    Eigen::Index index_input_weight(std::size_t j, std::size_t k) const {
        return static_cast<Eigen::Index>(k * (p_ + 1) + 1 + j);
    }
    Eigen::Index index_output_bias() const { return static_cast<Eigen::Index>(q_ * (p_ + 1)); }
    Eigen::Index index_output_weight(std::size_t k) const { return static_cast<Eigen::Index>(q_ * (p_ + 1) + 1 + k); }

    bool matches(const Architecture& arch) const noexcept { return arch.p() == p_ && arch.q() == q_; }

private:
    std::size_t p_ = 0;
    std::size_t q_ = 0;
    Eigen::VectorXd theta_;
};

/// Network output for one full covariate row; only the active columns are read.
double forward(const Architecture& arch, const ParamVector& theta, std::span<const double> row);

/// forward() for every row of a full design matrix.
Eigen::VectorXd predict_batch(const Architecture& arch, const ParamVector& theta, const Eigen::MatrixXd& x);

/// Residual sum of squares; throws FitFailure if it is not finite.
double rss(const Architecture& arch, const ParamVector& theta, const Dataset& data);

/// dRSS/dtheta in the ParamVector layout.
Eigen::VectorXd rss_gradient(const Architecture& arch, const ParamVector& theta, const Dataset& data);

/// Reusable RSS evaluator for one (architecture, dataset) pair. Copies the
/// active columns once and keeps scratch buffers, so a single instance is not
/// safe to share between threads.
class RssObjective {
public:
    RssObjective(const Architecture& arch, const Dataset& data);

    std::size_t dimension() const noexcept { return k_; }
    std::size_t rows() const noexcept { return static_cast<std::size_t>(x_.rows()); }

    /// RSS at theta. May return a non-finite value; callers decide.
    double value(const Eigen::VectorXd& theta);
    /// RSS at theta and its gradient, written into `gradient` (resized to K).
    double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& gradient);

private:
    void forward_pass(const Eigen::VectorXd& theta);

    std::size_t p_;
    std::size_t q_;
    std::size_t k_;
    Eigen::MatrixXd x_;  // n x p, active columns only
    Eigen::VectorXd y_;
    Eigen::MatrixXd w_;       // p x q
    Eigen::MatrixXd hidden_;  // n x q activations
    Eigen::VectorXd residual_;
    Eigen::MatrixXd delta_;
};

}  // namespace fnnsel
