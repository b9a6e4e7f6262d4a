#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

namespace fnnsel {

/// Objective callback: returns f(x) and writes the gradient into the second
/// argument. A non-finite return value marks x as infeasible.
using GradientFunction = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

enum class OptimizerStatus {
    gradient_converged,  // sup-norm of the gradient fell below tolerance
    iteration_limit,     // max_iterations reached first
    stalled,             // no step satisfying the Wolfe conditions could be found
    non_finite_start,    // objective not finite at the starting point
};

const char* to_string(OptimizerStatus status) noexcept;

struct BfgsOptions {
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-6;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;  // sup-norm at x
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    OptimizerStatus status = OptimizerStatus::iteration_limit;
};

/// Dense BFGS on the inverse Hessian with a strong-Wolfe line search.
/// Every accepted step lowers f.
BfgsResult minimize_bfgs(const GradientFunction& f, Eigen::VectorXd x0, const BfgsOptions& options);

}  // namespace fnnsel
