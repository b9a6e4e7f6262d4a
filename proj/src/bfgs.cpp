#include "fnnsel/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fnnsel {

const char* to_string(OptimizerStatus status) noexcept {
    switch (status) {
        case OptimizerStatus::gradient_converged: return "converged";
        case OptimizerStatus::iteration_limit: return "iteration_limit";
        case OptimizerStatus::stalled: return "stalled";
        case OptimizerStatus::non_finite_start: return "non_finite_start";
    }
    return "unknown";
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;
constexpr std::size_t kMaxLineSearchEvals = 40;

struct TrialPoint {
    double step = 0.0;
    double value = 0.0;
    double slope = 0.0;  // directional derivative
    bool finite = true;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db),
// safeguarded to the inner 80% of the bracket. Falls back to bisection.
double interpolate(const TrialPoint& a, const TrialPoint& b) {
    const double lo = std::min(a.step, b.step);
    const double hi = std::max(a.step, b.step);
    const double mid = 0.5 * (lo + hi);
    if (!a.finite || !b.finite) return mid;
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (disc < 0.0) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom == 0.0) return mid;
    const double t = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
    const double margin = 0.1 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return mid;
    return t;
}

class LineSearch {
public:
    LineSearch(const GradientFunction& f, const Eigen::VectorXd& x, const Eigen::VectorXd& direction, double f0,
               double slope0, std::size_t& evaluations)
        : f_(f), x_(x), d_(direction), f0_(f0), slope0_(slope0), evals_(evaluations) {}

    // Returns true on success with the accepted point in x_new / f_new / g_new.
    bool run(double initial_step, Eigen::VectorXd& x_new, double& f_new, Eigen::VectorXd& g_new) {
        TrialPoint prev{0.0, f0_, slope0_, true};
        double step = initial_step;
        for (std::size_t i = 0; i < kMaxLineSearchEvals; ++i) {
            TrialPoint cur = evaluate(step);
            if (!cur.finite || cur.value > f0_ + kArmijo * step * slope0_ || (i > 0 && cur.value >= prev.value))
                return zoom(prev, cur, x_new, f_new, g_new);
            if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                x_new = trial_x_;
                g_new = trial_g_;
                f_new = cur.value;
                return true;
            }
            if (cur.slope >= 0.0) return zoom(cur, prev, x_new, f_new, g_new);
            prev = cur;
            step *= 2.0;
        }
        return fallback(x_new, f_new, g_new);
    }

private:
    TrialPoint evaluate(double step) {
        trial_x_ = x_ + step * d_;
        const double value = f_(trial_x_, trial_g_);
        ++evals_;
        ++used_;
        TrialPoint t{step, value, 0.0, std::isfinite(value) && trial_g_.allFinite()};
        if (t.finite) {
            t.slope = trial_g_.dot(d_);
            if (value < f0_ + kArmijo * step * slope0_ && (!best_valid_ || value < best_value_)) {
                best_valid_ = true;
                best_value_ = value;
                best_x_ = trial_x_;
                best_g_ = trial_g_;
            }
        }
        return t;
    }

    bool zoom(TrialPoint lo, TrialPoint hi, Eigen::VectorXd& x_new, double& f_new, Eigen::VectorXd& g_new) {
        while (used_ < kMaxLineSearchEvals) {
            const double step = interpolate(lo, hi);
            if (std::abs(hi.step - lo.step) < 1e-16 * std::max(1.0, std::abs(lo.step))) break;
            TrialPoint cur = evaluate(step);
            if (!cur.finite || cur.value > f0_ + kArmijo * step * slope0_ || cur.value >= lo.value) {
                hi = cur;
            } else {
                if (std::abs(cur.slope) <= -kCurvature * slope0_) {
                    x_new = trial_x_;
                    g_new = trial_g_;
                    f_new = cur.value;
                    return true;
                }
                if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
                lo = cur;
            }
        }
        return fallback(x_new, f_new, g_new);
    }

    // Sufficient decrease without the curvature condition still makes progress.
    bool fallback(Eigen::VectorXd& x_new, double& f_new, Eigen::VectorXd& g_new) {
        if (!best_valid_) return false;
        x_new = best_x_;
        f_new = best_value_;
        g_new = best_g_;
        return true;
    }

    const GradientFunction& f_;
    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& d_;
    double f0_;
    double slope0_;
    std::size_t& evals_;
    std::size_t used_ = 0;
    Eigen::VectorXd trial_x_;
    Eigen::VectorXd trial_g_;
    bool best_valid_ = false;
    double best_value_ = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x_;
    Eigen::VectorXd best_g_;
};

}  // namespace

BfgsResult minimize_bfgs(const GradientFunction& f, Eigen::VectorXd x0, const BfgsOptions& options) {
    BfgsResult result;
    const auto dim = x0.size();
    Eigen::VectorXd g(dim);
    double fx = f(x0, g);
    result.evaluations = 1;
    result.x = std::move(x0);
    if (!std::isfinite(fx) || !g.allFinite()) {
        result.value = fx;
        result.gradient_norm = std::numeric_limits<double>::infinity();
        result.status = OptimizerStatus::non_finite_start;
        return result;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);
    bool fresh_hessian = true;
    Eigen::VectorXd x_new, g_new, direction, s, y, hy;
    double f_new = 0.0;

    result.status = OptimizerStatus::iteration_limit;
    while (true) {
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= options.gradient_tolerance) {
            result.status = OptimizerStatus::gradient_converged;
            break;
        }
        if (result.iterations >= options.max_iterations) break;

        direction.noalias() = -(inv_hessian * g);
        double slope = g.dot(direction);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            fresh_hessian = true;
            direction = -g;
            slope = -g.squaredNorm();
        }
        // Unit steps are natural once curvature is known; before that, cap the
        // first move so the largest coordinate changes by at most one.
        const double initial_step = fresh_hessian ? std::min(1.0, 1.0 / direction.lpNorm<Eigen::Infinity>()) : 1.0;

        LineSearch search(f, result.x, direction, fx, slope, result.evaluations);
        if (!search.run(initial_step, x_new, f_new, g_new)) {
            if (fresh_hessian) {
                result.status = OptimizerStatus::stalled;
                break;
            }
            inv_hessian.setIdentity();
            fresh_hessian = true;
            continue;
        }

        s = x_new - result.x;
        y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_hessian) {
                inv_hessian *= sy / y.squaredNorm();
                fresh_hessian = false;
            }
            const double rho = 1.0 / sy;
            hy.noalias() = inv_hessian * y;
            const double yhy = y.dot(hy);
            // H+ = H - rho (H y s' + s y' H) + (rho^2 y'Hy + rho) s s'
            inv_hessian.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
            inv_hessian.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
        }

        result.x.swap(x_new);
        g.swap(g_new);
        fx = f_new;
        ++result.iterations;
    }

    result.value = fx;
    result.gradient_norm = g.lpNorm<Eigen::Infinity>();
    return result;
}

}  // namespace fnnsel
