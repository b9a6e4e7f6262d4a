#include "fnnsel/criteria.hpp"

#include <cmath>
#include <numbers>

#include "fnnsel/errors.hpp"
#include "fnnsel/model.hpp"
#include "fnnsel/trainer.hpp"

namespace fnnsel {

double sigma2_mle(double rss, std::size_t n) {
    if (n == 0) throw InvalidArgument("sample size must be at least 1");
    if (!(rss >= 0.0) || !std::isfinite(rss)) throw InvalidArgument("rss must be finite and nonnegative");
    if (rss == 0.0) throw DegenerateFit("zero residual sum of squares: likelihood is unbounded");
    return rss / static_cast<double>(n);
}

double log_likelihood(double rss, std::size_t n) {
    if (n == 0) throw InvalidArgument("sample size must be at least 1");
    if (!(rss > 0.0) || !std::isfinite(rss)) throw InvalidArgument("log-likelihood needs a finite positive rss");
    const double nd = static_cast<double>(n);
    return -0.5 * nd * (std::log(2.0 * std::numbers::pi * rss / nd) + 1.0);
}

double bic(double log_lik, std::size_t n, std::size_t k) {
    if (n == 0) throw InvalidArgument("sample size must be at least 1");
    if (k == 0) throw InvalidArgument("parameter count must be at least 1");
    return -2.0 * log_lik + std::log(static_cast<double>(n)) * static_cast<double>(k + 1);
}

double aic(double log_lik, std::size_t k) {
    if (k == 0) throw InvalidArgument("parameter count must be at least 1");
    return -2.0 * log_lik + 2.0 * static_cast<double>(k + 1);
}

FitSummary summarize(double rss, std::size_t n, std::size_t k) {
    FitSummary s;
    s.rss = rss;
    s.n = n;
    s.k = k;
    s.sigma2_hat = sigma2_mle(rss, n);
    s.log_lik = log_likelihood(rss, n);
    s.bic = bic(s.log_lik, n, k);
    s.aic = aic(s.log_lik, k);
    return s;
}

double oos_mse(const FittedModel& model, const Dataset& holdout) {
    if (holdout.rows() == 0) throw InvalidArgument("holdout set is empty");
    const Eigen::VectorXd pred = predict_batch(model.arch, model.theta, holdout.x());
    return (holdout.y() - pred).squaredNorm() / static_cast<double>(holdout.rows());
}

}  // namespace fnnsel
