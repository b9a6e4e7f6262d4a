#pragma once

#include <cstddef>

namespace fnnsel {

class Dataset;
struct FittedModel;

/// Fit quality with sigma^2 profiled out. Both criteria count K + 1
/// parameters: the network weights plus the error variance.
struct FitSummary {
    double rss = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    double sigma2_hat = 0.0;
    double log_lik = 0.0;
    double bic = 0.0;
    double aic = 0.0;
};

/// rss / n. Throws DegenerateFit when rss == 0 (the likelihood is unbounded).
double sigma2_mle(double rss, std::size_t n);

/// Gaussian log-likelihood at the profile estimate sigma^2 = rss / n:
/// -(n/2) (ln(2 pi rss / n) + 1).
double log_likelihood(double rss, std::size_t n);

/// -2 log_lik + ln(n) (K + 1)
double bic(double log_lik, std::size_t n, std::size_t k);

/// -2 log_lik + 2 (K + 1)
double aic(double log_lik, std::size_t k);

/// All of the above from one RSS.
FitSummary summarize(double rss, std::size_t n, std::size_t k);

/// Mean squared prediction error of a fitted model on held-out rows.
double oos_mse(const FittedModel& model, const Dataset& holdout);

}  // namespace fnnsel
