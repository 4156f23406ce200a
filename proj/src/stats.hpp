#pragma once

// Empirical estimators used to hold simulations against theory.

#include <cstddef>
#include <vector>

namespace cogarch {

struct AcfEstimate {
    std::vector<double> values;  // lags 0..L, biased (1/n) denominator
    double band = 0.0;           // 1.96 / sqrt(n)
    std::size_t n = 0;
};

// Requires n > 10 L; a constant series has no correlation and is rejected.
AcfEstimate sample_acf(const std::vector<double>& series, std::size_t max_lag);

// Autocovariances at lags 0..L with the 1/n denominator.
std::vector<double> sample_acvf(const std::vector<double>& series, std::size_t max_lag);

struct AcfComparison {
    std::vector<double> z;  // (empirical - theory) sqrt(n), lags 1..L
    std::size_t within = 0;
    std::size_t total = 0;
    double fraction = 0.0;
    bool pass = false;
};

// theory[h] for h = 0..L; lag 0 is skipped. Lags count as inside when
// |empirical - theory| <= band.
AcfComparison compare_acf(const AcfEstimate& empirical, const std::vector<double>& theory,
                          double required_fraction = 0.9);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// Mean with a batch-means standard error (for autocorrelated series).
Estimate batch_mean(const std::vector<double>& series, std::size_t batches = 100);
// Variance (1/n, around the global mean) with a batch-means standard error.
Estimate batch_variance(const std::vector<double>& series, std::size_t batches = 100);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cogarch
