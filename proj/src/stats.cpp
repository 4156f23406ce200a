#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace cogarch {

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Asymptotic Kolmogorov survival function Q(l) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2).
double kolmogorov_q(double l) {
    if (l < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * l * l);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace

std::vector<double> sample_acvf(const std::vector<double>& series, std::size_t max_lag) {
    const std::size_t n = series.size();
    require(n > max_lag, ErrorCode::InvalidArgument, "sample_acvf: series shorter than the lag range");
    const double mu = mean_of(series);
    std::vector<double> c(series.size());
    for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - mu;
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        double s = 0.0;
        for (std::size_t i = 0; i + h < n; ++i) s += c[i] * c[i + h];
        out[h] = s / static_cast<double>(n);
    }
    return out;
}

AcfEstimate sample_acf(const std::vector<double>& series, std::size_t max_lag) {
    const std::size_t n = series.size();
    require(n > 10 * max_lag && n >= 2, ErrorCode::InvalidArgument, "sample_acf: need n > 10 L");
    const std::vector<double> acvf = sample_acvf(series, max_lag);
    const double mu = mean_of(series);
    if (!(acvf[0] > 1e-28 * std::max(1.0, mu * mu)))
        fail(ErrorCode::Domain, "sample_acf: series is constant, correlation undefined");
    AcfEstimate est;
    est.n = n;
    est.band = 1.96 / std::sqrt(static_cast<double>(n));
    est.values.resize(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h) est.values[h] = acvf[h] / acvf[0];
    return est;
}

AcfComparison compare_acf(const AcfEstimate& empirical, const std::vector<double>& theory, double required_fraction) {
    require(theory.size() == empirical.values.size(), ErrorCode::InvalidArgument,
            "compare_acf: lag grids differ");
    AcfComparison out;
    const double root_n = std::sqrt(static_cast<double>(empirical.n));
    for (std::size_t h = 1; h < theory.size(); ++h) {
        const double z = (empirical.values[h] - theory[h]) * root_n;
        out.z.push_back(z);
        if (std::abs(empirical.values[h] - theory[h]) <= empirical.band) ++out.within;
        ++out.total;
    }
    out.fraction = out.total ? static_cast<double>(out.within) / static_cast<double>(out.total) : 1.0;
    out.pass = out.fraction >= required_fraction;
    return out;
}

Estimate batch_mean(const std::vector<double>& series, std::size_t batches) {
    require(batches >= 2 && series.size() >= 2 * batches, ErrorCode::InvalidArgument,
            "batch_mean: need at least two observations per batch");
    const std::size_t len = series.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto first = series.begin() + static_cast<std::ptrdiff_t>(b * len);
        means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / static_cast<double>(len);
    }
    Estimate est;
    est.value = mean_of(series);
    const double bm = mean_of(means);
    double ss = 0.0;
    for (double m : means) ss += (m - bm) * (m - bm);
    est.se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
    return est;
}

Estimate batch_variance(const std::vector<double>& series, std::size_t batches) {
    const double mu = mean_of(series);
    std::vector<double> sq(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) sq[i] = (series[i] - mu) * (series[i] - mu);
    return batch_mean(sq, batches);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), ErrorCode::InvalidArgument, "ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double ne = na * nb / (na + nb);
    const double root = std::sqrt(ne);
    r.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
    return r;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "ls_slope: need matching samples");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, ErrorCode::Domain, "ls_slope: x values are all equal");
    return sxy / sxx;
}

}  // namespace cogarch
