#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "moments.hpp"

namespace cogarch {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        try {
            for (std::size_t i = cursor++; i < n; i = cursor++) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error) first_error = std::current_exception();
            cursor = n;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

Matrix stationary_ensemble(const Simulator& sim, std::size_t n, std::uint64_t seed, const StationaryOptions& opt,
                           unsigned threads) {
    const ConditionReport rep = check_stationarity(sim.model(), sim.driver());
    require(rep.verdict, ErrorCode::Validation, "stationary_ensemble: stationarity condition fails for every norm");
    Matrix out(sim.model().q(), static_cast<Eigen::Index>(n));
    parallel_for(
        n,
        [&](std::size_t i) {
            Rng rng = make_stream(seed, i);
            out.col(static_cast<Eigen::Index>(i)) = sim.stationary_init(rng, opt);
        },
        threads);
    return out;
}

MatrixEstimate propagator_mean(const Simulator& sim, double t, std::size_t n, std::uint64_t seed, unsigned threads) {
    require(n >= 2, ErrorCode::InvalidArgument, "propagator_mean: need at least 2 replications");
    const int q = sim.model().q();
    std::vector<Matrix> draws(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            Rng rng = make_stream(seed, i);
            draws[i] = sim.sample_propagator(t, rng);
        },
        threads);
    MatrixEstimate est{Matrix::Zero(q, q), Matrix::Zero(q, q)};
    for (const auto& d : draws) est.mean += d;
    est.mean /= static_cast<double>(n);
    Matrix ss = Matrix::Zero(q, q);
    for (const auto& d : draws) ss += (d - est.mean).cwiseAbs2();
    est.se = (ss / static_cast<double>(n - 1) / static_cast<double>(n)).cwiseSqrt();
    return est;
}

HrEstimate estimate_hr(const Simulator& sim, double r, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    require(n_paths >= 1000, ErrorCode::InvalidArgument, "estimate_Hr: n_paths must be >= 1000");
    require(std::isfinite(r) && r > 0.0, ErrorCode::Domain, "estimate_Hr: spacing must be > 0");
    const ConditionReport rep = check_stationarity(sim.model(), sim.driver());
    require(rep.verdict, ErrorCode::Validation, "estimate_Hr: stationarity condition fails for every norm");
    const int q = sim.model().q();
    Matrix ys(q, static_cast<Eigen::Index>(n_paths));
    Vector g2(static_cast<Eigen::Index>(n_paths));
    parallel_for(
        n_paths,
        [&](std::size_t i) {
            Rng rng = make_stream(seed, i);
            const Vector y0 = sim.stationary_init(rng);
            const Path p = sim.simulate_path(r, y0, rng);
            ys.col(static_cast<Eigen::Index>(i)) = p.y_end;
            g2(static_cast<Eigen::Index>(i)) = p.g_end * p.g_end;
        },
        threads);

    const double n = static_cast<double>(n_paths);
    const Vector y_mean = ys.rowwise().mean();
    const double g_mean = g2.mean();
    // Per-path products whose mean is the covariance estimate.
    Matrix prod(q, static_cast<Eigen::Index>(n_paths));
    for (Eigen::Index i = 0; i < prod.cols(); ++i) prod.col(i) = (ys.col(i) - y_mean) * (g2(i) - g_mean);
    HrEstimate est;
    est.n_paths = n_paths;
    est.cov_yg = prod.rowwise().sum() / (n - 1.0);
    const Matrix centered = prod.colwise() - prod.rowwise().mean();
    const Matrix sigma = centered * centered.transpose() / (n - 1.0) / n;
    est.cov_yg_se = sigma.diagonal().cwiseMax(0.0).cwiseSqrt();
    const Matrix op = hr_operator(sim.model(), sim.driver(), r);
    est.hr = op * est.cov_yg;
    est.hr_se = (op * sigma * op.transpose()).diagonal().cwiseMax(0.0).cwiseSqrt();
    return est;
}

}  // namespace cogarch
