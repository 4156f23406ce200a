#pragma once

// Deterministic parallel ensembles: every replication i draws from
// make_stream(seed, i), so results do not depend on the thread count.

#include <cstdint>
#include <functional>

#include "simulate.hpp"

namespace cogarch {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

// q x n matrix of independent stationary draws.
Matrix stationary_ensemble(const Simulator& sim, std::size_t n, std::uint64_t seed,
                           const StationaryOptions& opt = {}, unsigned threads = 0);

struct MatrixEstimate {
    Matrix mean;
    Matrix se;  // standard error of each entry
};

// Entrywise mean of J_{0,t} over n replications.
MatrixEstimate propagator_mean(const Simulator& sim, double t, std::size_t n, std::uint64_t seed,
                               unsigned threads = 0);

struct HrEstimate {
    Vector hr;
    Vector hr_se;
    Vector cov_yg;     // cov(Y_r, G_r^2)
    Vector cov_yg_se;
    std::size_t n_paths = 0;
};

// Monte-Carlo completion of H_r from stationary starts; refuses n < 1000.
HrEstimate estimate_hr(const Simulator& sim, double r, std::size_t n_paths, std::uint64_t seed,
                       unsigned threads = 0);

}  // namespace cogarch
