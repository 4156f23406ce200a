#pragma once

// Compound-Poisson (+ optional Brownian) driving process: moments,
// Lévy-measure integrals and jump sampling.

#include <vector>

#include "random.hpp"

namespace cogarch {

enum class JumpKind { Normal, TwoPoint, Constant };

struct JumpDist {
    JumpKind kind = JumpKind::Normal;
    // Normal: variance. TwoPoint: v for +-v. Constant: v.
    double param = 1.0;

    static JumpDist normal(double variance) { return {JumpKind::Normal, variance}; }
    static JumpDist two_point(double v) { return {JumpKind::TwoPoint, v}; }
    static JumpDist constant(double v) { return {JumpKind::Constant, v}; }

    // E J^{2m}
    double even_moment(int m) const;
    double mean() const;
    double sample(Rng& rng) const;
};

struct LevyDriver {
    double rate = 1.0;  // jumps per unit time
    JumpDist jump;
    double brownian_var = 0.0;  // per unit time

    void validate() const;
    // Drift that makes E L_1 = 0 (nonzero only for Constant jumps).
    double compensating_drift() const { return -rate * jump.mean(); }
};

struct DriverMoments {
    double mu = 0.0;      // int y^2 dnu
    double rho = 0.0;     // int y^4 dnu
    double el1_sq = 0.0;  // E L_1^2 = tau^2 + mu
    bool mu_finite = true;
    bool rho_finite = true;
};

DriverMoments moments(const LevyDriver& d);

// c E log(1 + kappa J^2)
double log_integral(const LevyDriver& d, double kappa);

// c E[(1 + kappa J^2)^k - 1]
double power_integral(const LevyDriver& d, double kappa, int k);

struct Jump {
    double time;
    double size;     // Delta L
    double squared;  // Z = Delta L^2
};

// Jumps of L on (0, horizon], in time order.
std::vector<Jump> sample_jumps(const LevyDriver& d, double horizon, Rng& rng);

}  // namespace cogarch
