#pragma once

// Closed-form stationary moments of Y and V, autocovariances of V and of
// squared increments of G.

#include <optional>
#include <vector>

#include "levy.hpp"
#include "model.hpp"

namespace cogarch {

// -alpha0 mu B~^{-1} e; cross-checked against alpha0 mu / (beta_q - alpha1 mu) e_1.
// Requires the first-moment condition.
Vector mean_state(const ModelMatrices& m, const LevyDriver& d);

// Unique solution of the Kronecker system, symmetrized and validated against
// the Gramian route. Requires the second-moment condition.
Matrix cov_state(const ModelMatrices& m, const LevyDriver& d);

// Both routes separately, for tests and reports.
struct CovRoutes {
    Matrix kronecker;
    Matrix gramian;
    double rel_diff = 0.0;
};
CovRoutes cov_state_routes(const ModelMatrices& m, const LevyDriver& d);

// rho a' Gram(B~, ee') a
double m_value(const ModelMatrices& m, const LevyDriver& d);

struct VMoments {
    double mean = 0.0;
    double var = 0.0;
};
VMoments stationary_v_moments(const ModelMatrices& m, const LevyDriver& d);

// alpha1 mu / (beta_q - mu alpha1): mean of the auxiliary CARMA comparison
// process. Diagnostic only.
double psi_mean(const ModelMatrices& m, const LevyDriver& d);

enum class AcvfRoute { Matrix, Spectral };

// Spectral expansion of h -> cov(V_{t+h}, V_t) = scale * Re sum_j w_j exp(l_j h).
struct AcvfSpectral {
    double scale = 0.0;
    std::vector<cplx> lambda;
    std::vector<cplx> weight;

    double operator()(double h) const;
};

// Empty when the eigenvalues of B~ are not distinct (a warning is logged).
std::optional<AcvfSpectral> acvf_spectral(const ModelMatrices& m, const LevyDriver& d);

double acvf_v(const ModelMatrices& m, const LevyDriver& d, double h, AcvfRoute route = AcvfRoute::Matrix);

// Values at each lag by both routes; throws if they disagree beyond 1e-8
// relative to var V.
struct AcvfTable {
    std::vector<double> lags;
    std::vector<double> matrix;
    std::vector<double> spectral;  // empty when the spectral route is unavailable
};
AcvfTable acvf_v_table(const ModelMatrices& m, const LevyDriver& d, const std::vector<double>& lags);

struct IncrementMoments {
    double mean = 0.0;
    double variance = 0.0;
};
// Requires the first-moment condition and a nonnegative volatility kernel.
IncrementMoments increment_moments(const ModelMatrices& m, const LevyDriver& d, double r);

// E(L_1^2) B~^{-1} (I - exp(-B~ r)); multiplies cov(Y_r, G_r^2) to give H_r.
Matrix hr_operator(const ModelMatrices& m, const LevyDriver& d, double r);

// a' exp(B~ h) H_r for h >= r.
double sq_increment_acvf(const ModelMatrices& m, const LevyDriver& d, double r, double h, const Vector& hr);

// E(e^{BT}) for T ~ Exponential(c): (I - B/c)^{-1}.
Matrix mean_flow(const ModelMatrices& m, double rate);

// Residual of (I - E Q) E Y = E R for the jump-then-flow fixed point.
double fixed_point_mean_residual(const ModelMatrices& m, const LevyDriver& d);

struct MomentReport {
    double mu = 0.0;
    double rho = 0.0;
    double el1_sq = 0.0;
    MeanCorrectedMatrices mc;
    Vector mean_y;
    Matrix cov_y;
    double cov_route_diff = 0.0;
    double m = 0.0;
    VMoments v;
    double psi_mean = 0.0;
    std::optional<AcvfSpectral> spectral;
};

// Everything above in one pass; requires the second-moment condition.
MomentReport moment_report(const ModelMatrices& m, const LevyDriver& d);

}  // namespace cogarch
