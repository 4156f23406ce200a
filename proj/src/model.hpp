#pragma once

// COGARCH(p,q) parameterization and the derived matrices/polynomials.

#include <array>
#include <vector>

#include "numlin.hpp"

namespace cogarch {

inline constexpr int kMaxOrder = 12;

struct CogarchParams {
    int p = 1;
    int q = 1;
    double alpha0 = 1.0;
    std::vector<double> alpha;  // alpha_1..alpha_p
    std::vector<double> beta;   // beta_1..beta_q

    void validate() const;
};

struct ModelMatrices {
    CogarchParams params;
    Matrix B;   // companion matrix, last row (-beta_q, ..., -beta_1)
    Vector a;   // (alpha_1, ..., alpha_q), zero-padded past p
    Vector e;   // q-th canonical vector
    Spectrum spec;
    double lambda = 0.0;  // Re lambda_1
    CMatrix S;            // Vandermonde diagonalizer
    CMatrix S_inv;
    double cond_S = 1.0;
    std::array<double, 3> kappa{};  // |S^{-1} e a' S|_r for r = 1, 2, inf

    int q() const { return params.q; }
    double kappa_of(Norm r) const { return kappa[static_cast<std::size_t>(r)]; }
};

ModelMatrices build_model(const CogarchParams& params);

struct MeanCorrectedMatrices {
    double mu = 0.0;
    Matrix B_tilde;                   // B + mu e a'
    std::vector<double> beta_tilde;   // coefficients of the monic b~(z)
    Spectrum spec;
    bool distinct = true;
};

MeanCorrectedMatrices mean_corrected(const ModelMatrices& m, double mu);

struct PolyValues {
    cplx a;
    cplx b;
    cplx b_tilde;
    cplx b_tilde_prime;
};

PolyValues eval_polys(const ModelMatrices& m, const MeanCorrectedMatrices& mc, cplx z);

// a(z) = alpha_1 + alpha_2 z + ... + alpha_p z^{p-1}
cplx poly_a(const CogarchParams& params, cplx z);
// Monic z^q + c_1 z^{q-1} + ... + c_q and its derivative.
cplx poly_monic(const std::vector<double>& coeffs, cplx z, cplx* deriv = nullptr);

}  // namespace cogarch
