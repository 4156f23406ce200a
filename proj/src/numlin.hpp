#pragma once

// Dense linear-algebra kernels shared by every other module.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cogarch {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Eigenvalues sorted by nonincreasing real part; ties (within 1e-9 relative)
// ordered by nondecreasing imaginary part.
struct Spectrum {
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }
    const cplx& operator[](std::size_t i) const { return values[i]; }
    double leading_real() const { return values.front().real(); }
    // Smallest pairwise distance scaled by 1 + |lambda|.
    double min_relative_separation() const;
};

enum class Norm { One, Two, Inf };

inline constexpr double kDistinctTol = 1e-8;

Matrix mat_exp(const Matrix& a, double t = 1.0);
CMatrix mat_exp(const CMatrix& a, double t = 1.0);

// Roots of z^q + beta_1 z^{q-1} + ... + beta_q (Aberth-Ehrlich), sorted as a
// Spectrum. Repeated roots are allowed here; callers decide.
Spectrum polynomial_roots(const std::vector<double>& beta);
// Same, but rejects repeated roots with ErrorCode::DegenerateSpectrum.
Spectrum companion_eigs(const std::vector<double>& beta);
void sort_spectrum(std::vector<cplx>& values);

CMatrix vandermonde(const Spectrum& spec);
// Condition estimate kappa_1(S) = |S|_1 |S^{-1}|_1.
double condition_estimate(const CMatrix& s);

double operator_norm(const Matrix& a, Norm r);
double operator_norm(const CMatrix& a, Norm r);

Matrix kron(const Matrix& a, const Matrix& b);
Vector vec(const Matrix& a);
Matrix unvec(const Vector& x, Eigen::Index rows);

// L = int_0^inf exp(bt s) u exp(bt' s) ds, via (I (x) Bt + Bt (x) I) vec(L) = -vec(U).
Matrix lyapunov_gram(const Matrix& bt, const Matrix& u);

Vector solve_linear(const Matrix& a, const Vector& b);

// Real part of z after checking |Im z| <= tol * max(1, |z|).
double realize(cplx z, double tol = 1e-8);
Matrix realize(const CMatrix& m, double tol = 1e-8);

}  // namespace cogarch
