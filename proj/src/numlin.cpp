#include "numlin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace cogarch {

namespace {

// Padé coefficients and theta_m bounds for the scaling-and-squaring
// exponential (Higham, 2005).
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;
// Beyond this |At|_1 we refuse rather than risk Inf.
constexpr double kExpNormCap = 1e6;

template <typename M, std::size_t N>
M pade_low(const M& a, const std::array<double, N>& b) {
    const auto n = a.rows();
    const M id = M::Identity(n, n);
    const M a2 = a * a;
    M power = id;
    M u_inner = M::Zero(n, n);
    M v = M::Zero(n, n);
    for (std::size_t k = 0; k < N; k += 2) {
        v += b[k] * power;
        if (k + 1 < N) u_inner += b[k + 1] * power;
        power = power * a2;
    }
    const M u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

template <typename M>
M pade13(const M& a) {
    const auto& b = kPade13;
    const auto n = a.rows();
    const M id = M::Identity(n, n);
    const M a2 = a * a;
    const M a4 = a2 * a2;
    const M a6 = a4 * a2;
    const M u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                     b[3] * a2 + b[1] * id);
    const M v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

template <typename M>
double norm1(const M& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename M>
M expm_impl(const M& a_in, double t) {
    require(a_in.rows() == a_in.cols(), ErrorCode::InvalidArgument, "mat_exp: matrix is not square");
    require(std::isfinite(t), ErrorCode::InvalidArgument, "mat_exp: non-finite time");
    require(a_in.allFinite(), ErrorCode::InvalidArgument, "mat_exp: non-finite entries");
    const M a = a_in * t;
    const double nrm = norm1(a);
    if (nrm > kExpNormCap) {
        std::ostringstream os;
        os << "mat_exp: |At|_1 = " << nrm << " exceeds cap " << kExpNormCap;
        fail(ErrorCode::Overflow, os.str());
    }
    M result;
    if (nrm <= kTheta[0]) {
        result = pade_low(a, kPade3);
    } else if (nrm <= kTheta[1]) {
        result = pade_low(a, kPade5);
    } else if (nrm <= kTheta[2]) {
        result = pade_low(a, kPade7);
    } else if (nrm <= kTheta[3]) {
        result = pade_low(a, kPade9);
    } else {
        const int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
        result = pade13(M(a * std::ldexp(1.0, -s)));
        for (int i = 0; i < s; ++i) result = result * result;
    }
    if (!result.allFinite()) fail(ErrorCode::Overflow, "mat_exp: result overflowed");
    return result;
}

cplx horner(const std::vector<double>& beta, cplx z, cplx* deriv) {
    // Monic: z^q + beta_1 z^{q-1} + ... + beta_q.
    cplx p = 1.0;
    cplx dp = 0.0;
    for (double c : beta) {
        dp = dp * z + p;
        p = p * z + c;
    }
    if (deriv) *deriv = dp;
    return p;
}

}  // namespace

Matrix mat_exp(const Matrix& a, double t) { return expm_impl(a, t); }
CMatrix mat_exp(const CMatrix& a, double t) { return expm_impl(a, t); }

double Spectrum::min_relative_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            const double scale = 1.0 + std::max(std::abs(values[i]), std::abs(values[j]));
            best = std::min(best, std::abs(values[i] - values[j]) / scale);
        }
    return best;
}

void sort_spectrum(std::vector<cplx>& values) {
    std::sort(values.begin(), values.end(),
              [](const cplx& x, const cplx& y) { return x.real() > y.real(); });
    // Group near-equal real parts, then order each group by imaginary part.
    std::size_t start = 0;
    while (start < values.size()) {
        std::size_t end = start + 1;
        while (end < values.size() &&
               std::abs(values[end].real() - values[start].real()) <=
                   1e-9 * (1.0 + std::abs(values[start]))) {
            ++end;
        }
        std::sort(values.begin() + static_cast<std::ptrdiff_t>(start),
                  values.begin() + static_cast<std::ptrdiff_t>(end),
                  [](const cplx& x, const cplx& y) { return x.imag() < y.imag(); });
        start = end;
    }
}

Spectrum polynomial_roots(const std::vector<double>& beta) {
    const std::size_t q = beta.size();
    require(q >= 1, ErrorCode::InvalidArgument, "polynomial_roots: empty coefficient vector");
    for (double c : beta)
        require(std::isfinite(c), ErrorCode::InvalidArgument, "polynomial_roots: non-finite coefficient");

    Spectrum spec;
    if (beta.back() == 0.0) {
        // Deflate the root at zero.
        std::vector<cplx> roots = {cplx(0.0, 0.0)};
        if (q > 1) {
            const Spectrum rest = polynomial_roots(std::vector<double>(beta.begin(), beta.end() - 1));
            roots.insert(roots.end(), rest.values.begin(), rest.values.end());
        }
        sort_spectrum(roots);
        spec.values = std::move(roots);
        return spec;
    }
    if (q == 1) {
        spec.values = {cplx(-beta[0], 0.0)};
        return spec;
    }

    // Start on a circle whose radius is the geometric mean of root moduli,
    // rotated off the real axis so the start set is not conjugate-symmetric.
    const double radius = std::pow(std::abs(beta.back()), 1.0 / static_cast<double>(q));
    std::vector<cplx> z(q);
    for (std::size_t k = 0; k < q; ++k) {
        const double angle = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(q) + 0.4;
        z[k] = std::polar(radius, angle);
    }

    constexpr int kMaxIter = 2000;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < kMaxIter; ++iter) {
        bool converged = true;
        for (std::size_t k = 0; k < q; ++k) {
            cplx dp;
            const cplx p = horner(beta, z[k], &dp);
            if (p == 0.0) continue;
            const cplx ratio = p / dp;
            cplx repulsion = 0.0;
            for (std::size_t j = 0; j < q; ++j)
                if (j != k) repulsion += 1.0 / (z[k] - z[j]);
            const cplx w = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
            z[k] -= w;
            if (std::abs(w) > 4.0 * eps * std::max(1.0, std::abs(z[k]))) converged = false;
        }
        if (converged) break;
    }

    // Newton polish, accepted only when the residual improves.
    for (auto& root : z) {
        for (int i = 0; i < 3; ++i) {
            cplx dp;
            const cplx p = horner(beta, root, &dp);
            if (dp == 0.0) break;
            const cplx cand = root - p / dp;
            if (std::abs(horner(beta, cand, nullptr)) < std::abs(p)) root = cand;
            else break;
        }
    }

    // Real coefficients: snap near-real roots and enforce exact conjugate pairs.
    for (auto& root : z)
        if (std::abs(root.imag()) <= 1e-10 * (1.0 + std::abs(root))) root = cplx(root.real(), 0.0);
    std::vector<bool> used(q, false);
    for (std::size_t i = 0; i < q; ++i) {
        if (used[i] || z[i].imag() <= 0.0) continue;
        std::size_t best = q;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < q; ++j) {
            if (j == i || used[j] || z[j].imag() >= 0.0) continue;
            const double d = std::abs(z[j] - std::conj(z[i]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == q) continue;
        const cplx avg = 0.5 * (z[i] + std::conj(z[best]));
        z[i] = avg;
        z[best] = std::conj(avg);
        used[i] = used[best] = true;
    }

    for (const auto& root : z) {
        const double res = std::abs(horner(beta, root, nullptr));
        const double bound = 1e-9 * std::pow(1.0 + std::abs(root), static_cast<double>(q));
        if (!(res <= bound)) {
            std::ostringstream os;
            os << "polynomial_roots: residual " << res << " at root " << root << " exceeds " << bound;
            fail(ErrorCode::NonConvergence, os.str());
        }
    }
    sort_spectrum(z);
    spec.values = std::move(z);
    return spec;
}

Spectrum companion_eigs(const std::vector<double>& beta) {
    Spectrum spec = polynomial_roots(beta);
    const double sep = spec.min_relative_separation();
    if (sep <= kDistinctTol) {
        std::ostringstream os;
        os << "companion_eigs: eigenvalues not distinct (relative separation " << sep << ")";
        fail(ErrorCode::DegenerateSpectrum, os.str());
    }
    return spec;
}

CMatrix vandermonde(const Spectrum& spec) {
    const auto q = static_cast<Eigen::Index>(spec.size());
    CMatrix s(q, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        cplx power = 1.0;
        for (Eigen::Index i = 0; i < q; ++i) {
            s(i, j) = power;
            power *= spec[static_cast<std::size_t>(j)];
        }
    }
    return s;
}

double condition_estimate(const CMatrix& s) {
    Eigen::FullPivLU<CMatrix> lu(s);
    if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
    return norm1(s) * norm1(CMatrix(lu.inverse()));
}

namespace {

template <typename M>
double spectral_norm(const M& a) {
    using V = Eigen::Matrix<typename M::Scalar, Eigen::Dynamic, 1>;
    if (a.size() == 0) return 0.0;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const M an = a / scale;
    const M gram = an.adjoint() * an;
    const auto n = gram.rows();
    // Deterministic, generic start vector.
    V x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.1 * std::sqrt(static_cast<double>(i + 2));
    x.normalize();
    double est = 0.0;
    for (int iter = 0; iter < 200000; ++iter) {
        V y = gram * x;
        const double ny = y.norm();
        if (ny == 0.0) {
            // x landed in the null space; perturb.
            x = V::Ones(n);
            x(iter % n) += 1.0;
            x.normalize();
            continue;
        }
        const double next = std::real(x.dot(y));  // Rayleigh quotient, |x| = 1
        x = y / ny;
        if (iter > 0 && std::abs(next - est) <= 1e-13 * std::abs(next)) {
            est = next;
            break;
        }
        est = next;
    }
    // One last Rayleigh quotient on the converged vector.
    est = std::max(est, std::real(x.dot(gram * x)));
    return scale * std::sqrt(std::max(est, 0.0));
}

template <typename M>
double operator_norm_impl(const M& a, Norm r) {
    if (a.size() == 0) return 0.0;
    switch (r) {
        case Norm::One: return a.cwiseAbs().colwise().sum().maxCoeff();
        case Norm::Inf: return a.cwiseAbs().rowwise().sum().maxCoeff();
        case Norm::Two: return spectral_norm(a);
    }
    fail(ErrorCode::InvalidArgument, "operator_norm: invalid norm selector");
}

}  // namespace

double operator_norm(const Matrix& a, Norm r) { return operator_norm_impl(a, r); }
double operator_norm(const CMatrix& a, Norm r) { return operator_norm_impl(a, r); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector vec(const Matrix& a) {
    // Eigen storage is column-major: stacking columns is a reshape.
    return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& x, Eigen::Index rows) {
    require(rows > 0 && x.size() % rows == 0, ErrorCode::InvalidArgument,
            "unvec: length is not a multiple of the row count");
    return Eigen::Map<const Matrix>(x.data(), rows, x.size() / rows);
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "solve_linear: matrix is not square");
    require(a.rows() == b.size(), ErrorCode::InvalidArgument, "solve_linear: dimension mismatch");
    require(a.allFinite() && b.allFinite(), ErrorCode::InvalidArgument, "solve_linear: non-finite input");
    const double anorm = operator_norm(a, Norm::Inf);
    Eigen::PartialPivLU<Matrix> lu(a);
    const Matrix& packed = lu.matrixLU();
    const double threshold = 1e-13 * anorm;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < packed.rows(); ++i)
        if (std::abs(packed(i, i)) > threshold) ++rank;
    if (anorm == 0.0 || rank < a.rows()) {
        std::ostringstream os;
        os << "solve_linear: matrix singular to tolerance (rank estimate " << rank << " of "
           << a.rows() << ")";
        fail(ErrorCode::Singular, os.str());
    }
    Vector x = lu.solve(b);
    auto residual_ok = [&](const Vector& sol) {
        return (a * sol - b).lpNorm<Eigen::Infinity>() <=
               1e-10 * (anorm * sol.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
    };
    if (!residual_ok(x)) {
        x += lu.solve(Vector(b - a * x));
        if (!residual_ok(x)) fail(ErrorCode::Singular, "solve_linear: residual check failed");
    }
    return x;
}

Matrix lyapunov_gram(const Matrix& bt, const Matrix& u) {
    require(bt.rows() == bt.cols(), ErrorCode::InvalidArgument, "lyapunov_gram: Bt not square");
    require(u.rows() == bt.rows() && u.cols() == bt.cols(), ErrorCode::InvalidArgument,
            "lyapunov_gram: U has the wrong shape");
    const Eigen::EigenSolver<Matrix> es(bt, false);
    const double lead = es.eigenvalues().real().maxCoeff();
    if (!(lead < 0.0)) {
        std::ostringstream os;
        os << "lyapunov_gram: spectrum not in the open left half-plane (max real part " << lead << ")";
        fail(ErrorCode::Domain, os.str());
    }
    const auto q = bt.rows();
    const Matrix id = Matrix::Identity(q, q);
    const Matrix op = kron(id, bt) + kron(bt, id);
    const Matrix gram = unvec(solve_linear(op, -vec(u)), q);
    const double resid = (bt * gram + gram * bt.transpose() + u).lpNorm<Eigen::Infinity>();
    const double unorm = std::max(u.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
    if (!(resid <= 1e-10 * unorm)) {
        std::ostringstream os;
        os << "lyapunov_gram: residual " << resid << " exceeds 1e-10 |U|";
        fail(ErrorCode::Singular, os.str());
    }
    return gram;
}

double realize(cplx z, double tol) {
    if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z))) {
        std::ostringstream os;
        os << "imaginary residue " << z.imag() << " too large for a real quantity";
        fail(ErrorCode::Internal, os.str());
    }
    return z.real();
}

Matrix realize(const CMatrix& m, double tol) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (m.imag().cwiseAbs().maxCoeff() > tol * scale)
        fail(ErrorCode::Internal, "imaginary residue too large for a real matrix");
    return m.real();
}

}  // namespace cogarch
