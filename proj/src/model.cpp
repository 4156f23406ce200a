#include "model.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace cogarch {

void CogarchParams::validate() const {
    std::ostringstream os;
    if (!(p >= 1 && q >= p)) {
        os << "model: need q >= p >= 1 (got p=" << p << ", q=" << q << ")";
        fail(ErrorCode::Validation, os.str());
    }
    if (q > kMaxOrder) {
        os << "model: q=" << q << " exceeds the supported maximum " << kMaxOrder;
        fail(ErrorCode::Validation, os.str());
    }
    require(std::isfinite(alpha0) && alpha0 > 0.0, ErrorCode::Validation, "model: alpha0 must be > 0");
    if (alpha.size() != static_cast<std::size_t>(p) || beta.size() != static_cast<std::size_t>(q)) {
        os << "model: expected " << p << " alpha and " << q << " beta coefficients (got "
           << alpha.size() << " and " << beta.size() << ")";
        fail(ErrorCode::Validation, os.str());
    }
    for (double x : alpha) require(std::isfinite(x), ErrorCode::Validation, "model: alpha not finite");
    for (double x : beta) require(std::isfinite(x), ErrorCode::Validation, "model: beta not finite");
    require(alpha.back() != 0.0, ErrorCode::Validation, "model: alpha_p must be nonzero");
    require(beta.back() != 0.0, ErrorCode::Validation, "model: beta_q must be nonzero");
}

ModelMatrices build_model(const CogarchParams& params) {
    params.validate();
    const int q = params.q;
    ModelMatrices m;
    m.params = params;
    m.B = Matrix::Zero(q, q);
    for (int i = 0; i + 1 < q; ++i) m.B(i, i + 1) = 1.0;
    for (int j = 0; j < q; ++j) m.B(q - 1, j) = -params.beta[static_cast<std::size_t>(q - 1 - j)];
    m.a = Vector::Zero(q);
    for (int i = 0; i < params.p; ++i) m.a(i) = params.alpha[static_cast<std::size_t>(i)];
    m.e = Vector::Zero(q);
    m.e(q - 1) = 1.0;

    m.spec = companion_eigs(params.beta);
    m.lambda = m.spec.leading_real();
    m.S = vandermonde(m.spec);
    m.cond_S = condition_estimate(m.S);
    if (!(m.cond_S <= 1e12)) {
        std::ostringstream os;
        os << "model: Vandermonde diagonalizer ill-conditioned (condition estimate " << m.cond_S << ")";
        fail(ErrorCode::IllConditioned, os.str());
    }
    m.S_inv = m.S.partialPivLu().inverse();

    CMatrix diag = CMatrix::Zero(q, q);
    for (int i = 0; i < q; ++i) diag(i, i) = m.spec[static_cast<std::size_t>(i)];
    const double resid = (m.S_inv * m.B.cast<cplx>() * m.S - diag).cwiseAbs().rowwise().sum().maxCoeff();
    const double scale = std::max(1.0, operator_norm(m.B, Norm::Inf));
    if (!(resid <= 1e-8 * scale)) {
        std::ostringstream os;
        os << "model: diagonalization residual " << resid << " too large";
        fail(ErrorCode::IllConditioned, os.str());
    }

    const CMatrix ea = m.e.cast<cplx>() * m.a.cast<cplx>().transpose();
    const CMatrix core = m.S_inv * ea * m.S;
    m.kappa[static_cast<std::size_t>(Norm::One)] = operator_norm(core, Norm::One);
    m.kappa[static_cast<std::size_t>(Norm::Two)] = operator_norm(core, Norm::Two);
    m.kappa[static_cast<std::size_t>(Norm::Inf)] = operator_norm(core, Norm::Inf);
    return m;
}

MeanCorrectedMatrices mean_corrected(const ModelMatrices& m, double mu) {
    require(std::isfinite(mu) && mu >= 0.0, ErrorCode::InvalidArgument, "mean_corrected: mu must be >= 0");
    const int q = m.q();
    MeanCorrectedMatrices mc;
    mc.mu = mu;
    mc.B_tilde = m.B + mu * m.e * m.a.transpose();
    mc.beta_tilde.resize(static_cast<std::size_t>(q));
    for (int k = 1; k <= q; ++k)
        mc.beta_tilde[static_cast<std::size_t>(k - 1)] = m.params.beta[static_cast<std::size_t>(k - 1)] - mu * m.a(q - k);
    mc.spec = polynomial_roots(mc.beta_tilde);
    mc.distinct = mc.spec.min_relative_separation() > kDistinctTol;
    return mc;
}

cplx poly_a(const CogarchParams& params, cplx z) {
    cplx out = 0.0;
    for (auto it = params.alpha.rbegin(); it != params.alpha.rend(); ++it) out = out * z + *it;
    return out;
}

cplx poly_monic(const std::vector<double>& coeffs, cplx z, cplx* deriv) {
    cplx p = 1.0;
    cplx dp = 0.0;
    for (double c : coeffs) {
        dp = dp * z + p;
        p = p * z + c;
    }
    if (deriv) *deriv = dp;
    return p;
}

PolyValues eval_polys(const ModelMatrices& m, const MeanCorrectedMatrices& mc, cplx z) {
    PolyValues out;
    out.a = poly_a(m.params, z);
    out.b = poly_monic(m.params.beta, z);
    out.b_tilde = poly_monic(mc.beta_tilde, z, &out.b_tilde_prime);
    return out;
}

}  // namespace cogarch
