#include "moments.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "conditions.hpp"
#include "errors.hpp"

namespace cogarch {

namespace {

void require_condition(const ModelMatrices& m, const LevyDriver& d, int k, const char* who) {
    const ConditionReport rep = check_moment(m, d, k);
    if (!rep.verdict) {
        std::ostringstream os;
        os << who << ": prerequisite " << rep.equation << " condition fails for every norm (best margin "
           << std::max({rep.entries[0].margin, rep.entries[1].margin, rep.entries[2].margin}) << ")";
        fail(ErrorCode::Validation, os.str());
    }
}

void require_nonnegative_kernel(const ModelMatrices& m, const char* who) {
    const PositivityVerdict v = check_positivity(m);
    if (v.status == PositivityStatus::ProvenNonnegative) return;
    if (v.status == PositivityStatus::NumericEvidenceOnly && v.grid && v.grid->nonnegative && v.grid->tail_nonnegative) {
        warn(std::string(who) + ": volatility kernel nonnegativity rests on a grid scan only");
        return;
    }
    std::ostringstream os;
    os << who << ": volatility kernel is not nonnegative (rule " << rule_id(v.rule) << ")";
    fail(ErrorCode::Validation, os.str());
}

double denominator(const ModelMatrices& m, double mu) {
    const double den = m.params.beta.back() - m.params.alpha.front() * mu;
    if (!(std::abs(den) > 1e-14 * std::max(1.0, std::abs(m.params.beta.back()))))
        fail(ErrorCode::Singular, "B~ is singular: beta_q = alpha_1 mu");
    return den;
}

// alpha0^2 beta_q^2 rho / (beta_q - mu alpha1)^2
double gamma_const(const ModelMatrices& m, const DriverMoments& mom) {
    const double den = denominator(m, mom.mu);
    const double bq = m.params.beta.back();
    return m.params.alpha0 * m.params.alpha0 * bq * bq * mom.rho / (den * den);
}

Matrix symmetrize_psd(const Matrix& c, const char* who) {
    Matrix s = 0.5 * (c + c.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const double tr = std::abs(s.trace());
    const double lo = es.eigenvalues().minCoeff();
    if (lo >= 0.0) return s;
    if (lo < -1e-8 * tr) {
        std::ostringstream os;
        os << who << ": covariance has eigenvalue " << lo << " below -1e-8 trace";
        fail(ErrorCode::Internal, os.str());
    }
    warn(std::string(who) + ": clipped slightly negative covariance eigenvalues to zero");
    const Vector clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

Matrix ee(const ModelMatrices& m) { return m.e * m.e.transpose(); }

}  // namespace

Vector mean_state(const ModelMatrices& m, const LevyDriver& d) {
    require_condition(m, d, 1, "mean_state");
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    const double den = denominator(m, mom.mu);
    const Vector y = -m.params.alpha0 * mom.mu * solve_linear(mc.B_tilde, m.e);
    Vector explicit_form = Vector::Zero(m.q());
    explicit_form(0) = m.params.alpha0 * mom.mu / den;
    const double diff = (y - explicit_form).lpNorm<Eigen::Infinity>();
    if (!(diff <= 1e-10 * std::max(1.0, explicit_form.lpNorm<Eigen::Infinity>()))) {
        std::ostringstream os;
        os << "mean_state: solve and explicit form differ by " << diff;
        fail(ErrorCode::Internal, os.str());
    }
    return y;
}

CovRoutes cov_state_routes(const ModelMatrices& m, const LevyDriver& d) {
    require_condition(m, d, 2, "cov_state");
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    const double g = gamma_const(m, mom);
    const int q = m.q();
    const Matrix id = Matrix::Identity(q, q);
    const Matrix ea = m.e * m.a.transpose();
    const Matrix op = kron(id, mc.B_tilde) + kron(mc.B_tilde, id) + mom.rho * kron(ea, ea);

    CovRoutes out;
    out.kronecker = symmetrize_psd(unvec(solve_linear(op, -g * vec(ee(m))), q), "cov_state");
    const Matrix gram = lyapunov_gram(mc.B_tilde, ee(m));
    const double mv = mom.rho * m.a.dot(gram * m.a);
    if (!(mv >= 0.0 && mv < 1.0)) fail(ErrorCode::Internal, "cov_state: m outside [0,1) although the second-moment condition holds");
    out.gramian = symmetrize_psd(g / (1.0 - mv) * gram, "cov_state");
    const double scale = std::max(out.kronecker.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    out.rel_diff = (out.kronecker - out.gramian).cwiseAbs().maxCoeff() / scale;
    return out;
}

Matrix cov_state(const ModelMatrices& m, const LevyDriver& d) {
    const CovRoutes r = cov_state_routes(m, d);
    if (!(r.rel_diff <= 1e-8)) {
        std::ostringstream os;
        os << "cov_state: Kronecker and Gramian routes differ by " << r.rel_diff << " (relative)";
        fail(ErrorCode::IllConditioned, os.str());
    }
    return r.kronecker;
}

double m_value(const ModelMatrices& m, const LevyDriver& d) {
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    if (!(mc.spec.leading_real() < 0.0))
        fail(ErrorCode::Domain, "m_value: B~ has an eigenvalue with nonnegative real part");
    const double mv = mom.rho * m.a.dot(lyapunov_gram(mc.B_tilde, ee(m)) * m.a);
    if (!(mv < 1.0) && check_moment(m, d, 2).verdict)
        fail(ErrorCode::Internal, "m_value: m >= 1 although the second-moment condition holds");
    return mv;
}

VMoments stationary_v_moments(const ModelMatrices& m, const LevyDriver& d) {
    require_condition(m, d, 2, "stationary_v_moments");
    const DriverMoments mom = moments(d);
    const double den = denominator(m, mom.mu);
    const double bq = m.params.beta.back();
    const double mv = m_value(m, d);
    VMoments out;
    out.mean = m.params.alpha0 * bq / den;
    out.var = m.params.alpha0 * m.params.alpha0 * bq * bq / (den * den) * mv / (1.0 - mv);
    const double quad = m.a.dot(cov_state(m, d) * m.a);
    if (!(std::abs(quad - out.var) <= 1e-8 * std::max(out.var, std::numeric_limits<double>::min()))) {
        std::ostringstream os;
        os << "stationary_v_moments: a'Ca = " << quad << " disagrees with closed form " << out.var;
        fail(ErrorCode::IllConditioned, os.str());
    }
    return out;
}

double psi_mean(const ModelMatrices& m, const LevyDriver& d) {
    const DriverMoments mom = moments(d);
    return m.params.alpha.front() * mom.mu / denominator(m, mom.mu);
}

double AcvfSpectral::operator()(double h) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) s += weight[j] * std::exp(lambda[j] * h);
    return scale * s.real();
}

std::optional<AcvfSpectral> acvf_spectral(const ModelMatrices& m, const LevyDriver& d) {
    require_condition(m, d, 2, "acvf_spectral");
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    if (!mc.distinct) {
        warn("acvf_V: eigenvalues of B~ not distinct, spectral route skipped");
        return std::nullopt;
    }
    AcvfSpectral out;
    out.scale = gamma_const(m, mom) / (1.0 - m_value(m, d));
    for (const cplx& l : mc.spec.values) {
        const PolyValues pv = eval_polys(m, mc, l);
        const cplx a_neg = poly_a(m.params, -l);
        const cplx bt_neg = poly_monic(mc.beta_tilde, -l);
        out.lambda.push_back(l);
        out.weight.push_back(pv.a * a_neg / (pv.b_tilde_prime * bt_neg));
    }
    return out;
}

double acvf_v(const ModelMatrices& m, const LevyDriver& d, double h, AcvfRoute route) {
    require(std::isfinite(h) && h >= 0.0, ErrorCode::Domain, "acvf_V: lag must be >= 0");
    if (route == AcvfRoute::Spectral) {
        const auto sp = acvf_spectral(m, d);
        if (!sp) fail(ErrorCode::NotApplicable, "acvf_V: spectral route needs distinct eigenvalues of B~");
        return (*sp)(h);
    }
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    return m.a.dot(mat_exp(mc.B_tilde, h) * cov_state(m, d) * m.a);
}

AcvfTable acvf_v_table(const ModelMatrices& m, const LevyDriver& d, const std::vector<double>& lags) {
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    const Vector ca = cov_state(m, d) * m.a;
    const auto sp = acvf_spectral(m, d);
    const double var = m.a.dot(ca);
    AcvfTable t;
    t.lags = lags;
    for (double h : lags) {
        require(std::isfinite(h) && h >= 0.0, ErrorCode::Domain, "acvf_V: lag must be >= 0");
        const double mv = m.a.dot(mat_exp(mc.B_tilde, h) * ca);
        t.matrix.push_back(mv);
        if (sp) {
            const double sv = (*sp)(h);
            t.spectral.push_back(sv);
            if (!(std::abs(sv - mv) <= 1e-8 * std::max(var, std::numeric_limits<double>::min()))) {
                std::ostringstream os;
                os << "acvf_V: matrix and spectral routes disagree at h=" << h << " (" << mv << " vs " << sv << ")";
                fail(ErrorCode::IllConditioned, os.str());
            }
        }
    }
    return t;
}

IncrementMoments increment_moments(const ModelMatrices& m, const LevyDriver& d, double r) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::Domain, "increment_moments: spacing must be >= 0");
    require_condition(m, d, 1, "increment_moments");
    require_nonnegative_kernel(m, "increment_moments");
    const DriverMoments mom = moments(d);
    const double bq = m.params.beta.back();
    IncrementMoments out;
    out.variance = m.params.alpha0 * bq * r / denominator(m, mom.mu) * mom.el1_sq;
    return out;
}

Matrix hr_operator(const ModelMatrices& m, const LevyDriver& d, double r) {
    require(std::isfinite(r) && r > 0.0, ErrorCode::Domain, "H_r: spacing must be > 0");
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    denominator(m, mom.mu);
    const Matrix rhs = Matrix::Identity(m.q(), m.q()) - mat_exp(mc.B_tilde, -r);
    return mom.el1_sq * mc.B_tilde.partialPivLu().solve(rhs);
}

double sq_increment_acvf(const ModelMatrices& m, const LevyDriver& d, double r, double h, const Vector& hr) {
    require(hr.size() == m.q(), ErrorCode::InvalidArgument, "sq_increment_acvf: H_r has the wrong length");
    require(std::isfinite(r) && r > 0.0, ErrorCode::Domain, "sq_increment_acvf: spacing must be > 0");
    require(std::isfinite(h) && h >= r, ErrorCode::Domain, "sq_increment_acvf: requires h >= r");
    const DriverMoments mom = moments(d);
    const MeanCorrectedMatrices mc = mean_corrected(m, mom.mu);
    return m.a.dot(mat_exp(mc.B_tilde, h) * hr);
}

Matrix mean_flow(const ModelMatrices& m, double rate) {
    require(std::isfinite(rate) && rate > 0.0, ErrorCode::InvalidArgument, "mean_flow: rate must be > 0");
    const Matrix op = Matrix::Identity(m.q(), m.q()) - m.B / rate;
    return op.partialPivLu().inverse();
}

double fixed_point_mean_residual(const ModelMatrices& m, const LevyDriver& d) {
    const DriverMoments mom = moments(d);
    const double ez = mom.mu / d.rate;
    const Matrix ef = mean_flow(m, d.rate);
    const int q = m.q();
    const Matrix eq = ef * (Matrix::Identity(q, q) + ez * m.e * m.a.transpose());
    const Vector er = m.params.alpha0 * ez * ef * m.e;
    const Vector ey = mean_state(m, d);
    const Vector lhs = (Matrix::Identity(q, q) - eq) * ey;
    return (lhs - er).lpNorm<Eigen::Infinity>() / std::max(1.0, er.lpNorm<Eigen::Infinity>());
}

MomentReport moment_report(const ModelMatrices& m, const LevyDriver& d) {
    MomentReport rep;
    const DriverMoments mom = moments(d);
    rep.mu = mom.mu;
    rep.rho = mom.rho;
    rep.el1_sq = mom.el1_sq;
    rep.mc = mean_corrected(m, mom.mu);
    rep.mean_y = mean_state(m, d);
    const CovRoutes cr = cov_state_routes(m, d);
    rep.cov_route_diff = cr.rel_diff;
    rep.cov_y = cov_state(m, d);
    rep.m = m_value(m, d);
    rep.v = stationary_v_moments(m, d);
    rep.psi_mean = psi_mean(m, d);
    rep.spectral = acvf_spectral(m, d);
    return rep;
}

}  // namespace cogarch
