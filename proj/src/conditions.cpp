#include "conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace cogarch {

namespace {

constexpr std::array<Norm, 3> kNorms = {Norm::One, Norm::Two, Norm::Inf};
constexpr double kKernelFloor = -1e-10;

double eig_tol(cplx z) { return 1e-9 * (1.0 + std::abs(z)); }
bool is_real(cplx z) { return std::abs(z.imag()) <= eig_tol(z); }

ConditionReport fill_report(const ModelMatrices& m, const std::string& equation,
                            const std::function<double(double)>& lhs_of_kappa, double rhs) {
    ConditionReport rep;
    rep.equation = equation;
    for (Norm r : kNorms) {
        ConditionEntry& ent = rep.entries[static_cast<std::size_t>(r)];
        ent.r = r;
        ent.kappa = m.kappa_of(r);
        ent.lhs = lhs_of_kappa(ent.kappa);
        ent.rhs = rhs;
        ent.margin = ent.rhs - ent.lhs;
        ent.satisfied = ent.margin > kStrictMargin;
        rep.verdict = rep.verdict || ent.satisfied;
    }
    return rep;
}

// Samples f(t) = a' exp(Bt) x0 on a uniform grid, re-anchoring the
// propagation periodically to stop round-off drift.
template <typename Visit>
void walk_grid(const ModelMatrices& m, const Vector& x0, double step, double horizon, Visit visit) {
    const Matrix prop = mat_exp(m.B, step);
    const auto n = static_cast<long>(std::ceil(horizon / step));
    Vector x = x0;
    for (long k = 0; k <= n; ++k) {
        if (k > 0 && k % 1024 == 0) x = mat_exp(m.B, static_cast<double>(k) * step) * x0;
        visit(static_cast<double>(k) * step, m.a.dot(x));
        x = prop * x;
    }
}

// Spectral weights c_j of f(t) = sum_j c_j exp(lambda_j t) for a' exp(Bt) x0.
std::vector<cplx> spectral_weights(const ModelMatrices& m, const Vector& x0) {
    const CVector left = m.a.cast<cplx>().transpose() * m.S;
    const CVector right = m.S_inv * x0.cast<cplx>();
    std::vector<cplx> w(m.spec.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = left(static_cast<Eigen::Index>(j)) * right(static_cast<Eigen::Index>(j));
    return w;
}

// Sign of the dominant (slowest-decaying) nonvanishing spectral component:
// true when a real term dominates any oscillating terms of the same rate.
bool dominant_tail_positive(const Spectrum& spec, const std::vector<cplx>& w) {
    double wmax = 0.0;
    for (const auto& c : w) wmax = std::max(wmax, std::abs(c));
    if (wmax == 0.0) return true;
    std::size_t start = 0;
    while (start < spec.size()) {
        std::size_t end = start + 1;
        while (end < spec.size() && std::abs(spec[end].real() - spec[start].real()) <= eig_tol(spec[start])) ++end;
        double real_sum = 0.0;
        double osc_amp = 0.0;
        bool any = false;
        for (std::size_t j = start; j < end; ++j) {
            if (std::abs(w[j]) <= 1e-12 * wmax) continue;
            any = true;
            if (is_real(spec[j])) real_sum += w[j].real();
            else osc_amp += std::abs(w[j]);
        }
        if (any) return real_sum > osc_amp;
        start = end;
    }
    return true;
}

}  // namespace

ConditionReport check_stationarity(const ModelMatrices& m, const LevyDriver& d) {
    return fill_report(m, "stationarity-log-moment", [&](double kappa) { return log_integral(d, kappa); }, -m.lambda);
}

ConditionReport check_moment(const ModelMatrices& m, const LevyDriver& d, int k) {
    require(k >= 1, ErrorCode::InvalidArgument, "check_moment: k must be >= 1");
    const DriverMoments mom = moments(d);
    if ((k >= 1 && !mom.mu_finite) || (k >= 2 && !mom.rho_finite))
        fail(ErrorCode::NotApplicable, "check_moment: required jump moment is infinite");
    std::string eq = k == 1 ? "first-moment" : k == 2 ? "second-moment" : "moment-order-" + std::to_string(k);
    return fill_report(m, eq, [&](double kappa) { return power_integral(d, kappa, k); },
                       -m.lambda * static_cast<double>(k));
}

FourthMomentDisplay fourth_moment_display(const ModelMatrices& m, const LevyDriver& d, Norm r) {
    const DriverMoments mom = moments(d);
    const double kappa = m.kappa_of(r);
    FourthMomentDisplay out;
    out.lhs = kappa * kappa * mom.rho;
    out.rhs = 2.0 * (-m.lambda - kappa * mom.mu);
    out.satisfied = out.rhs - out.lhs > kStrictMargin;
    return out;
}

double kernel(const ModelMatrices& m, double t) {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::Domain, "kernel: t must be >= 0");
    return m.a.dot(mat_exp(m.B, t) * m.e);
}

const char* rule_id(PositivityRule rule) {
    switch (rule) {
        case PositivityRule::AllRealNegative: return "all-real-spectrum";
        case PositivityRule::ConjugatePairing: return "conjugate-real-pairing";
        case PositivityRule::NoDominantReal: return "no-dominant-real-eigenvalue";
        case PositivityRule::RootMajorization: return "root-majorization";
        case PositivityRule::TwoByTwo: return "order-2-2-criterion";
        case PositivityRule::GridScan: return "grid-scan";
    }
    return "?";
}

const char* status_name(PositivityStatus status) {
    switch (status) {
        case PositivityStatus::ProvenNonnegative: return "ProvenNonnegative";
        case PositivityStatus::ProvenViolated: return "ProvenViolated";
        case PositivityStatus::NumericEvidenceOnly: return "NumericEvidenceOnly";
    }
    return "?";
}

GridScan scan_kernel(const ModelMatrices& m) {
    GridScan g;
    g.step = 0.01 / std::max(1.0, operator_norm(m.B, Norm::Inf));
    g.horizon = 40.0 / std::max(std::abs(m.lambda), 1e-6);
    g.min_value = std::numeric_limits<double>::infinity();
    walk_grid(m, m.e, g.step, g.horizon, [&](double t, double v) {
        if (v < g.min_value) {
            g.min_value = v;
            g.argmin = t;
        }
    });
    g.nonnegative = g.min_value >= kKernelFloor;
    g.tail_nonnegative = dominant_tail_positive(m.spec, spectral_weights(m, m.e));
    return g;
}

bool conjugate_pairing_exists(const Spectrum& spec) {
    std::vector<double> pairs;  // real parts, one per conjugate pair
    std::vector<double> reals;
    for (const auto& z : spec.values) {
        if (is_real(z)) reals.push_back(z.real());
        else if (z.imag() > 0.0) pairs.push_back(z.real());
    }
    if (pairs.size() > reals.size()) return false;
    std::sort(pairs.begin(), pairs.end(), std::greater<>());
    std::sort(reals.begin(), reals.end(), std::greater<>());
    auto fits = [](double real_eig, double pair_re) {
        return real_eig >= pair_re - 1e-9 * (1.0 + std::abs(pair_re));
    };

    // Greedy: strongest pair takes the largest remaining real eigenvalue.
    {
        bool ok = true;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (!fits(reals[i], pairs[i])) { ok = false; break; }
        if (ok) return true;
    }

    // Exhaustive search over injections (q <= 12 keeps this small).
    std::vector<bool> used(reals.size(), false);
    std::function<bool(std::size_t)> assign = [&](std::size_t i) {
        if (i == pairs.size()) return true;
        for (std::size_t j = 0; j < reals.size(); ++j) {
            if (used[j] || !fits(reals[j], pairs[i])) continue;
            used[j] = true;
            if (assign(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return assign(0);
}

PositivityVerdict check_positivity(const ModelMatrices& m) {
    const auto& prm = m.params;
    if (!(m.lambda < 0.0) || !(prm.alpha[0] > 0.0))
        fail(ErrorCode::NotApplicable, "check_positivity: requires lambda(B) < 0 and alpha_1 > 0");

    PositivityVerdict v;
    auto proven = [&](PositivityRule rule) {
        v.status = PositivityStatus::ProvenNonnegative;
        v.rule = rule;
        return v;
    };
    auto violated = [&](PositivityRule rule) {
        const GridScan g = scan_kernel(m);
        v.status = PositivityStatus::ProvenViolated;
        v.rule = rule;
        v.witness_t = g.argmin;
        v.witness_value = g.min_value;
        v.grid = g;
        return v;
    };
    auto evidence = [&]() {
        const GridScan g = scan_kernel(m);
        v.status = PositivityStatus::NumericEvidenceOnly;
        v.rule = PositivityRule::GridScan;
        v.grid = g;
        if (!g.nonnegative) {
            v.witness_t = g.argmin;
            v.witness_value = g.min_value;
        }
        return v;
    };

    const bool all_real = std::all_of(m.spec.values.begin(), m.spec.values.end(), is_real);

    if (prm.p == 2 && prm.q == 2) {
        const bool ok = all_real && prm.alpha[1] >= 0.0 && prm.alpha[0] >= -prm.alpha[1] * m.lambda;
        return ok ? proven(PositivityRule::TwoByTwo) : violated(PositivityRule::TwoByTwo);
    }

    if (prm.p == 1) {
        if (all_real) return proven(PositivityRule::AllRealNegative);
        if (conjugate_pairing_exists(m.spec)) return proven(PositivityRule::ConjugatePairing);
        const bool dominant_real = std::any_of(m.spec.values.begin(), m.spec.values.end(), [&](cplx z) {
            return is_real(z) && z.real() >= m.lambda - eig_tol(z);
        });
        if (!dominant_real) return violated(PositivityRule::NoDominantReal);
        return evidence();
    }

    if (all_real) {
        // Roots of a(z) = alpha_p z^{p-1} + ... + alpha_1, normalized to monic.
        std::vector<double> monic;
        for (int k = prm.p - 2; k >= 0; --k) monic.push_back(prm.alpha[static_cast<std::size_t>(k)] / prm.alpha.back());
        const Spectrum gamma = polynomial_roots(monic);
        const bool roots_negative = std::all_of(gamma.values.begin(), gamma.values.end(),
                                                [](cplx z) { return is_real(z) && z.real() < 0.0; });
        if (roots_negative) {
            double sum_gamma = 0.0;
            double sum_lambda = 0.0;
            bool ok = true;
            for (int k = 0; k < prm.p - 1; ++k) {
                sum_gamma += gamma[static_cast<std::size_t>(k)].real();
                sum_lambda += m.spec[static_cast<std::size_t>(k)].real();
                if (sum_gamma > sum_lambda + 1e-12 * (1.0 + std::abs(sum_lambda))) { ok = false; break; }
            }
            if (ok) return proven(PositivityRule::RootMajorization);
        }
    }
    return evidence();
}

InitialStateCheck check_initial_state(const ModelMatrices& m, const Vector& y0, double t_max) {
    require(y0.size() == m.q(), ErrorCode::InvalidArgument, "check_initial_state: y0 has the wrong length");
    require(std::isfinite(t_max) && t_max > 0.0, ErrorCode::InvalidArgument, "check_initial_state: t_max must be > 0");
    const double step = 0.01 / std::max(1.0, operator_norm(m.B, Norm::Inf));
    InitialStateCheck out;
    out.infimum = std::numeric_limits<double>::infinity();
    walk_grid(m, y0, step, t_max, [&](double, double v) { out.infimum = std::min(out.infimum, v); });
    out.ok = out.infimum >= -m.params.alpha0 + 1e-12;
    // Beyond t_max the trajectory decays to 0 when lambda < 0; otherwise the
    // dominant spectral component decides.
    if (out.ok && !(m.lambda < 0.0)) out.ok = dominant_tail_positive(m.spec, spectral_weights(m, y0));
    return out;
}

}  // namespace cogarch
