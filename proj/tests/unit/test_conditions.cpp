#include <cmath>
#include <random>

#include "conditions.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "support/random_models.hpp"

using namespace cogarch;
using cogarch::testing::ex7_driver;
using cogarch::testing::ex7_params;

namespace {

// a' exp(Bt) e by residues: sum_j a(l_j) exp(l_j t) / b'(l_j), eigenvalues
// from a dense eigensolver.
double kernel_oracle(const CogarchParams& p, const Matrix& b, double t) {
    Eigen::EigenSolver<Matrix> es(b);
    const auto& ev = es.eigenvalues();
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
        cplx a = 0.0, zk = 1.0, db = 0.0;
        for (int k = 0; k < p.p; ++k, zk *= ev(j)) a += p.alpha[static_cast<std::size_t>(k)] * zk;
        // b'(l_j) = prod_{i != j} (l_j - l_i)
        db = 1.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (i != j) db *= ev(j) - ev(i);
        acc += a * std::exp(ev(j) * t) / db;
    }
    return acc.real();
}

Spectrum spectrum_of(std::vector<cplx> v) {
    sort_spectrum(v);
    return Spectrum{v};
}

CogarchParams make(int p, int q, std::vector<double> alpha, std::vector<double> beta) {
    CogarchParams c;
    c.p = p;
    c.q = q;
    c.alpha0 = 1.0;
    c.alpha = std::move(alpha);
    c.beta = std::move(beta);
    return c;
}

}  // namespace

TEST_CASE("EX7 condition suite") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver d = ex7_driver();
    const ConditionReport st = check_stationarity(m, d);
    CHECK(st.entry(Norm::Two).satisfied);
    CHECK(st.entry(Norm::Two).rhs == doctest::Approx(0.4));
    CHECK(st.entry(Norm::Two).lhs == doctest::Approx(log_integral(d, m.kappa_of(Norm::Two))));
    const ConditionReport m1 = check_moment(m, d, 1);
    CHECK(m1.entry(Norm::Two).lhs == doctest::Approx(m.kappa_of(Norm::Two) * 1.48));
    CHECK(m1.entry(Norm::Two).margin == doctest::Approx(0.4 - 0.21493 * 1.48).epsilon(1e-3));
    CHECK(m1.verdict);
    const ConditionReport m2 = check_moment(m, d, 2);
    CHECK(m2.verdict);
    const double k = m.kappa_of(Norm::Two);
    CHECK(m2.entry(Norm::Two).lhs == doctest::Approx(2.0 * k * 1.48 + k * k * 2.0 * 3.0 * 0.74 * 0.74));
    CHECK(m2.entry(Norm::Two).rhs == doctest::Approx(0.8));
    const FourthMomentDisplay f = fourth_moment_display(m, d, Norm::Two);
    CHECK(f.lhs == doctest::Approx(k * k * moments(d).rho));
    CHECK(f.rhs == doctest::Approx(2.0 * (0.4 - k * 1.48)));
    CHECK(f.satisfied == (f.lhs < f.rhs));
    const PositivityVerdict pos = check_positivity(m);
    CHECK(pos.status == PositivityStatus::ProvenNonnegative);
    CHECK(pos.rule == PositivityRule::ConjugatePairing);
    CHECK(std::string(rule_id(pos.rule)) == "conjugate-real-pairing");
}

TEST_CASE("q = 1 conditions reduce to the scalar inequalities") {
    const CogarchParams p = make(1, 1, {0.6}, {1.3});
    const ModelMatrices m = build_model(p);
    const LevyDriver d{1.7, JumpDist::normal(0.5), 0.0};
    const DriverMoments dm = moments(d);
    const ConditionReport st = check_stationarity(m, d);
    for (const auto& e : st.entries) {
        CHECK(e.lhs == doctest::Approx(log_integral(d, 0.6)));
        CHECK(e.rhs == doctest::Approx(1.3));
    }
    CHECK(check_moment(m, d, 1).entry(Norm::One).lhs == doctest::Approx(0.6 * dm.mu));
    CHECK(check_moment(m, d, 1).entry(Norm::One).rhs == doctest::Approx(1.3));
    CHECK(check_moment(m, d, 2).entry(Norm::Inf).lhs == doctest::Approx(2.0 * 0.6 * dm.mu + 0.36 * dm.rho));
    CHECK(check_moment(m, d, 1).verdict == (0.6 * dm.mu < 1.3));
}

TEST_CASE("heavier driver violates the moment conditions") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver d{6.0, JumpDist::normal(0.74), 0.0};
    CHECK_FALSE(check_moment(m, d, 1).verdict);
    CHECK_FALSE(check_moment(m, d, 2).verdict);
}

TEST_CASE("kernel matches the residue formula") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int q = 1 + trial % 4;
        CogarchParams p = make(1 + trial % q, q, {}, {});
        for (int i = 0; i < p.p; ++i) p.alpha.push_back(0.3 + 0.4 * i);
        p.beta = cogarch::testing::monic_from_roots(cogarch::testing::random_stable_roots(q, rng));
        const ModelMatrices m = build_model(p);
        for (double t : {0.0, 0.3, 1.7, 6.0})
            CHECK(kernel(m, t) == doctest::Approx(kernel_oracle(p, m.B, t)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("conjugate pairing") {
    CHECK(conjugate_pairing_exists(spectrum_of({{-0.4, 0}, {-0.4, M_PI}, {-0.4, -M_PI}})));
    CHECK_FALSE(conjugate_pairing_exists(spectrum_of({{-1.0, 0}, {-0.4, M_PI}, {-0.4, -M_PI}})));
    CHECK_FALSE(conjugate_pairing_exists(spectrum_of({{-0.3, 0}, {-0.5, 1}, {-0.5, -1}, {-0.6, 2}, {-0.6, -2}})));
    CHECK(conjugate_pairing_exists(
        spectrum_of({{-0.3, 0}, {-0.35, 0}, {-0.5, 1}, {-0.5, -1}, {-0.6, 2}, {-0.6, -2}})));
    // greedy by largest real would strand the second pair
    CHECK(conjugate_pairing_exists(
        spectrum_of({{-0.1, 0}, {-0.55, 0}, {-0.2, 1}, {-0.2, -1}, {-0.6, 2}, {-0.6, -2}})));
}

TEST_CASE("order-2-2 criterion") {
    // eigenvalues -1, -2
    const ModelMatrices ok = build_model(make(2, 2, {1.0, 0.5}, {3.0, 2.0}));
    const PositivityVerdict v_ok = check_positivity(ok);
    CHECK(v_ok.status == PositivityStatus::ProvenNonnegative);
    CHECK(v_ok.rule == PositivityRule::TwoByTwo);
    // alpha_1 < -alpha_2 lambda_1 = 0.5 * 1
    const ModelMatrices bad = build_model(make(2, 2, {0.2, -0.5}, {3.0, 2.0}));
    CHECK(check_positivity(bad).status == PositivityStatus::ProvenViolated);
    // complex pair -1 +- 2i
    const CogarchParams cp = make(2, 2, {1.0, 0.2}, {2.0, 5.0});
    const ModelMatrices cx = build_model(cp);
    const PositivityVerdict v = check_positivity(cx);
    CHECK(v.status == PositivityStatus::ProvenViolated);
    REQUIRE(v.witness_t.has_value());
    CHECK(*v.witness_value < 0.0);
    CHECK(kernel_oracle(cp, cx.B, *v.witness_t) < 0.0);
}

TEST_CASE("no dominant real eigenvalue means a sign change") {
    // eigenvalues -0.2 +- i and -1
    const CogarchParams p = make(1, 3, {1.0}, cogarch::testing::monic_from_roots({{-0.2, 1}, {-0.2, -1}, {-1, 0}}));
    const ModelMatrices m = build_model(p);
    const PositivityVerdict v = check_positivity(m);
    CHECK(v.status == PositivityStatus::ProvenViolated);
    CHECK(v.rule == PositivityRule::NoDominantReal);
    REQUIRE(v.witness_t.has_value());
    CHECK(kernel_oracle(p, m.B, *v.witness_t) < 0.0);
}

TEST_CASE("root majorization for all-real spectra") {
    // eigenvalues -1, -2, -3; a(z) = (z + 1.5)(z + 4) has roots -1.5, -4
    const CogarchParams p = make(3, 3, {6.0, 5.5, 1.0}, cogarch::testing::monic_from_roots({{-1, 0}, {-2, 0}, {-3, 0}}));
    const PositivityVerdict v = check_positivity(build_model(p));
    CHECK(v.status == PositivityStatus::ProvenNonnegative);
    CHECK(v.rule == PositivityRule::RootMajorization);
}

TEST_CASE("positivity verdicts agree with a fine kernel scan") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> ad(-0.5, 1.5);
    int proven = 0, violated = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int q = 1 + trial % 4;
        CogarchParams p = make(1 + (trial / 4) % q, q, {}, {});
        for (int i = 0; i < p.p; ++i) p.alpha.push_back(i == 0 ? std::abs(ad(rng)) + 0.1 : ad(rng));
        p.beta = cogarch::testing::monic_from_roots(cogarch::testing::random_stable_roots(q, rng));
        ModelMatrices m;
        try {
            m = build_model(p);
        } catch (const Error&) {
            continue;
        }
        const PositivityVerdict v = check_positivity(m);
        const double horizon = 40.0 / std::abs(m.lambda);
        double lo = INFINITY;
        for (int i = 0; i <= 4000; ++i) lo = std::min(lo, kernel_oracle(p, m.B, horizon * i / 4000.0));
        if (v.status == PositivityStatus::ProvenNonnegative) {
            CHECK(lo >= -1e-9);
            ++proven;
        } else if (v.status == PositivityStatus::ProvenViolated) {
            REQUIRE(v.witness_t.has_value());
            CHECK(kernel_oracle(p, m.B, *v.witness_t) < 0.0);
            ++violated;
        }
    }
    CHECK(proven > 10);
    CHECK(violated > 10);
}

TEST_CASE("initial-state admissibility") {
    const ModelMatrices m = build_model(ex7_params());
    CHECK(check_initial_state(m, Vector::Zero(3), 100.0).ok);
    Vector bad = Vector::Zero(3);
    bad(0) = -5.0;
    const InitialStateCheck c = check_initial_state(m, bad, 100.0);
    CHECK_FALSE(c.ok);
    CHECK(c.infimum <= -5.0 + 1e-12);
    CHECK_THROWS_AS(check_initial_state(m, Vector::Zero(2), 10.0), Error);
}

TEST_CASE("positivity needs a stable B and alpha_1 > 0") {
    CogarchParams p = make(1, 1, {0.5}, {-0.5});
    CHECK_THROWS_AS(check_positivity(build_model(p)), Error);
}
