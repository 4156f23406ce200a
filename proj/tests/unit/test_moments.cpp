#include <cmath>
#include <random>

#include "doctest.h"
#include "errors.hpp"
#include "moments.hpp"
#include "support/random_models.hpp"

using namespace cogarch;
using cogarch::testing::ex7_driver;
using cogarch::testing::ex7_params;

namespace {

// Stationary first and second moments from the generator of (Y, [L,L]):
//   0 = B EY + mu e E V
//   0 = B M + M B' + mu (e E[V Y'] + E[Y V] e') + rho E[V^2] e e'
// with M = E YY'. The second equation is solved by applying the linear map
// to each basis matrix.
struct GeneratorMoments {
    Vector mean;
    Matrix second;
    Matrix cov;
};

GeneratorMoments generator_moments(const ModelMatrices& m, const LevyDriver& d) {
    const int q = m.q();
    const DriverMoments dm = moments(d);
    const double a0 = m.params.alpha0;
    const Matrix lhs1 = m.B + dm.mu * m.e * m.a.transpose();
    const Vector ey = lhs1.fullPivLu().solve(-a0 * dm.mu * m.e);
    auto apply = [&](const Matrix& mm) {
        const Vector eyv = a0 * ey + mm * m.a;  // E[Y V] for this M
        const double ev2 = a0 * a0 + 2.0 * a0 * m.a.dot(ey) + m.a.dot(mm * m.a);
        return Matrix(m.B * mm + mm * m.B.transpose() + dm.mu * (m.e * eyv.transpose() + eyv * m.e.transpose()) +
                      dm.rho * ev2 * m.e * m.e.transpose());
    };
    const Matrix base = apply(Matrix::Zero(q, q));
    Matrix op(q * q, q * q);
    for (int k = 0; k < q * q; ++k) {
        Matrix basis = Matrix::Zero(q, q);
        basis(k % q, k / q) = 1.0;
        const Matrix col = apply(basis) - base;
        op.col(k) = Eigen::Map<const Vector>(col.data(), q * q);
    }
    const Vector sol = op.fullPivLu().solve(-Eigen::Map<const Vector>(base.data(), q * q));
    GeneratorMoments g;
    g.mean = ey;
    g.second = Eigen::Map<const Matrix>(sol.data(), q, q);
    g.cov = g.second - ey * ey.transpose();
    return g;
}

}  // namespace

TEST_CASE("EX7 stationary moments") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver d = ex7_driver();
    const double bq = ex7_params().beta[2];
    const VMoments v = stationary_v_moments(m, d);
    CHECK(v.mean == doctest::Approx(bq / (bq - 1.48)).epsilon(1e-12));
    const GeneratorMoments g = generator_moments(m, d);
    CHECK((mean_state(m, d) - g.mean).norm() < 1e-12);
    CHECK((cov_state(m, d) - g.cov).norm() < 1e-10 * g.cov.norm());
    CHECK(v.var == doctest::Approx(m.a.dot(g.cov * m.a)).epsilon(1e-10));
    const double mv = m_value(m, d);
    CHECK(mv > 0.0);
    CHECK(mv < 1.0);
    CHECK(psi_mean(m, d) == doctest::Approx(v.mean / m.params.alpha0 - 1.0));
    CHECK(fixed_point_mean_residual(m, d) < 1e-12);
}

TEST_CASE("COGARCH(1,1) moments in closed form") {
    const double a0 = 0.4, a1 = 0.5, b = 1.6;
    CogarchParams p;
    p.alpha0 = a0;
    p.alpha = {a1};
    p.beta = {b};
    const ModelMatrices m = build_model(p);
    const LevyDriver d{1.2, JumpDist::normal(0.5), 0.0};
    const DriverMoments dm = moments(d);
    const double ey = a0 * dm.mu / (b - a1 * dm.mu);
    // 0 = -2b EY^2 + 2 mu E[YV] + rho E[V^2]
    const double c2 = -2.0 * b + 2.0 * dm.mu * a1 + dm.rho * a1 * a1;
    const double c0 = 2.0 * dm.mu * a0 * ey + dm.rho * (a0 * a0 + 2.0 * a0 * a1 * ey);
    const double ey2 = -c0 / c2;
    const double var_y = ey2 - ey * ey;
    CHECK(mean_state(m, d)(0) == doctest::Approx(ey).epsilon(1e-12));
    CHECK(cov_state(m, d)(0, 0) == doctest::Approx(var_y).epsilon(1e-10));
    CHECK(stationary_v_moments(m, d).var == doctest::Approx(a1 * a1 * var_y).epsilon(1e-10));
    // exponential decay of the autocovariance at rate b - a1 mu
    const double rate = b - a1 * dm.mu;
    for (double h : {0.5, 2.0})
        CHECK(acvf_v(m, d, h) == doctest::Approx(a1 * a1 * var_y * std::exp(-rate * h)).epsilon(1e-10));
}

TEST_CASE("random admissible models: both covariance routes and the generator agree") {
    std::mt19937_64 rng(41);
    int done = 0;
    while (done < 60) {
        const auto rc = cogarch::testing::random_admissible(rng, 4, 2);
        if (!rc) continue;
        const CovRoutes r = cov_state_routes(rc->model, rc->driver);
        CHECK(r.rel_diff < 1e-8);
        const GeneratorMoments g = generator_moments(rc->model, rc->driver);
        CHECK((r.kronecker - g.cov).norm() <= 1e-8 * std::max(1.0, g.cov.norm()));
        CHECK((mean_state(rc->model, rc->driver) - g.mean).norm() <= 1e-10 * std::max(1.0, g.mean.norm()));
        const double mv = m_value(rc->model, rc->driver);
        CHECK(mv >= 0.0);
        CHECK(mv < 1.0);
        ++done;
    }
    take_warnings();
}

TEST_CASE("volatility autocovariance routes") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver d = ex7_driver();
    const Matrix cov = cov_state(m, d);
    const Matrix bt = mean_corrected(m, 1.48).B_tilde;
    const auto spec = acvf_spectral(m, d);
    REQUIRE(spec.has_value());
    for (double h : {0.0, 0.5, 1.0, 2.0, 10.0, 40.0}) {
        const double want = m.a.dot(mat_exp(bt, h) * cov * m.a);
        CHECK(acvf_v(m, d, h, AcvfRoute::Matrix) == doctest::Approx(want).epsilon(1e-10).scale(1e-3));
        CHECK((*spec)(h) == doctest::Approx(want).epsilon(1e-9).scale(1e-3));
    }
    const AcvfTable t = acvf_v_table(m, d, {0.0, 1.0, 2.0});
    CHECK(t.matrix[0] == doctest::Approx(stationary_v_moments(m, d).var));
    CHECK(t.spectral.size() == 3);
    // period close to 2: lag 1 correlation below lag 2 correlation
    CHECK(t.matrix[1] < t.matrix[2]);
}

TEST_CASE("increment moments and the H_r operator") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver d{2.0, JumpDist::normal(0.74), 0.2};
    const double ev = stationary_v_moments(m, d).mean;
    for (double r : {0.5, 1.0, 3.0}) {
        const IncrementMoments im = increment_moments(m, d, r);
        CHECK(im.mean == 0.0);
        CHECK(im.variance == doctest::Approx(r * moments(d).el1_sq * ev).epsilon(1e-12));
    }
    // B~^{-1}(I - exp(-B~ r)) = int_0^r exp(-B~ s) ds by Simpson
    const Matrix bt = mean_corrected(m, moments(d).mu).B_tilde;
    const double r = 1.0;
    const int n = 2000;
    Matrix acc = Matrix::Zero(3, 3);
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * mat_exp(bt, -r * i / n);
    }
    acc *= (r / n) / 3.0 * moments(d).el1_sq;
    CHECK((hr_operator(m, d, r) - acc).norm() < 1e-10);
    Vector hr(3);
    hr << 0.1, -0.2, 0.3;
    CHECK(sq_increment_acvf(m, d, 1.0, 2.5, hr) == doctest::Approx(m.a.dot(mat_exp(bt, 2.5) * hr)).epsilon(1e-12));
    CHECK_THROWS_AS(sq_increment_acvf(m, d, 1.0, 0.5, hr), Error);
}

TEST_CASE("mean flow equals E exp(BT) for exponential T") {
    const ModelMatrices m = build_model(ex7_params());
    const double c = 2.0;
    const double top = 30.0;
    const int n = 60000;
    Matrix acc = Matrix::Zero(3, 3);
    for (int i = 0; i <= n; ++i) {
        const double t = top * i / n;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * c * std::exp(-c * t) * mat_exp(m.B, t);
    }
    acc *= (top / n) / 3.0;
    CHECK((mean_flow(m, c) - acc).norm() < 1e-9);
}

TEST_CASE("moment prerequisites are enforced") {
    const ModelMatrices m = build_model(ex7_params());
    const LevyDriver heavy{6.0, JumpDist::normal(0.74), 0.0};
    try {
        cov_state(m, heavy);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Validation);
        CHECK(std::string(e.what()).find("second-moment") != std::string::npos);
    }
    CHECK_THROWS_AS(mean_state(m, heavy), Error);
    CHECK_THROWS_AS(stationary_v_moments(m, heavy), Error);

    // complex pair only: kernel not nonnegative, increments refused
    CogarchParams p;
    p.p = p.q = 2;
    p.alpha0 = 0.5;
    p.alpha = {1.0, 0.2};
    p.beta = {2.0, 5.0};
    const ModelMatrices cx = build_model(p);
    const LevyDriver light{0.5, JumpDist::normal(0.3), 0.0};
    CHECK_THROWS_AS(increment_moments(cx, light, 1.0), Error);
}
