#include "levy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace cogarch {

namespace {

double double_factorial_odd(int m) {
    // (2m - 1)!!
    double out = 1.0;
    for (int i = 2 * m - 1; i > 1; i -= 2) out *= i;
    return out;
}

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

}  // namespace

double JumpDist::even_moment(int m) const {
    if (m == 0) return 1.0;
    switch (kind) {
        case JumpKind::Normal: return double_factorial_odd(m) * std::pow(param, m);
        case JumpKind::TwoPoint:
        case JumpKind::Constant: return std::pow(param, 2 * m);
    }
    return 0.0;
}

double JumpDist::mean() const { return kind == JumpKind::Constant ? param : 0.0; }

double JumpDist::sample(Rng& rng) const {
    switch (kind) {
        case JumpKind::Normal: return std::normal_distribution<double>(0.0, std::sqrt(param))(rng);
        case JumpKind::TwoPoint:
            return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -param : param;
        case JumpKind::Constant: return param;
    }
    return 0.0;
}

void LevyDriver::validate() const {
    require(std::isfinite(rate) && rate > 0.0, ErrorCode::Validation, "driver: rate must be > 0");
    require(std::isfinite(brownian_var) && brownian_var >= 0.0, ErrorCode::Validation,
            "driver: brownian_var must be >= 0");
    require(std::isfinite(jump.param), ErrorCode::Validation, "driver: jump parameter not finite");
    if (jump.kind == JumpKind::Normal)
        require(jump.param > 0.0, ErrorCode::Validation, "driver: Normal jump variance must be > 0");
    else
        require(jump.param != 0.0, ErrorCode::Validation, "driver: jump size must be nonzero");
}

DriverMoments moments(const LevyDriver& d) {
    d.validate();
    DriverMoments out;
    out.mu = d.rate * d.jump.even_moment(1);
    out.rho = d.rate * d.jump.even_moment(2);
    out.el1_sq = d.brownian_var + out.mu;
    return out;
}

double log_integral(const LevyDriver& d, double kappa) {
    d.validate();
    require(std::isfinite(kappa) && kappa >= 0.0, ErrorCode::InvalidArgument,
            "log_integral: kappa must be >= 0");
    if (kappa == 0.0) return 0.0;
    switch (d.jump.kind) {
        case JumpKind::TwoPoint:
        case JumpKind::Constant:
            return d.rate * std::log1p(kappa * d.jump.param * d.jump.param);
        case JumpKind::Normal: {
            const double k = kappa * d.jump.param;
            const double norm = std::sqrt(2.0 / M_PI);  // 2 * phi(0)
            auto f = [k, norm](double x) { return norm * std::log1p(k * x * x) * std::exp(-0.5 * x * x); };
            double err = 0.0;
            const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13, &err);
            return d.rate * val;
        }
    }
    return 0.0;
}

double power_integral(const LevyDriver& d, double kappa, int k) {
    d.validate();
    require(k >= 1, ErrorCode::InvalidArgument, "power_integral: k must be >= 1");
    require(std::isfinite(kappa) && kappa >= 0.0, ErrorCode::InvalidArgument,
            "power_integral: kappa must be >= 0");
    // (1 + kappa y^2)^k - 1 = sum_{j>=1} C(k,j) kappa^j y^{2j}
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += binomial(k, j) * std::pow(kappa, j) * d.jump.even_moment(j);
    return d.rate * acc;
}

std::vector<Jump> sample_jumps(const LevyDriver& d, double horizon, Rng& rng) {
    d.validate();
    require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::InvalidArgument,
            "sample_jumps: horizon must be > 0");
    std::vector<Jump> out;
    out.reserve(static_cast<std::size_t>(d.rate * horizon * 1.1) + 16);
    std::exponential_distribution<double> wait(d.rate);
    double t = 0.0;
    for (;;) {
        t += wait(rng);
        if (t > horizon) break;
        const double size = d.jump.sample(rng);
        out.push_back({t, size, size * size});
    }
    return out;
}

}  // namespace cogarch
