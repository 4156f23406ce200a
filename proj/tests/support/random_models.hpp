#pragma once

// Random model generators shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "conditions.hpp"
#include "errors.hpp"
#include "levy.hpp"
#include "model.hpp"

namespace cogarch::testing {

inline CogarchParams ex7_params() {
    const double pi2 = M_PI * M_PI;
    CogarchParams p;
    p.p = 1;
    p.q = 3;
    p.alpha0 = 1.0;
    p.alpha = {1.0};
    p.beta = {1.2, 0.48 + pi2, 0.064 + 0.4 * pi2};
    return p;
}

inline LevyDriver ex7_driver() { return LevyDriver{2.0, JumpDist::normal(0.74), 0.0}; }

// Real coefficients of prod (z - r_i), highest power dropped (monic).
inline std::vector<double> monic_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (const cplx& r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = next;
    }
    std::vector<double> out;
    for (std::size_t i = 1; i < c.size(); ++i) out.push_back(c[i].real());
    return out;
}

// Left-half-plane spectrum of size q with random real roots and conjugate pairs.
inline std::vector<cplx> random_stable_roots(int q, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(0.2, 2.5), im(0.3, 3.0), coin(0.0, 1.0);
    std::vector<cplx> roots;
    while (static_cast<int>(roots.size()) < q) {
        if (q - static_cast<int>(roots.size()) >= 2 && coin(rng) < 0.5) {
            const double a = -re(rng), b = im(rng);
            roots.emplace_back(a, b);
            roots.emplace_back(a, -b);
        } else {
            roots.emplace_back(-re(rng), 0.0);
        }
    }
    return roots;
}

struct RandomCase {
    CogarchParams params;
    LevyDriver driver;
    ModelMatrices model;
};

// Random (p, q) model whose driver is thinned until the moment condition of
// order k holds. Models that cannot be built (ill-conditioned, clustered
// roots) come back empty.
inline std::optional<RandomCase> random_admissible(std::mt19937_64& rng, int max_q, int k) {
    std::uniform_int_distribution<int> qd(1, max_q);
    std::uniform_real_distribution<double> ad(0.1, 1.5), var(0.2, 1.0), rate(0.5, 2.0);
    RandomCase rc;
    rc.params.q = qd(rng);
    rc.params.p = std::uniform_int_distribution<int>(1, rc.params.q)(rng);
    rc.params.alpha0 = ad(rng);
    for (int i = 0; i < rc.params.p; ++i) rc.params.alpha.push_back(ad(rng));
    rc.params.beta = monic_from_roots(random_stable_roots(rc.params.q, rng));
    rc.driver = LevyDriver{rate(rng), JumpDist::normal(var(rng)), 0.0};
    try {
        rc.model = build_model(rc.params);
        for (int tries = 0; tries < 60; ++tries) {
            if (check_moment(rc.model, rc.driver, k).verdict) return rc;
            rc.driver.rate *= 0.6;
        }
    } catch (const Error&) {
    }
    return std::nullopt;
}

}  // namespace cogarch::testing
