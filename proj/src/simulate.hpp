#pragma once

// Exact event-driven simulation of (Y, V, G) for compound-Poisson drivers
// with an optional Brownian part.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "conditions.hpp"
#include "levy.hpp"
#include "model.hpp"
#include "random.hpp"

namespace cogarch {

struct Event {
    double time = 0.0;
    double dl = 0.0;   // jump of L
    double z = 0.0;    // dl^2
    double v = 0.0;    // left limit alpha0 + a'Y_pre
    double dg = 0.0;   // increment of G over (previous event, time]
    double g = 0.0;    // G at time (after the jump)
    double dw = 0.0;   // Brownian part of dg
    double drift = 0.0;  // compensator part of dg
    Vector y_pre;
    Vector y_post;
};

struct Path {
    double horizon = 0.0;
    Vector y0;
    std::vector<Event> events;
    Vector y_end;          // state at the horizon
    double g_end = 0.0;    // G at the horizon
    double tail_dw = 0.0;  // Brownian and compensator parts over (last event, horizon]
    double tail_drift = 0.0;
    std::uint64_t bridge_seed = 0;  // drives Brownian bridges in sample_grid
    std::size_t negative_v = 0;     // events with V < 0 (only possible without a positivity proof)
    double min_v = 0.0;             // over event left limits
};

struct GridSample {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> v;  // left limits
    std::vector<double> g;
    std::vector<Vector> y;  // left limits; empty unless requested
    double min_v_events = 0.0;  // minimum left limit over jump times (simulate_grid only)
    std::size_t events = 0;
};

enum class InitKind { Zero, Given, Stationary };

struct InitSpec {
    InitKind kind = InitKind::Zero;
    Vector y0;
    bool override_check = false;  // skip the initial-state admissibility check for Given
};

struct StationaryOptions {
    double tol = 1e-10;
    long max_terms = 1000000;
};

class Simulator {
public:
    Simulator(const ModelMatrices& m, const LevyDriver& d);

    const ModelMatrices& model() const { return m_; }
    const LevyDriver& driver() const { return d_; }
    bool positivity_proven() const { return proven_; }
    // True when the flow is evaluated through the eigendecomposition.
    bool spectral_flow() const { return spectral_; }

    Matrix flow_matrix(double t) const;  // exp(B t)
    Vector flow(double t, const Vector& y) const;
    // int_0^t (alpha0 + a' exp(Bs) y) ds
    double integrated_v(double t, const Vector& y) const;
    // int_0^t sqrt(max(V_s, 0)) ds by composite Gauss-Legendre
    double integrated_sqrt_v(double t, const Vector& y) const;

    // (I + Z e a') exp(B T) y + alpha0 Z e
    Vector step_recurrence(const Vector& y, double wait, double z) const;
    // exp(B T)(I + Z e a') y + alpha0 Z exp(B T) e with fresh (T, Z): the
    // jump-then-flow map whose fixed point is the stationary law.
    Vector fixed_point_map(const Vector& y, Rng& rng) const;
    Vector stationary_init(Rng& rng, const StationaryOptions& opt = {}) const;
    // Linear part J_{0,t} of the affine recurrence.
    Matrix sample_propagator(double t, Rng& rng) const;

    Vector resolve_init(const InitSpec& init, Rng& rng, const StationaryOptions& opt = {}) const;

    Path simulate_path(double horizon, const Vector& y0, Rng& rng) const;
    // Prescribed jumps (times in (0, horizon], increasing); rng drives Brownian draws only.
    Path simulate_path(double horizon, const Vector& y0, const std::vector<Jump>& jumps, Rng& rng) const;

    // Streams a path straight onto a grid without storing events.
    GridSample simulate_grid(double horizon, double dt, const Vector& y0, Rng& rng, bool keep_state = false) const;

    GridSample sample_grid(const Path& path, double dt, bool keep_state = false) const;

private:
    using JumpSource = std::function<bool(Jump&)>;
    struct Segment {
        double dw = 0.0;
        double drift = 0.0;
    };
    Segment advance(double delta, Vector& y, Rng& rng) const;
    double check_v(double v, double t, const Vector& y0, int& strict) const;
    void run(double horizon, const Vector& y0, const JumpSource& next, Rng& rng, std::optional<double> dt,
             Path* path, GridSample* grid, bool keep_state) const;

    ModelMatrices m_;
    LevyDriver d_;
    double drift_ = 0.0;
    bool proven_ = false;
    bool spectral_ = false;
    CVector left_;  // a' S
};

// sigma^2 at each requested time (left limits) from the explicit
// COGARCH(1,1) representation with omega0, omega1, eta; times must be
// nondecreasing and within [0, horizon].
std::vector<double> cogarch11_reference(double omega0, double omega1, double eta, const std::vector<Jump>& jumps,
                                        double sigma0_sq, const std::vector<double>& times);

}  // namespace cogarch
