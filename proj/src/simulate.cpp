#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "errors.hpp"

namespace cogarch {

namespace {

// (exp(z t) - 1) / z, with the t-limit as z -> 0.
cplx phi1(cplx z, double t) {
    const cplx zt = z * t;
    if (std::abs(zt) < 1e-5) return t * (1.0 + zt / 2.0 + zt * zt / 6.0);
    return (std::exp(zt) - 1.0) / z;
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double normal_draw(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

Simulator::Simulator(const ModelMatrices& m, const LevyDriver& d) : m_(m), d_(d) {
    d_.validate();
    drift_ = d_.compensating_drift();
    if (m_.lambda < 0.0 && m_.params.alpha.front() > 0.0)
        proven_ = check_positivity(m_).status == PositivityStatus::ProvenNonnegative;
    spectral_ = m_.cond_S < 1e8;
    left_ = (m_.a.cast<cplx>().transpose() * m_.S).transpose();
}

Matrix Simulator::flow_matrix(double t) const {
    if (!spectral_) return mat_exp(m_.B, t);
    CVector ex(m_.q());
    for (int j = 0; j < m_.q(); ++j) ex(j) = std::exp(m_.spec[static_cast<std::size_t>(j)] * t);
    return (m_.S * ex.asDiagonal() * m_.S_inv).real();
}

Vector Simulator::flow(double t, const Vector& y) const {
    if (!spectral_) return mat_exp(m_.B, t) * y;
    CVector c = m_.S_inv * y.cast<cplx>();
    for (int j = 0; j < m_.q(); ++j) c(j) *= std::exp(m_.spec[static_cast<std::size_t>(j)] * t);
    return (m_.S * c).real();
}

double Simulator::integrated_v(double t, const Vector& y) const {
    double lin = 0.0;
    if (spectral_) {
        const CVector c = m_.S_inv * y.cast<cplx>();
        cplx s = 0.0;
        for (int j = 0; j < m_.q(); ++j) s += left_(j) * c(j) * phi1(m_.spec[static_cast<std::size_t>(j)], t);
        lin = s.real();
    } else {
        // exp([[B, y], [0, 0]] t) holds int_0^t exp(Bs) y ds in its last column.
        const int q = m_.q();
        Matrix aug = Matrix::Zero(q + 1, q + 1);
        aug.topLeftCorner(q, q) = m_.B;
        aug.topRightCorner(q, 1) = y;
        lin = m_.a.dot(mat_exp(aug, t).col(q).head(q));
    }
    return m_.params.alpha0 * t + lin;
}

double Simulator::integrated_sqrt_v(double t, const Vector& y) const {
    if (t <= 0.0) return 0.0;
    const double piece = 0.5 / std::max(1.0, operator_norm(m_.B, Norm::Inf));
    const int n = std::max(1, static_cast<int>(std::ceil(t / piece)));
    const double h = t / n;
    double total = 0.0;
    Vector ys = y;
    const Matrix step = flow_matrix(h);
    for (int k = 0; k < n; ++k) {
        auto f = [&](double s) { return std::sqrt(std::max(0.0, m_.params.alpha0 + m_.a.dot(flow(s, ys)))); };
        total += boost::math::quadrature::gauss<double, 8>::integrate(f, 0.0, h);
        ys = step * ys;
    }
    return total;
}

Vector Simulator::step_recurrence(const Vector& y, double wait, double z) const {
    require(y.size() == m_.q(), ErrorCode::InvalidArgument, "step_recurrence: state has the wrong length");
    require(std::isfinite(wait) && wait >= 0.0, ErrorCode::Domain, "step_recurrence: waiting time must be >= 0");
    require(std::isfinite(z) && z >= 0.0, ErrorCode::Domain, "step_recurrence: Z must be >= 0");
    Vector out = flow(wait, y);
    out += m_.e * (z * m_.a.dot(out) + m_.params.alpha0 * z);
    return out;
}

Vector Simulator::fixed_point_map(const Vector& y, Rng& rng) const {
    const double wait = std::exponential_distribution<double>(d_.rate)(rng);
    const double dl = d_.jump.sample(rng);
    const double z = dl * dl;
    Vector post = y + m_.e * (z * (m_.params.alpha0 + m_.a.dot(y)));
    return flow(wait, post);
}

Vector Simulator::stationary_init(Rng& rng, const StationaryOptions& opt) const {
    require(opt.tol > 0.0 && opt.max_terms > 0, ErrorCode::InvalidArgument, "stationary_init: bad options");
    const int q = m_.q();
    Matrix prod = Matrix::Identity(q, q);
    Vector acc = Vector::Zero(q);
    std::exponential_distribution<double> wait_dist(d_.rate);
    for (long i = 0; i < opt.max_terms; ++i) {
        const double wait = wait_dist(rng);
        const double dl = d_.jump.sample(rng);
        const double z = dl * dl;
        acc += (m_.params.alpha0 * z) * prod.col(q - 1);
        // prod <- prod (I + Z e a') exp(B T)
        Matrix c = flow_matrix(wait);
        c.row(q - 1) += z * (m_.a.transpose() * c);
        prod = prod * c;
        if (prod.norm() < opt.tol) {
            const double t_final = wait_dist(rng);
            return flow(t_final, acc);
        }
        if (!prod.allFinite()) break;
    }
    std::ostringstream os;
    os << "stationary_init: series did not reach tolerance " << opt.tol << " within " << opt.max_terms
       << " terms (stationarity margin too small?)";
    fail(ErrorCode::NonConvergence, os.str());
}

Matrix Simulator::sample_propagator(double t, Rng& rng) const {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::Domain, "sample_propagator: t must be >= 0");
    const int q = m_.q();
    Matrix j = Matrix::Identity(q, q);
    std::exponential_distribution<double> wait_dist(d_.rate);
    double s = 0.0;
    while (true) {
        const double wait = wait_dist(rng);
        if (s + wait > t) return flow_matrix(t - s) * j;
        const double dl = d_.jump.sample(rng);
        Matrix c = flow_matrix(wait);
        c.row(q - 1) += dl * dl * (m_.a.transpose() * c);
        j = c * j;
        s += wait;
    }
}

Vector Simulator::resolve_init(const InitSpec& init, Rng& rng, const StationaryOptions& opt) const {
    switch (init.kind) {
        case InitKind::Zero: return Vector::Zero(m_.q());
        case InitKind::Given: {
            require(init.y0.size() == m_.q(), ErrorCode::InvalidArgument, "init: y0 has the wrong length");
            require(init.y0.allFinite(), ErrorCode::InvalidArgument, "init: y0 not finite");
            const double t_max = m_.lambda < 0.0 ? 40.0 / std::abs(m_.lambda) : 100.0;
            const InitialStateCheck chk = check_initial_state(m_, init.y0, t_max);
            if (!chk.ok) {
                std::ostringstream os;
                os << "init: a'exp(Bt)y0 reaches " << chk.infimum << " < -alpha0";
                if (!init.override_check) fail(ErrorCode::Validation, os.str());
                warn(os.str() + " (override accepted)");
            }
            return init.y0;
        }
        case InitKind::Stationary: {
            const ConditionReport rep = check_stationarity(m_, d_);
            require(rep.verdict, ErrorCode::Validation,
                    "init: stationary start needs the " + rep.equation + " condition, which fails for every norm");
            return stationary_init(rng, opt);
        }
    }
    fail(ErrorCode::InvalidArgument, "init: unknown kind");
}

Simulator::Segment Simulator::advance(double delta, Vector& y, Rng& rng) const {
    Segment s;
    if (delta <= 0.0) return s;
    if (d_.brownian_var > 0.0) {
        const double iv = integrated_v(delta, y);
        s.dw = std::sqrt(d_.brownian_var * std::max(iv, 0.0)) * normal_draw(rng);
    }
    if (drift_ != 0.0) s.drift = drift_ * integrated_sqrt_v(delta, y);
    y = flow(delta, y);
    return s;
}

double Simulator::check_v(double v, double t, const Vector& y0, int& strict) const {
    if (v < 0.0 && proven_) {
        // An overridden inadmissible start explains negative values; otherwise it is a bug.
        if (strict < 0) {
            const double t_max = 40.0 / std::abs(m_.lambda);
            strict = check_initial_state(m_, y0, t_max).ok ? 1 : 0;
        }
        if (strict == 1) {
            std::ostringstream os;
            os << "negative volatility " << v << " at t=" << t << " although the kernel is proven nonnegative";
            fail(ErrorCode::Internal, os.str());
        }
    }
    return v;
}

void Simulator::run(double horizon, const Vector& y0, const JumpSource& next, Rng& rng, std::optional<double> dt,
                    Path* path, GridSample* grid, bool keep_state) const {
    require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::InvalidArgument, "simulate: horizon must be > 0");
    require(y0.size() == m_.q() && y0.allFinite(), ErrorCode::InvalidArgument, "simulate: bad initial state");
    long n_grid = -1;
    if (dt) {
        require(std::isfinite(*dt) && *dt > 0.0, ErrorCode::InvalidArgument, "simulate: grid step must be > 0");
        n_grid = static_cast<long>(std::floor(horizon / *dt * (1.0 + 1e-12)));
        grid->dt = *dt;
        grid->t.reserve(static_cast<std::size_t>(n_grid + 1));
        grid->v.reserve(static_cast<std::size_t>(n_grid + 1));
        grid->g.reserve(static_cast<std::size_t>(n_grid + 1));
    }
    const double alpha0 = m_.params.alpha0;
    auto record = [&](double t, double v, double g, const Vector& y) {
        grid->t.push_back(t);
        grid->v.push_back(v);
        grid->g.push_back(g);
        if (keep_state) grid->y.push_back(y);
    };

    if (path) {
        path->horizon = horizon;
        path->y0 = y0;
        path->bridge_seed = rng();
        path->min_v = std::numeric_limits<double>::infinity();
    }
    Vector y = y0;
    double t = 0.0;
    double g = 0.0;
    double cum_dw = 0.0;
    double cum_drift = 0.0;
    double last_time = 0.0;
    long k = 0;
    std::size_t negatives = 0;
    std::size_t n_events = 0;
    int strict = -1;  // unknown until a negative value shows up
    double min_v = std::numeric_limits<double>::infinity();
    Jump j{};
    bool have = next(j);
    while (true) {
        if (have) {
            require(j.time > last_time && std::isfinite(j.time), ErrorCode::InvalidArgument,
                    "simulate: jump times must be strictly increasing and positive");
            if (j.time > horizon) have = false;
        }
        const double target = have ? j.time : horizon;
        while (k <= n_grid && static_cast<double>(k) * *dt < target) {
            const double gt = static_cast<double>(k) * *dt;
            const Segment seg = advance(gt - t, y, rng);
            g += seg.dw + seg.drift;
            cum_dw += seg.dw;
            cum_drift += seg.drift;
            t = gt;
            record(t, alpha0 + m_.a.dot(y), g, y);
            ++k;
        }
        const Segment seg = advance(target - t, y, rng);
        g += seg.dw + seg.drift;
        cum_dw += seg.dw;
        cum_drift += seg.drift;
        t = target;
        if (!have) {
            while (k <= n_grid) {
                record(static_cast<double>(k) * *dt, alpha0 + m_.a.dot(y), g, y);
                ++k;
            }
            break;
        }
        const double v = check_v(alpha0 + m_.a.dot(y), t, y0, strict);
        if (v < 0.0) ++negatives;
        ++n_events;
        min_v = std::min(min_v, v);
        const double dg_jump = std::sqrt(std::max(v, 0.0)) * j.size;
        const Vector y_pre = y;
        y += m_.e * (v * j.squared);
        g += dg_jump;
        if (path) {
            Event ev;
            ev.time = t;
            ev.dl = j.size;
            ev.z = j.squared;
            ev.v = v;
            ev.dw = cum_dw;
            ev.drift = cum_drift;
            ev.dg = cum_dw + cum_drift + dg_jump;
            ev.g = g;
            ev.y_pre = y_pre;
            ev.y_post = y;
            path->events.push_back(std::move(ev));
            path->min_v = std::min(path->min_v, v);
        }
        cum_dw = 0.0;
        cum_drift = 0.0;
        if (k <= n_grid && static_cast<double>(k) * *dt == t) {
            record(t, v, g, y_pre);
            ++k;
        }
        last_time = t;
        have = next(j);
    }
    if (negatives > 0) {
        std::ostringstream os;
        os << "simulate: volatility went negative at " << negatives << " jump times"
           << (proven_ ? " (inadmissible initial state)" : " (kernel positivity not proven)");
        warn(os.str());
    }
    if (grid) {
        grid->events = n_events;
        grid->min_v_events = n_events ? min_v : alpha0 + m_.a.dot(y0);
    }
    if (path) {
        path->y_end = y;
        path->g_end = g;
        path->tail_dw = cum_dw;
        path->tail_drift = cum_drift;
        path->negative_v = negatives;
        if (path->events.empty()) path->min_v = alpha0 + m_.a.dot(y0);
    }
}

Path Simulator::simulate_path(double horizon, const Vector& y0, Rng& rng) const {
    double clock = 0.0;
    std::exponential_distribution<double> wait_dist(d_.rate);
    bool done = false;
    JumpSource next = [&](Jump& j) {
        if (done) return false;
        clock += wait_dist(rng);
        if (clock > horizon) {
            done = true;
            return false;
        }
        j.time = clock;
        j.size = d_.jump.sample(rng);
        j.squared = j.size * j.size;
        return true;
    };
    Path p;
    run(horizon, y0, next, rng, std::nullopt, &p, nullptr, false);
    return p;
}

Path Simulator::simulate_path(double horizon, const Vector& y0, const std::vector<Jump>& jumps, Rng& rng) const {
    std::size_t idx = 0;
    JumpSource next = [&](Jump& j) {
        if (idx >= jumps.size()) return false;
        j = jumps[idx++];
        return true;
    };
    Path p;
    run(horizon, y0, next, rng, std::nullopt, &p, nullptr, false);
    return p;
}

GridSample Simulator::simulate_grid(double horizon, double dt, const Vector& y0, Rng& rng, bool keep_state) const {
    double clock = 0.0;
    std::exponential_distribution<double> wait_dist(d_.rate);
    bool done = false;
    JumpSource next = [&](Jump& j) {
        if (done) return false;
        clock += wait_dist(rng);
        if (clock > horizon) {
            done = true;
            return false;
        }
        j.time = clock;
        j.size = d_.jump.sample(rng);
        j.squared = j.size * j.size;
        return true;
    };
    GridSample gs;
    run(horizon, y0, next, rng, dt, nullptr, &gs, keep_state);
    return gs;
}

GridSample Simulator::sample_grid(const Path& path, double dt, bool keep_state) const {
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "sample_grid: step must be > 0");
    require(path.y0.size() == m_.q(), ErrorCode::InvalidArgument, "sample_grid: path does not match the model");
    GridSample gs;
    gs.dt = dt;
    const long n_grid = static_cast<long>(std::floor(path.horizon / dt * (1.0 + 1e-12)));
    Rng bridge_rng = make_stream(path.bridge_seed, 0x6272696467ULL);
    const double alpha0 = m_.params.alpha0;
    long k = 0;

    // Grid points inside one inter-event interval starting at s from state ys.
    auto fill = [&](double s, const Vector& ys, double g_start, double end, double dw_total, bool inclusive) {
        const double u_total = d_.brownian_var > 0.0 ? integrated_v(end - s, ys) : 0.0;
        double u_prev = 0.0;
        double w_prev = 0.0;
        while (k <= n_grid) {
            const double gt = static_cast<double>(k) * dt;
            if (inclusive ? gt > end * (1.0 + 1e-12) : gt >= end) break;
            const double off = std::max(0.0, gt - s);
            const Vector y = flow(off, ys);
            double w = 0.0;
            if (d_.brownian_var > 0.0) {
                const double u = std::min(integrated_v(off, ys), u_total);
                const double span = u_total - u_prev;
                if (span > 0.0) {
                    const double frac = (u - u_prev) / span;
                    const double var = d_.brownian_var * (u - u_prev) * (u_total - u) / span;
                    w = w_prev + frac * (dw_total - w_prev) + std::sqrt(std::max(var, 0.0)) * normal_draw(bridge_rng);
                } else {
                    w = w_prev;
                }
                u_prev = u;
                w_prev = w;
            }
            const double drift = drift_ != 0.0 ? drift_ * integrated_sqrt_v(off, ys) : 0.0;
            gs.t.push_back(gt);
            gs.v.push_back(alpha0 + m_.a.dot(y));
            gs.g.push_back(g_start + w + drift);
            if (keep_state) gs.y.push_back(y);
            ++k;
        }
    };

    double s = 0.0;
    Vector ys = path.y0;
    double g_start = 0.0;
    for (const Event& ev : path.events) {
        fill(s, ys, g_start, ev.time, ev.dw, false);
        if (k <= n_grid && static_cast<double>(k) * dt == ev.time) {
            gs.t.push_back(ev.time);
            gs.v.push_back(ev.v);
            gs.g.push_back(ev.g);
            if (keep_state) gs.y.push_back(ev.y_pre);
            ++k;
        }
        s = ev.time;
        ys = ev.y_post;
        g_start = ev.g;
    }
    fill(s, ys, g_start, path.horizon, path.tail_dw, true);
    return gs;
}

std::vector<double> cogarch11_reference(double omega0, double omega1, double eta, const std::vector<Jump>& jumps,
                                        double sigma0_sq, const std::vector<double>& times) {
    require(omega0 > 0.0 && omega1 >= 0.0 && eta > 0.0 && sigma0_sq > 0.0, ErrorCode::InvalidArgument,
            "cogarch11_reference: need omega0 > 0, omega1 >= 0, eta > 0, sigma0^2 > 0");
    const double jump_coef = omega1 * std::exp(eta);
    const double log_omega0 = std::log(omega0);
    const double log_sigma0 = std::log(sigma0_sq);
    std::vector<double> out;
    out.reserve(times.size());
    double a = 0.0;   // current time
    double x = 0.0;   // X at a (right limit)
    double log_i = -std::numeric_limits<double>::infinity();  // log int_0^a exp(X_s) ds
    std::size_t idx = 0;
    // int_a^b exp(X_a + eta (s - a)) ds in log form
    auto add_piece = [&](double b) {
        const double len = b - a;
        if (len <= 0.0) return;
        log_i = log_add_exp(log_i, x + eta * len + std::log(-std::expm1(-eta * len) / eta));
        x += eta * len;
        a = b;
    };
    for (double tau : times) {
        require(tau >= a, ErrorCode::InvalidArgument, "cogarch11_reference: times must be nondecreasing");
        while (idx < jumps.size() && jumps[idx].time < tau) {
            add_piece(jumps[idx].time);
            x -= std::log1p(jump_coef * jumps[idx].squared);
            ++idx;
        }
        add_piece(tau);
        out.push_back(std::exp(log_add_exp(log_omega0 + log_i, log_sigma0) - x));
    }
    return out;
}

}  // namespace cogarch
