#include "cogarch/cogarch.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "errors.hpp"
#include "levy.hpp"
#include "model.hpp"
#include "moments.hpp"
#include "montecarlo.hpp"
#include "simulate.hpp"
#include "stats.hpp"

using namespace cogarch;

struct cogarch_model {
    ModelMatrices m;
};

struct cogarch_driver {
    LevyDriver d;
};

struct cogarch_path {
    std::shared_ptr<const Simulator> sim;
    Path path;
};

struct cogarch_grid {
    GridSample grid;
};

namespace {

thread_local std::string last_error;
thread_local std::vector<std::string> warnings;

void drain_warnings() {
    for (auto& w : take_warnings()) warnings.push_back(std::move(w));
}

cogarch_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return COGARCH_E_INVALID_ARGUMENT;
        case ErrorCode::Validation: return COGARCH_E_VALIDATION;
        case ErrorCode::DegenerateSpectrum: return COGARCH_E_DEGENERATE_SPECTRUM;
        case ErrorCode::IllConditioned: return COGARCH_E_ILL_CONDITIONED;
        case ErrorCode::Singular: return COGARCH_E_SINGULAR;
        case ErrorCode::NotApplicable: return COGARCH_E_NOT_APPLICABLE;
        case ErrorCode::NonConvergence: return COGARCH_E_NON_CONVERGENCE;
        case ErrorCode::Overflow: return COGARCH_E_OVERFLOW;
        case ErrorCode::Domain: return COGARCH_E_DOMAIN;
        case ErrorCode::Internal: return COGARCH_E_INTERNAL;
    }
    return COGARCH_E_INTERNAL;
}

template <typename F>
cogarch_status guard(F&& body) {
    cogarch_status st = COGARCH_OK;
    try {
        body();
        last_error.clear();
    } catch (const Error& e) {
        last_error = e.what();
        st = to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        st = COGARCH_E_ALLOC;
    } catch (const std::exception& e) {
        last_error = e.what();
        st = COGARCH_E_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        st = COGARCH_E_INTERNAL;
    }
    drain_warnings();
    return st;
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

Vector in_vec(const double* p, int n, const char* what) {
    need(p, what);
    return Eigen::Map<const Vector>(p, n);
}

void out_mat(const Matrix& a, double* out) { Eigen::Map<Matrix>(out, a.rows(), a.cols()) = a; }

Norm to_norm(cogarch_norm r) {
    switch (r) {
        case COGARCH_NORM_1: return Norm::One;
        case COGARCH_NORM_2: return Norm::Two;
        case COGARCH_NORM_INF: return Norm::Inf;
    }
    fail(ErrorCode::InvalidArgument, "unknown norm");
}

void fill_report(const ConditionReport& rep, cogarch_condition_report* out) {
    std::memset(out, 0, sizeof(*out));
    std::strncpy(out->rule, rep.equation.c_str(), sizeof(out->rule) - 1);
    for (std::size_t i = 0; i < 3; ++i) {
        const ConditionEntry& e = rep.entries[i];
        out->entries[i] = {static_cast<cogarch_norm>(i), e.kappa, e.lhs, e.rhs, e.margin, e.satisfied ? 1 : 0};
    }
    out->verdict = rep.verdict ? 1 : 0;
}

void write_spectrum(const Spectrum& s, double* re, double* im) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        re[i] = s[i].real();
        im[i] = s[i].imag();
    }
}

Vector resolve(const Simulator& sim, const cogarch_init* init, Rng& rng) {
    InitSpec spec;
    if (init) {
        switch (init->kind) {
            case COGARCH_INIT_ZERO: spec.kind = InitKind::Zero; break;
            case COGARCH_INIT_GIVEN:
                spec.kind = InitKind::Given;
                spec.y0 = in_vec(init->y0, sim.model().q(), "init.y0");
                break;
            case COGARCH_INIT_STATIONARY: spec.kind = InitKind::Stationary; break;
            default: fail(ErrorCode::InvalidArgument, "unknown init kind");
        }
        spec.override_check = init->override_check != 0;
    }
    return sim.resolve_init(spec, rng);
}

}  // namespace

extern "C" {

const char* cogarch_version(void) { return "0.1.0"; }

const char* cogarch_last_error(void) { return last_error.c_str(); }

const char* cogarch_status_name(cogarch_status status) {
    switch (status) {
        case COGARCH_OK: return "ok";
        case COGARCH_E_INVALID_ARGUMENT: return "invalid-argument";
        case COGARCH_E_VALIDATION: return "validation";
        case COGARCH_E_DEGENERATE_SPECTRUM: return "degenerate-spectrum";
        case COGARCH_E_ILL_CONDITIONED: return "ill-conditioned";
        case COGARCH_E_SINGULAR: return "singular";
        case COGARCH_E_NOT_APPLICABLE: return "not-applicable";
        case COGARCH_E_NON_CONVERGENCE: return "non-convergence";
        case COGARCH_E_OVERFLOW: return "overflow";
        case COGARCH_E_DOMAIN: return "domain";
        case COGARCH_E_INTERNAL: return "internal";
        case COGARCH_E_ALLOC: return "alloc";
    }
    return "unknown";
}

size_t cogarch_warning_count(void) { return warnings.size(); }

const char* cogarch_warning(size_t index) { return index < warnings.size() ? warnings[index].c_str() : nullptr; }

void cogarch_clear_warnings(void) { warnings.clear(); }

cogarch_status cogarch_model_create(int p, int q, double alpha0, const double* alpha, const double* beta,
                                    cogarch_model** out) {
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        need(alpha, "alpha");
        need(beta, "beta");
        require(p >= 1 && q >= 1 && q <= kMaxOrder, ErrorCode::Validation, "model: order out of range");
        CogarchParams prm;
        prm.p = p;
        prm.q = q;
        prm.alpha0 = alpha0;
        prm.alpha.assign(alpha, alpha + p);
        prm.beta.assign(beta, beta + q);
        *out = new cogarch_model{build_model(prm)};
    });
}

void cogarch_model_destroy(cogarch_model* model) { delete model; }

int cogarch_model_q(const cogarch_model* model) { return model ? model->m.q() : 0; }

cogarch_status cogarch_model_eigenvalues(const cogarch_model* model, double* re, double* im) {
    return guard([&] {
        need(model, "model");
        need(re, "re");
        need(im, "im");
        write_spectrum(model->m.spec, re, im);
    });
}

cogarch_status cogarch_model_lambda(const cogarch_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = model->m.lambda;
    });
}

cogarch_status cogarch_model_kappa(const cogarch_model* model, cogarch_norm r, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = model->m.kappa_of(to_norm(r));
    });
}

cogarch_status cogarch_model_cond_s(const cogarch_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = model->m.cond_S;
    });
}

cogarch_status cogarch_model_b_matrix(const cogarch_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        out_mat(model->m.B, out);
    });
}

cogarch_status cogarch_mean_corrected_eigenvalues(const cogarch_model* model, double mu, double* re, double* im,
                                                  int* distinct) {
    return guard([&] {
        need(model, "model");
        need(re, "re");
        need(im, "im");
        const MeanCorrectedMatrices mc = mean_corrected(model->m, mu);
        write_spectrum(mc.spec, re, im);
        if (distinct) *distinct = mc.distinct ? 1 : 0;
    });
}

cogarch_status cogarch_kernel(const cogarch_model* model, double t, double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = kernel(model->m, t);
    });
}

cogarch_status cogarch_driver_create(double rate, cogarch_jump_kind kind, double param, double brownian_var,
                                     cogarch_driver** out) {
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        LevyDriver d;
        d.rate = rate;
        d.brownian_var = brownian_var;
        switch (kind) {
            case COGARCH_JUMP_NORMAL: d.jump = JumpDist::normal(param); break;
            case COGARCH_JUMP_TWO_POINT: d.jump = JumpDist::two_point(param); break;
            case COGARCH_JUMP_CONSTANT: d.jump = JumpDist::constant(param); break;
            default: fail(ErrorCode::InvalidArgument, "unknown jump kind");
        }
        d.validate();
        *out = new cogarch_driver{d};
    });
}

void cogarch_driver_destroy(cogarch_driver* driver) { delete driver; }

cogarch_status cogarch_driver_get_moments(const cogarch_driver* driver, cogarch_driver_moments* out) {
    return guard([&] {
        need(driver, "driver");
        need(out, "out");
        const DriverMoments m = moments(driver->d);
        *out = {m.mu, m.rho, m.el1_sq};
    });
}

cogarch_status cogarch_log_integral(const cogarch_driver* driver, double kappa, double* out) {
    return guard([&] {
        need(driver, "driver");
        need(out, "out");
        *out = log_integral(driver->d, kappa);
    });
}

cogarch_status cogarch_power_integral(const cogarch_driver* driver, double kappa, int k, double* out) {
    return guard([&] {
        need(driver, "driver");
        need(out, "out");
        *out = power_integral(driver->d, kappa, k);
    });
}

cogarch_status cogarch_check_stationarity(const cogarch_model* model, const cogarch_driver* driver,
                                          cogarch_condition_report* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        fill_report(check_stationarity(model->m, driver->d), out);
    });
}

cogarch_status cogarch_check_moment(const cogarch_model* model, const cogarch_driver* driver, int k,
                                    cogarch_condition_report* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        fill_report(check_moment(model->m, driver->d, k), out);
    });
}

cogarch_status cogarch_check_positivity(const cogarch_model* model, cogarch_positivity* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        const PositivityVerdict v = check_positivity(model->m);
        std::memset(out, 0, sizeof(*out));
        out->status = static_cast<cogarch_positivity_status>(v.status);
        std::strncpy(out->rule, rule_id(v.rule), sizeof(out->rule) - 1);
        if (v.witness_t) {
            out->has_witness = 1;
            out->witness_t = *v.witness_t;
            out->witness_value = v.witness_value.value_or(0.0);
        }
        if (v.grid) {
            out->has_grid = 1;
            out->grid_step = v.grid->step;
            out->grid_horizon = v.grid->horizon;
            out->grid_min = v.grid->min_value;
            out->grid_argmin = v.grid->argmin;
            out->grid_nonnegative = v.grid->nonnegative ? 1 : 0;
            out->tail_nonnegative = v.grid->tail_nonnegative ? 1 : 0;
        }
    });
}

cogarch_status cogarch_check_initial_state(const cogarch_model* model, const double* y0, double t_max, int* ok,
                                           double* infimum) {
    return guard([&] {
        need(model, "model");
        need(ok, "ok");
        const InitialStateCheck c = check_initial_state(model->m, in_vec(y0, model->m.q(), "y0"), t_max);
        *ok = c.ok ? 1 : 0;
        if (infimum) *infimum = c.infimum;
    });
}

cogarch_status cogarch_mean_state(const cogarch_model* model, const cogarch_driver* driver, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        out_mat(mean_state(model->m, driver->d), out);
    });
}

cogarch_status cogarch_cov_state(const cogarch_model* model, const cogarch_driver* driver, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        out_mat(cov_state(model->m, driver->d), out);
    });
}

cogarch_status cogarch_cov_state_routes(const cogarch_model* model, const cogarch_driver* driver, double* kronecker,
                                        double* gramian, double* rel_diff) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        const CovRoutes r = cov_state_routes(model->m, driver->d);
        if (kronecker) out_mat(r.kronecker, kronecker);
        if (gramian) out_mat(r.gramian, gramian);
        if (rel_diff) *rel_diff = r.rel_diff;
    });
}

cogarch_status cogarch_m_value(const cogarch_model* model, const cogarch_driver* driver, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = m_value(model->m, driver->d);
    });
}

cogarch_status cogarch_v_moments(const cogarch_model* model, const cogarch_driver* driver, double* mean, double* var) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        const VMoments v = stationary_v_moments(model->m, driver->d);
        if (mean) *mean = v.mean;
        if (var) *var = v.var;
    });
}

cogarch_status cogarch_psi_mean(const cogarch_model* model, const cogarch_driver* driver, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = psi_mean(model->m, driver->d);
    });
}

cogarch_status cogarch_acvf_v(const cogarch_model* model, const cogarch_driver* driver, double h,
                              cogarch_acvf_route route, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = acvf_v(model->m, driver->d, h, route == COGARCH_ACVF_SPECTRAL ? AcvfRoute::Spectral : AcvfRoute::Matrix);
    });
}

cogarch_status cogarch_acvf_v_table(const cogarch_model* model, const cogarch_driver* driver, const double* lags,
                                    size_t n, double* matrix_out, double* spectral_out, int* spectral_available) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(lags, "lags");
        need(matrix_out, "matrix_out");
        const AcvfTable t = acvf_v_table(model->m, driver->d, std::vector<double>(lags, lags + n));
        std::copy(t.matrix.begin(), t.matrix.end(), matrix_out);
        if (spectral_out && !t.spectral.empty()) std::copy(t.spectral.begin(), t.spectral.end(), spectral_out);
        if (spectral_available) *spectral_available = t.spectral.empty() ? 0 : 1;
    });
}

cogarch_status cogarch_increment_moments(const cogarch_model* model, const cogarch_driver* driver, double r,
                                         double* mean, double* variance) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        const IncrementMoments im = increment_moments(model->m, driver->d, r);
        if (mean) *mean = im.mean;
        if (variance) *variance = im.variance;
    });
}

cogarch_status cogarch_sq_increment_acvf(const cogarch_model* model, const cogarch_driver* driver, double r, double h,
                                         const double* hr, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = sq_increment_acvf(model->m, driver->d, r, h, in_vec(hr, model->m.q(), "hr"));
    });
}

cogarch_status cogarch_estimate_hr(const cogarch_model* model, const cogarch_driver* driver, double r, size_t n_paths,
                                   uint64_t seed, double* hr, double* hr_se) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(hr, "hr");
        const Simulator sim(model->m, driver->d);
        const HrEstimate est = estimate_hr(sim, r, n_paths, seed);
        out_mat(est.hr, hr);
        if (hr_se) out_mat(est.hr_se, hr_se);
    });
}

cogarch_status cogarch_fixed_point_mean_residual(const cogarch_model* model, const cogarch_driver* driver,
                                                 double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = fixed_point_mean_residual(model->m, driver->d);
    });
}

cogarch_status cogarch_propagator_mean(const cogarch_model* model, const cogarch_driver* driver, double t, size_t n,
                                       uint64_t seed, double* mean, double* se) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(mean, "mean");
        const Simulator sim(model->m, driver->d);
        const MatrixEstimate est = propagator_mean(sim, t, n, seed);
        out_mat(est.mean, mean);
        if (se) out_mat(est.se, se);
    });
}

cogarch_status cogarch_simulate(const cogarch_model* model, const cogarch_driver* driver, double horizon,
                                const cogarch_init* init, uint64_t seed, cogarch_path** out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = nullptr;
        auto sim = std::make_shared<const Simulator>(model->m, driver->d);
        Rng rng = make_stream(seed, 0);
        const Vector y0 = resolve(*sim, init, rng);
        auto p = std::make_unique<cogarch_path>();
        p->path = sim->simulate_path(horizon, y0, rng);
        p->sim = std::move(sim);
        *out = p.release();
    });
}

void cogarch_path_destroy(cogarch_path* path) { delete path; }

size_t cogarch_path_event_count(const cogarch_path* path) { return path ? path->path.events.size() : 0; }

cogarch_status cogarch_path_events(const cogarch_path* path, size_t first, cogarch_event* out, size_t cap,
                                   size_t* written) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        const auto& ev = path->path.events;
        size_t n = 0;
        for (size_t i = first; i < ev.size() && n < cap; ++i, ++n)
            out[n] = {ev[i].time, ev[i].dl, ev[i].z, ev[i].v, ev[i].dg, ev[i].g};
        if (written) *written = n;
    });
}

cogarch_status cogarch_path_event_state(const cogarch_path* path, size_t index, double* y_pre, double* y_post) {
    return guard([&] {
        need(path, "path");
        require(index < path->path.events.size(), ErrorCode::InvalidArgument, "event index out of range");
        const Event& e = path->path.events[index];
        if (y_pre) out_mat(e.y_pre, y_pre);
        if (y_post) out_mat(e.y_post, y_post);
    });
}

cogarch_status cogarch_path_end(const cogarch_path* path, double* g_end, double* y_end) {
    return guard([&] {
        need(path, "path");
        if (g_end) *g_end = path->path.g_end;
        if (y_end) out_mat(path->path.y_end, y_end);
    });
}

cogarch_status cogarch_path_initial_state(const cogarch_path* path, double* y0) {
    return guard([&] {
        need(path, "path");
        need(y0, "y0");
        out_mat(path->path.y0, y0);
    });
}

cogarch_status cogarch_path_min_v(const cogarch_path* path, double* min_v, size_t* negative_count) {
    return guard([&] {
        need(path, "path");
        if (min_v) *min_v = path->path.min_v;
        if (negative_count) *negative_count = path->path.negative_v;
    });
}

cogarch_status cogarch_path_sample_grid(const cogarch_path* path, double dt, cogarch_grid** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new cogarch_grid{path->sim->sample_grid(path->path, dt)};
    });
}

cogarch_status cogarch_simulate_grid(const cogarch_model* model, const cogarch_driver* driver, double horizon,
                                     double dt, const cogarch_init* init, uint64_t seed, cogarch_grid** out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        *out = nullptr;
        const Simulator sim(model->m, driver->d);
        Rng rng = make_stream(seed, 0);
        const Vector y0 = resolve(sim, init, rng);
        *out = new cogarch_grid{sim.simulate_grid(horizon, dt, y0, rng)};
    });
}

void cogarch_grid_destroy(cogarch_grid* grid) { delete grid; }

size_t cogarch_grid_size(const cogarch_grid* grid) { return grid ? grid->grid.t.size() : 0; }

cogarch_status cogarch_grid_data(const cogarch_grid* grid, double* t, double* v, double* g) {
    return guard([&] {
        need(grid, "grid");
        const GridSample& gs = grid->grid;
        if (t) std::copy(gs.t.begin(), gs.t.end(), t);
        if (v) std::copy(gs.v.begin(), gs.v.end(), v);
        if (g) std::copy(gs.g.begin(), gs.g.end(), g);
    });
}

cogarch_status cogarch_step_recurrence(const cogarch_model* model, const double* y, double wait, double z,
                                       double* out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        LevyDriver unit;
        const Simulator sim(model->m, unit);
        out_mat(sim.step_recurrence(in_vec(y, model->m.q(), "y"), wait, z), out);
    });
}

cogarch_status cogarch_stationary_sample(const cogarch_model* model, const cogarch_driver* driver, size_t n,
                                         uint64_t seed, double* out) {
    return guard([&] {
        need(model, "model");
        need(driver, "driver");
        need(out, "out");
        const Simulator sim(model->m, driver->d);
        out_mat(stationary_ensemble(sim, n, seed), out);
    });
}

cogarch_status cogarch_cogarch11_reference(double omega0, double omega1, double eta, const double* jump_times,
                                           const double* jump_sq, size_t n_jumps, double sigma0_sq,
                                           const double* times, size_t n_times, double* out) {
    return guard([&] {
        need(times, "times");
        need(out, "out");
        std::vector<Jump> jumps(n_jumps);
        if (n_jumps) {
            need(jump_times, "jump_times");
            need(jump_sq, "jump_sq");
        }
        for (size_t i = 0; i < n_jumps; ++i) jumps[i] = {jump_times[i], std::sqrt(jump_sq[i]), jump_sq[i]};
        const auto v = cogarch11_reference(omega0, omega1, eta, jumps, sigma0_sq,
                                           std::vector<double>(times, times + n_times));
        std::copy(v.begin(), v.end(), out);
    });
}

cogarch_status cogarch_sample_acf(const double* x, size_t n, size_t max_lag, double* out, double* band) {
    return guard([&] {
        need(x, "x");
        need(out, "out");
        const AcfEstimate est = sample_acf(std::vector<double>(x, x + n), max_lag);
        std::copy(est.values.begin(), est.values.end(), out);
        if (band) *band = est.band;
    });
}

cogarch_status cogarch_batch_mean(const double* x, size_t n, size_t batches, double* value, double* se) {
    return guard([&] {
        need(x, "x");
        const Estimate e = batch_mean(std::vector<double>(x, x + n), batches);
        if (value) *value = e.value;
        if (se) *se = e.se;
    });
}

cogarch_status cogarch_batch_variance(const double* x, size_t n, size_t batches, double* value, double* se) {
    return guard([&] {
        need(x, "x");
        const Estimate e = batch_variance(std::vector<double>(x, x + n), batches);
        if (value) *value = e.value;
        if (se) *se = e.se;
    });
}

cogarch_status cogarch_ks_two_sample(const double* a, size_t na, const double* b, size_t nb, double* statistic,
                                     double* p_value) {
    return guard([&] {
        need(a, "a");
        need(b, "b");
        const KsResult r = ks_two_sample(std::vector<double>(a, a + na), std::vector<double>(b, b + nb));
        if (statistic) *statistic = r.statistic;
        if (p_value) *p_value = r.p_value;
    });
}

}  // extern "C"
