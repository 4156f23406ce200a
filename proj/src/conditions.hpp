#pragma once

// Analytic checkers: stationarity, moment existence and volatility positivity.

#include <array>
#include <optional>
#include <string>

#include "levy.hpp"
#include "model.hpp"

namespace cogarch {

inline constexpr double kStrictMargin = 1e-12;

struct ConditionEntry {
    Norm r = Norm::Two;
    double kappa = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    bool satisfied = false;
};

struct ConditionReport {
    std::string equation;  // identifier of the inequality checked
    std::array<ConditionEntry, 3> entries{};
    bool verdict = false;  // any r satisfied

    const ConditionEntry& entry(Norm r) const { return entries[static_cast<std::size_t>(r)]; }
};

// int log(1 + kappa_r y^2) dnu < -lambda
ConditionReport check_stationarity(const ModelMatrices& m, const LevyDriver& d);

// int ((1 + kappa_r y^2)^k - 1) dnu < -lambda k
ConditionReport check_moment(const ModelMatrices& m, const LevyDriver& d, int k);

// Left/right sides of kappa^2 rho < 2(-lambda - kappa mu) for one norm.
struct FourthMomentDisplay {
    double lhs;
    double rhs;
    bool satisfied;
};
FourthMomentDisplay fourth_moment_display(const ModelMatrices& m, const LevyDriver& d, Norm r);

// a' exp(B t) e
double kernel(const ModelMatrices& m, double t);

enum class PositivityStatus { ProvenNonnegative, ProvenViolated, NumericEvidenceOnly };
enum class PositivityRule { AllRealNegative, ConjugatePairing, NoDominantReal, RootMajorization, TwoByTwo, GridScan };

// Stable identifiers used in reports, e.g. "conjugate-real-pairing".
const char* rule_id(PositivityRule rule);
const char* status_name(PositivityStatus status);

struct GridScan {
    double step = 0.0;
    double horizon = 0.0;
    double min_value = 0.0;
    double argmin = 0.0;
    bool nonnegative = true;  // min >= -1e-10 on the grid
    bool tail_nonnegative = true;  // dominant spectral term keeps the sign for t > horizon
};

struct PositivityVerdict {
    PositivityStatus status = PositivityStatus::NumericEvidenceOnly;
    PositivityRule rule = PositivityRule::GridScan;
    std::optional<double> witness_t;
    std::optional<double> witness_value;
    std::optional<GridScan> grid;
};

GridScan scan_kernel(const ModelMatrices& m);
PositivityVerdict check_positivity(const ModelMatrices& m);

// Finds an injective pairing of conjugate pairs to real eigenvalues with
// real eigenvalue >= Re(pair). Exposed for tests.
bool conjugate_pairing_exists(const Spectrum& spec);

struct InitialStateCheck {
    bool ok = false;
    double infimum = 0.0;
};

// Grid check of a' exp(B t) y0 >= -alpha0 on [0, t_max].
InitialStateCheck check_initial_state(const ModelMatrices& m, const Vector& y0, double t_max);

}  // namespace cogarch
