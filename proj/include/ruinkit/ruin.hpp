#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ruinkit/model.hpp"
#include "ruinkit/simulate.hpp"

namespace ruinkit {

enum class RootMethod {
    closed_form,
    newton,
};

struct AdjustmentCoefficient {
    double r_value;   // in (0, 1/theta) when c > theta
    RootMethod method;
    int iterations;   // 0 for the closed form
    double residual;  // |M_x(R) - 1 - R c|
};

/// Minimum premium for net profit: theta * E[Lambda] = theta * L1. The
/// weaker corollary c > theta must also hold for a positive R to exist.
double net_profit_min_premium(const ModelParams& params);

/// R = (c - theta)/(c theta), the root of M_x(r) = 1 + rc for exponential
/// claims; at this root M_x(R) = c/theta. Requires c > theta.
AdjustmentCoefficient adjustment_coefficient_closed(double c, double theta);

struct NewtonOptions {
    int max_iterations = 200;
};

/// Safeguarded Newton iteration on g(r) = claim_mgf(r) - 1 - rc over the
/// bracket (0, 1/theta), with bisection fallback whenever an iterate leaves
/// the current sign-change bracket. Start point r0 = (c - theta)/(2 c theta).
/// Throws if no sign change exists on the bracket or the iteration budget
/// runs out.
AdjustmentCoefficient adjustment_coefficient_newton(
    const std::function<double(double)>& claim_mgf, double c, double theta,
    const NewtonOptions& options = {});

struct BoundReport {
    AdjustmentCoefficient r;
    double z;             // M_x(R) - 1 = c/theta - 1
    SeriesEval series;    // partial sums of E[e^{z Lambda}] at z
    double c_n;           // truncated constant C_N, the last partial sum
    std::vector<double> u_grid;
    std::vector<double> bound_values;        // e^{-R u} * C_N per u
    std::vector<RuinEstimate> mc_comparison; // empty unless paired with MC
    std::optional<double> fitted_slope;      // of ln psi_hat over the window
    bool divergence_warning;
    bool net_profit_warning;  // theta < c <= theta * L1
};

/// Exponential ruin bound psi(u) <= e^{-Ru} * C_N(z) over the grid. The
/// constant is a truncated series for a formally infinite expectation, so
/// the report always carries divergence diagnostics. Requires c > theta
/// (hard), warns when c is at or below the net-profit minimum premium.
BoundReport lundberg_bound(const ModelParams& params, double c,
                           const std::vector<double>& u_grid, int truncation);

struct MgfIdentityCheck {
    double mc_value;      // MC mean of e^{-r U(t)}
    double mc_se;
    double closed_value;  // e^{-r(u+ct)} e^{tz} E[e^{z Lambda}], z = M_x(r)-1
    double standardized_diff;
    double r;
    int t;
    std::int64_t reps;
};

/// Validates E[e^{-r U(t)}] against its closed form at r < 0, where both
/// sides are finite. Paths use marginal sampling with a stationary draw of
/// ln Lambda_0, matching the stationarity the closed form assumes.
MgfIdentityCheck mgf_identity_check(const ModelParams& params, double u,
                                    double c, double r, int t,
                                    std::int64_t reps, std::uint64_t seed,
                                    int threads = 1);

struct McComparisonOptions {
    int horizon = 200;
    std::int64_t reps = 10000;
    int truncation = 10;
    std::uint64_t seed = 0;
    InitMode init_mode = InitMode::stationary_mean;
    int threads = 1;
    // Fit ln psi_hat only where psi_hat lies inside this window, away from
    // the MC noise floor and small-u transients.
    double fit_window_low = 1e-3;
    double fit_window_high = 0.3;
};

/// Least-squares slope of ln(psi_hat) against u over the grid points whose
/// psi_hat lies strictly inside (low, high); nullopt when fewer than 3
/// points qualify.
std::optional<double> fit_log_slope(const std::vector<RuinEstimate>& estimates,
                                    double low, double high);

/// Pairs the bound with finite-horizon ruin estimates on a shared grid and
/// fits the empirical decay slope of ln psi_hat by least squares. The fit
/// is omitted when fewer than 3 grid points land in the window.
BoundReport bound_vs_mc_report(const ModelParams& params, double c,
                               const std::vector<double>& u_grid,
                               const McComparisonOptions& options = {});

}  // namespace ruinkit
