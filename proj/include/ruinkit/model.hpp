#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ruinkit {

/// Model parameters of the log-AR(1) intensity compound Poisson risk model:
///
///   ln L_t = alpha * ln L_{t-1} + eps_t,   eps_t ~ Normal(mu, sigma2)
///   N_t | L_t ~ Poisson(L_t + t)
///   S_t = sum_{i=1}^{N_t} X_i,             X_i ~ Exponential(mean theta)
struct ModelParams {
    double alpha;   // autoregression coefficient, in (-1, 1)
    double mu;      // noise drift (log-intensity units)
    double sigma2;  // noise variance, >= 0 (0 = degenerate intensity)
    double theta;   // mean claim size, > 0

    /// Throws std::invalid_argument on any domain violation.
    void validate() const;
};

/// Stationary law of Y_t = ln L_t: mean mu/(1-alpha), variance
/// sigma2/(1-alpha^2).
struct StationaryLaw {
    double mean_y;
    double var_y;
};

StationaryLaw stationary_law(const ModelParams& params);

/// Raw moments of the aggregate claims S_t at a fixed time index.
struct MomentSet {
    int t;
    double m1;
    double m2;
    double m3;
};

/// exp(x) with a range guard: x > 700 raises std::range_error instead of
/// silently overflowing to infinity.
double checked_exp(double x);

/// E[L^n] for the stationary lognormal intensity:
/// exp(n*mu' + n^2*sigma'^2/2) with (mu', sigma'^2) the stationary law.
double lambda_moment(const ModelParams& params, int n);

/// E(S_t) = theta * (E[L] + t).
double mean_s(const ModelParams& params, int t);

/// Var(S_t) = 2 theta^2 (E[L] + t) + theta^2 (E[L^2] - E[L]^2).
double var_s(const ModelParams& params, int t);

/// E(S_t^3) from the compound-Poisson cumulant expansion
/// E(S^3 | rate) = theta^3 (6 rate + 6 rate^2 + rate^3), rate = L + t.
double third_moment_s(const ModelParams& params, int t);

/// The published closed form for E(S_t^3), kept verbatim for comparison.
/// It drops the rate^1 and rate^2 contributions of the intensity at t = 0
/// and uses exponent 4 sigma'^2 in the middle term; see README for the
/// erratum note. Do not use for estimation.
double third_moment_s_printed(const ModelParams& params, int t);

/// (m1, m2, m3) of S_t.
MomentSet moments_s(const ModelParams& params, int t);

/// Claim-size MGF M_x(r) = 1/(1 - r*theta), defined for r < 1/theta.
double mgf_claim(double r, double theta);

/// Partial sums of the formal series sum_n z^n/n! * E[L^n].
/// For z > 0 the series diverges (the lognormal has no MGF at positive
/// arguments); the evaluation reports truncations plus divergence
/// diagnostics instead of pretending a limit exists.
struct SeriesEval {
    double z;
    int truncation_order;               // N
    std::vector<double> partial_sums;   // N+1 sums, index n = order-n truncation
    std::vector<double> terms;          // N+1 terms, terms[0] = 1
    std::vector<double> term_ratios;    // N+1 ratios t_{n+1}/t_n, n = 0..N
    double last_term_ratio;             // term_ratios[N]
    bool divergence_flag;

    /// C_N, the order-N truncated constant.
    double value() const { return partial_sums.back(); }
};

/// Term ratio t_{n+1}/t_n = z * exp(mu' + (2n+1) sigma'^2 / 2) / (n+1).
/// Ratios are evaluated from this closed form; the divergence flag is set
/// when |ratio| exceeds 1 and the |ratio| sequence is increasing over the
/// final three indices.
SeriesEval exp_lambda_series(const ModelParams& params, double z, int truncation);

/// E[exp(z*L)] for z <= 0 by adaptive Gauss-Kronrod quadrature of
/// exp(z*e^y) against the Normal(mu', sigma'^2) density over
/// [mu' - 10 sigma', mu' + 10 sigma'], relative tolerance 1e-10.
/// The convergent counterpart of the series; result lies in (0, 1].
/// Throws std::domain_error for z > 0 (the expectation is infinite).
double exp_lambda_quadrature(const ModelParams& params, double z);

/// M_{S_t}(r) = exp(t*(M_x(r)-1)) * E[exp((M_x(r)-1) * L)].
/// For r <= 0 the expectation factor is evaluated by quadrature (finite);
/// for r in (0, 1/theta) only the truncated series is available and the
/// divergence flag is set accordingly.
struct MgfSEval {
    double value;       // prefactor * (quadrature or truncated series)
    double prefactor;   // exp(t*(M_x(r)-1))
    double z;           // M_x(r) - 1
    bool used_quadrature;
    bool divergence_flag;
    std::optional<SeriesEval> series;  // present when the series route was taken
};

MgfSEval mgf_s(const ModelParams& params, double r, int t, int truncation);

}  // namespace ruinkit
