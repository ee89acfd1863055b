#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ruinkit/model.hpp"
#include "ruinkit/rng.hpp"

namespace ruinkit {

enum class InitMode {
    fixed,            // ln L_0 = y0 as given
    stationary_mean,  // ln L_0 = mu/(1-alpha)
    stationary_draw,  // ln L_0 ~ Normal(mu', sigma'^2), one draw per path
};

enum class SamplingMode {
    marginal,    // fresh N_t ~ Poisson(L_t + t) at each t
    cumulative,  // nonnegative Poisson increments, counts and sums accumulate
};

/// Configuration for one simulated path (or one replication family).
struct SimConfig {
    ModelParams params;
    int horizon = 1;  // number of time steps t = 1..horizon
    InitMode init_mode = InitMode::stationary_mean;
    double y0 = 0.0;  // ln L_0, used only with InitMode::fixed
    SamplingMode sampling_mode = SamplingMode::marginal;
    std::uint64_t seed = 0;  // master seed for replication drivers

    void validate() const;

    /// ln L_0 anchor for this config. Consumes one normal draw in
    /// stationary_draw mode, none otherwise.
    double resolve_y0(Rng& rng) const;
};

struct LatentPoint {
    int t;
    double y;       // ln L_t
    double lambda;  // L_t = e^y exactly
};

/// Latent intensity path. `points` covers t = 1..horizon; the t = 0 anchor
/// y0 seeds the recursion Y_1 = alpha*y0 + eps_1 but is not a path entry.
struct LambdaPath {
    double y0;
    std::vector<LatentPoint> points;
};

struct PathRecord {
    int t;
    double y;
    double lambda;
    std::int64_t n_claims;
    double s_total;
    std::optional<double> u_surplus;  // set only by surplus runs
};

struct ClaimDraw {
    std::int64_t n_claims;
    double s_total;
};

struct RuinEstimate {
    double psi_hat;  // fraction of paths ruined by the horizon
    std::int64_t reps;
    double ci_low;   // normal-approximation 95% interval
    double ci_high;
    double u;
    double c;
    int horizon;
};

/// Samples Y_t = alpha*Y_{t-1} + eps_t, eps_t ~ Normal(mu, sigma^2), for
/// t = 1..horizon. Throws std::range_error if any Y_t exceeds 700 (e^Y
/// would overflow; the path is aborted).
LambdaPath sample_lambda_path(const SimConfig& config, Rng& rng);

/// N ~ Poisson(lambda + t) claims, each Exponential with mean theta.
/// Requires lambda > 0 and t >= 0.
ClaimDraw sample_claims_at(int t, double lambda, double theta, Rng& rng);

/// One aggregate-claims path over t = 0..horizon. The latent path is drawn
/// first (so it is identical across sampling modes for a given rng state),
/// then claims along it per the configured mode. Marginal mode draws a
/// fresh compound-Poisson sample at every t including t = 0 (rate
/// Lambda_0 + 0); cumulative mode anchors S_0 = 0 and accumulates
/// nonnegative increments from t = 1.
std::vector<PathRecord> sample_aggregate_series(const SimConfig& config, Rng& rng);

/// Surplus path U(t) = u + c*t - S_t on a cumulative-mode claims path,
/// t = 0..horizon (U(0) = u). Requires u >= 0, c > 0, and
/// sampling_mode == cumulative.
std::vector<PathRecord> sample_surplus_path(const SimConfig& config, double u,
                                            double c, Rng& rng);

/// Per-replication maximum losses max_{1<=t<=horizon}(S_t - c*t) under
/// cumulative sampling; replication r uses substream(config.seed, r), so
/// results are byte-identical for any thread count. Ruin by the horizon at
/// initial surplus u is the event {max loss > u}, which makes the empirical
/// ruin curve monotone in u under these common random numbers.
std::vector<double> sample_max_losses(const SimConfig& config, double c,
                                      std::int64_t reps, int threads = 1);

/// Counts {max loss > u} over precomputed per-replication losses.
RuinEstimate ruin_estimate_from_losses(const std::vector<double>& max_losses,
                                       double u, double c, int horizon);

/// Monte Carlo finite-horizon ruin probability. Requires reps >= 100.
RuinEstimate estimate_ruin_probability(const SimConfig& config, double u,
                                       double c, std::int64_t reps,
                                       int threads = 1);

}  // namespace ruinkit
