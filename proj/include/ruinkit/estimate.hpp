#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ruinkit/model.hpp"

namespace ruinkit {

/// Raw sample moments a_j = (1/n) sum_i S_i^j.
struct SampleMoments {
    double a1;
    double a2;
    double a3;
    std::int64_t n;
};

/// Rejects empty input and negative values.
SampleMoments sample_moments(const std::vector<double>& s_values);

struct MomentTriple {
    double a1;
    double a2;
    double a3;
};

/// A_j = (1/n) sum_{t=1}^{n} m_j(t), the exact expectation of the pooled
/// sample moments under marginal sampling. Closed form via power sums.
MomentTriple theoretical_time_averaged_moments(const ModelParams& params, int n);

struct SolveOptions {
    double alpha0 = 0.5;
    double mu0 = 0.5;
    double sigma20 = 0.5;
    bool multistart = false;  // search a 3x3x3 start grid, keep the best fit
    int max_iterations = 200;
};

struct EstimateResult {
    double alpha_hat;
    double mu_hat;
    double sigma2_hat;
    double mu_prime_hat;  // mu_hat / (1 - alpha_hat)
    double s2_hat;        // sigma2_hat / (1 - alpha_hat^2)
    double residual_norm; // Euclidean norm of the relative residuals
    int iterations;
    bool converged;
    // The pooled moments determine only (mu', s'^2); alpha rides a solution
    // manifold and reflects the initializer. Set for the pure-moment route.
    bool identifiability_note;
};

/// Fits (alpha, mu, sigma2) with theta held fixed by minimizing the relative
/// residuals of the three moment equations a_j = A_j. Levenberg-Marquardt on
/// transformed coordinates alpha = tanh(eta1), sigma2 = exp(eta3) keeps the
/// iterates inside the constrained domain. Rejects degenerate inputs
/// (a1 <= 0 or a2 <= a1^2, i.e. constant data).
EstimateResult solve_moments(const SampleMoments& a, double theta,
                             const SolveOptions& options = {});

/// Same solver on three detrended statistics of D_t = S_t - theta*t, which
/// make alpha identifiable and stay informative at any series length (the
/// raw pooled moments are swamped by the deterministic t-trend for large n):
///   level  = weighted mean of D_t,              E = theta L1
///   spread = weighted mean of D_t^2 - 2theta^2 t, E = theta^2 (2 L1 + L2)
///   c1     = weighted lag-1 covariance of D_t,  E = theta^2 e^{2mu'}
///            (e^{(1+alpha)s'^2} - e^{s'^2})
/// Weights are the model-implied 1/Var(S_t), calibrated by a parameter-free
/// 1/(1+t) first pass; residual scales are sandwich standard errors of the
/// weighted means.
EstimateResult solve_moments_autocov(const std::vector<double>& series,
                                     double theta,
                                     const SolveOptions& options = {});

/// Statistic-level variant of the autocovariance fit, for feeding exact
/// theoretical values of (level, spread, c1) with caller-chosen residual
/// scales (must be > 0).
EstimateResult solve_moments_autocov_stats(double level, double spread,
                                           double c1, double level_se,
                                           double spread_se, double c1_se,
                                           double theta,
                                           const SolveOptions& options = {});

enum class Estimator {
    moments,
    autocov,
};

struct ReplicationCell {
    double mean_estimate;
    double deviation;  // mean estimate - truth
    double mse;
};

/// Per-(parameter, n) summary of a simulate-then-estimate study. Rows cover
/// the model parameters and the implied stationary quantities.
struct ReplicationReport {
    static constexpr int n_rows = 5;
    static constexpr std::array<const char*, n_rows> row_names = {
        "alpha", "mu", "sigma2", "mu_prime", "s2"};

    ModelParams truth;
    std::vector<int> n_list;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    std::array<std::vector<ReplicationCell>, n_rows> cells;  // [row][n_index]
    std::vector<std::int64_t> excluded;  // per n_index: failed replications
};

/// For each n: simulate reps marginal-mode series S_1..S_n (stationary-mean
/// init), estimate with theta = truth.theta held fixed, and aggregate mean
/// estimate, deviation, and MSE. Replication r of sample size n draws from
/// substream(mix(seed, n), r), so results are deterministic for any thread
/// count. Failed replications are excluded and counted.
ReplicationReport replication_study(const ModelParams& truth,
                                    const std::vector<int>& n_list,
                                    std::int64_t reps, std::uint64_t seed,
                                    Estimator estimator = Estimator::moments,
                                    const SolveOptions& options = {},
                                    int threads = 1);

}  // namespace ruinkit
