#include "ruinkit/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "ruinkit/parallel.hpp"
#include "ruinkit/rng.hpp"
#include "ruinkit/simulate.hpp"

namespace ruinkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Gaussian elimination with partial pivoting; false on a vanishing pivot.
bool solve3(Mat3 a, Vec3 b, Vec3& out) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) {
                pivot = row;
            }
        }
        if (std::abs(a[pivot][col]) < 1e-300) {
            return false;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 3; ++k) {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double s = b[row];
        for (int k = row + 1; k < 3; ++k) {
            s -= a[row][k] * out[k];
        }
        out[row] = s / a[row][row];
    }
    return std::isfinite(out[0]) && std::isfinite(out[1]) && std::isfinite(out[2]);
}

// Unconstrained coordinates: alpha = tanh(e1), mu = e2, sigma2 = exp(e3).
struct Eta {
    double e1;
    double e2;
    double e3;
};

struct Derived {
    double alpha;
    double mu;
    double sigma2;
    double mu_prime;
    double s2;
    double l1;  // L_k = exp(k mu' + k^2 s'^2 / 2)
    double l2;
    double l3;
    bool finite;
};

Derived derive(const Eta& eta) {
    Derived d;
    d.alpha = std::tanh(eta.e1);
    d.mu = eta.e2;
    d.sigma2 = std::exp(eta.e3);
    d.mu_prime = d.mu / (1.0 - d.alpha);
    d.s2 = d.sigma2 / (1.0 - d.alpha * d.alpha);
    d.l1 = std::exp(d.mu_prime + 0.5 * d.s2);
    d.l2 = std::exp(2.0 * d.mu_prime + 2.0 * d.s2);
    d.l3 = std::exp(3.0 * d.mu_prime + 4.5 * d.s2);
    d.finite = std::isfinite(d.mu_prime) && std::isfinite(d.s2) &&
               std::isfinite(d.l1) && std::isfinite(d.l2) && std::isfinite(d.l3);
    return d;
}

// One fitted statistic: its model value, partials with respect to
// (mu', s'^2, alpha), and the target with its residual scale.
struct Stat {
    double value;
    double d_mu_prime;
    double d_s2;
    double d_alpha;
    double target;
    double weight;
};

struct PowerMeans {
    double p1;  // (1/n) sum t   = (n+1)/2
    double p2;  // (1/n) sum t^2 = (n+1)(2n+1)/6
    double p3;  // (1/n) sum t^3 = n(n+1)^2/4
};

PowerMeans power_means(std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {(nd + 1.0) / 2.0, (nd + 1.0) * (2.0 * nd + 1.0) / 6.0,
            nd * (nd + 1.0) * (nd + 1.0) / 4.0};
}

Stat stat_a1(const Derived& d, double theta, const PowerMeans& p, double target) {
    Stat s;
    s.value = theta * (d.l1 + p.p1);
    s.d_mu_prime = theta * d.l1;
    s.d_s2 = theta * 0.5 * d.l1;
    s.d_alpha = 0.0;
    s.target = target;
    s.weight = target;
    return s;
}

Stat stat_a2(const Derived& d, double theta, const PowerMeans& p, double target) {
    const double th2 = theta * theta;
    const double c1 = th2 * (2.0 + 2.0 * p.p1);  // dA2/dL1
    Stat s;
    s.value = th2 * (2.0 * d.l1 + d.l2 + (2.0 + 2.0 * d.l1) * p.p1 + p.p2);
    s.d_mu_prime = c1 * d.l1 + th2 * 2.0 * d.l2;
    s.d_s2 = c1 * 0.5 * d.l1 + th2 * 2.0 * d.l2;
    s.d_alpha = 0.0;
    s.target = target;
    s.weight = target;
    return s;
}

Stat stat_a3(const Derived& d, double theta, const PowerMeans& p, double target) {
    const double th3 = theta * theta * theta;
    const double c1 = th3 * (6.0 + 12.0 * p.p1 + 3.0 * p.p2);  // dA3/dL1
    const double c2 = th3 * (6.0 + 3.0 * p.p1);                // dA3/dL2
    Stat s;
    s.value = th3 * (6.0 * d.l1 + 6.0 * d.l2 + d.l3 +
                     (6.0 + 12.0 * d.l1 + 3.0 * d.l2) * p.p1 +
                     (6.0 + 3.0 * d.l1) * p.p2 + p.p3);
    s.d_mu_prime = c1 * d.l1 + c2 * 2.0 * d.l2 + th3 * 3.0 * d.l3;
    s.d_s2 = c1 * 0.5 * d.l1 + c2 * 2.0 * d.l2 + th3 * 4.5 * d.l3;
    s.d_alpha = 0.0;
    s.target = target;
    s.weight = target;
    return s;
}

// Mean of the detrended series D_t = S_t - theta t, which is theta*L1 free
// of t; paired with an externally estimated standard error as scale.
Stat stat_level(const Derived& d, double theta, double target, double weight) {
    Stat s;
    s.value = theta * d.l1;
    s.d_mu_prime = theta * d.l1;
    s.d_s2 = theta * 0.5 * d.l1;
    s.d_alpha = 0.0;
    s.target = target;
    s.weight = weight;
    return s;
}

// Mean of D_t^2 - 2 theta^2 t, whose expectation theta^2 (2 L1 + L2) is
// again free of t.
Stat stat_spread(const Derived& d, double theta, double target, double weight) {
    const double th2 = theta * theta;
    Stat s;
    s.value = th2 * (2.0 * d.l1 + d.l2);
    s.d_mu_prime = th2 * (2.0 * d.l1 + 2.0 * d.l2);
    s.d_s2 = th2 * (d.l1 + 2.0 * d.l2);
    s.d_alpha = 0.0;
    s.target = target;
    s.weight = weight;
    return s;
}

// Lag-1 covariance of the detrended series under marginal sampling.
Stat stat_autocov(const Derived& d, double theta, double target, double weight) {
    const double th2 = theta * theta;
    const double e2mp = std::exp(2.0 * d.mu_prime);
    const double g = std::exp((1.0 + d.alpha) * d.s2);
    const double h = std::exp(d.s2);
    Stat s;
    s.value = th2 * e2mp * (g - h);
    s.d_mu_prime = 2.0 * s.value;
    s.d_s2 = th2 * e2mp * ((1.0 + d.alpha) * g - h);
    s.d_alpha = th2 * e2mp * d.s2 * g;
    s.target = target;
    s.weight = weight;
    return s;
}

struct MomentProblem {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;  // pooled raw moment targets
    double theta = 1.0;
    PowerMeans p{};
    // Detrended route: level/spread/lag-1 targets and their error scales.
    bool use_autocov = false;
    double level = 0.0, spread = 0.0, c1 = 0.0;
    double level_se = 1.0, spread_se = 1.0, c1_se = 1.0;

    bool stats(const Derived& d, std::array<Stat, 3>& out) const {
        if (use_autocov) {
            out[0] = stat_level(d, theta, level, level_se);
            out[1] = stat_spread(d, theta, spread, spread_se);
            out[2] = stat_autocov(d, theta, c1, c1_se);
        } else {
            out[0] = stat_a1(d, theta, p, a1);
            out[1] = stat_a2(d, theta, p, a2);
            out[2] = stat_a3(d, theta, p, a3);
        }
        for (const Stat& s : out) {
            if (!std::isfinite(s.value)) {
                return false;
            }
        }
        return true;
    }
};

struct LmState {
    Eta eta;
    double cost;  // 0.5 * r^T r
    int iterations;
    bool converged;
};

double residual_vector(const std::array<Stat, 3>& stats, Vec3& r) {
    double cost = 0.0;
    for (int j = 0; j < 3; ++j) {
        r[j] = (stats[j].value - stats[j].target) / stats[j].weight;
        if (!std::isfinite(r[j])) {
            return kInf;
        }
        cost += 0.5 * r[j] * r[j];
    }
    return cost;
}

void jacobian(const std::array<Stat, 3>& stats, const Derived& d, Mat3& jac) {
    const double dal_de1 = 1.0 - d.alpha * d.alpha;
    const double dmp_de1 = d.mu * (1.0 + d.alpha) / (1.0 - d.alpha);
    const double dmp_de2 = 1.0 / (1.0 - d.alpha);
    const double ds2_de1 = 2.0 * d.alpha * d.s2;
    const double ds2_de3 = d.s2;
    for (int j = 0; j < 3; ++j) {
        const Stat& s = stats[j];
        jac[j][0] = (s.d_mu_prime * dmp_de1 + s.d_s2 * ds2_de1 +
                     s.d_alpha * dal_de1) / s.weight;
        jac[j][1] = (s.d_mu_prime * dmp_de2) / s.weight;
        jac[j][2] = (s.d_s2 * ds2_de3) / s.weight;
    }
}

// Levenberg-Marquardt with multiplicative diagonal damping. The moment
// problem is rank-deficient along the alpha manifold; the damping floor
// keeps the normal equations solvable there.
// Box for the transformed coordinates: keeps tanh and exp strictly monotone
// in double precision (tanh(18) is still below 1 by a few ulps) so derived
// quantities like sigma^2/(1 - alpha^2) can never hit a true pole.
Eta clamp_eta(const Eta& e) {
    return {std::clamp(e.e1, -18.0, 18.0), std::clamp(e.e2, -700.0, 700.0),
            std::clamp(e.e3, -690.0, 690.0)};
}

LmState lm_minimize(const MomentProblem& problem, Eta eta, int max_iterations) {
    eta = clamp_eta(eta);
    LmState state{eta, kInf, 0, false};

    Derived d = derive(eta);
    std::array<Stat, 3> stats;
    Vec3 r{};
    if (!d.finite || !problem.stats(d, stats)) {
        return state;
    }
    double cost = residual_vector(stats, r);
    if (!std::isfinite(cost)) {
        return state;
    }

    double lambda = 1e-3;
    for (int iter = 0; iter < max_iterations; ++iter) {
        Mat3 jac_m;
        jacobian(stats, d, jac_m);

        Vec3 grad{};
        Mat3 hess{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                grad[i] += jac_m[j][i] * r[j];
                for (int k = i; k < 3; ++k) {
                    hess[i][k] += jac_m[j][i] * jac_m[j][k];
                }
            }
        }
        hess[1][0] = hess[0][1];
        hess[2][0] = hess[0][2];
        hess[2][1] = hess[1][2];

        // Scale-free first-order test: residual orthogonal to every Jacobian
        // column (an absolute gradient threshold would fire spuriously where
        // the transforms saturate and every column underflows together). On
        // the sigma^2 = 0 face the e3 column is an active bound, so there
        // KKT asks only that no descent direction points back inside.
        const double r_norm = std::sqrt(2.0 * cost);
        bool stationary = true;
        for (int j = 0; j < 3 && stationary; ++j) {
            if (j == 2 && d.s2 <= 1e-10) {
                stationary = grad[2] >= -1e-12;
            } else {
                stationary =
                    std::abs(grad[j]) <= 1e-9 * std::sqrt(hess[j][j]) * r_norm;
            }
        }
        if (cost <= 1e-20 || stationary) {
            state.converged = true;
            break;
        }

        const double trace = hess[0][0] + hess[1][1] + hess[2][2];
        const double floor = 1e-10 * (trace / 3.0) + 1e-300;
        bool stepped = false;
        while (lambda < 1e15) {
            Mat3 damped = hess;
            for (int i = 0; i < 3; ++i) {
                damped[i][i] += lambda * (hess[i][i] + floor);
            }
            Vec3 delta{};
            const Vec3 neg_grad{-grad[0], -grad[1], -grad[2]};
            if (!solve3(damped, neg_grad, delta)) {
                lambda *= 10.0;
                continue;
            }
            const Eta trial = clamp_eta(
                {eta.e1 + delta[0], eta.e2 + delta[1], eta.e3 + delta[2]});
            const Derived d_trial = derive(trial);
            std::array<Stat, 3> stats_trial;
            Vec3 r_trial{};
            double cost_trial = kInf;
            if (d_trial.finite && problem.stats(d_trial, stats_trial)) {
                cost_trial = residual_vector(stats_trial, r_trial);
            }
            if (cost_trial < cost) {
                eta = trial;
                d = d_trial;
                stats = stats_trial;
                r = r_trial;
                cost = cost_trial;
                lambda = std::max(lambda / 10.0, 1e-14);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (stepped) {
            ++state.iterations;
        }
        if (!stepped || state.converged) {
            break;
        }
    }

    state.eta = eta;
    state.cost = cost;
    // Saturation guard: when all L_k underflow the gradient vanishes even
    // though no minimizer exists (cost keeps decreasing along mu' -> -inf),
    // so a vanishing-gradient exit out there is an escape, not convergence.
    if (state.converged && !(std::abs(derive(eta).mu_prime) <= 30.0)) {
        state.converged = false;
    }
    return state;
}

EstimateResult finish(const LmState& state, bool identifiability_note) {
    const Derived d = derive(state.eta);
    EstimateResult result;
    result.alpha_hat = d.alpha;
    result.mu_hat = d.mu;
    result.sigma2_hat = d.sigma2;
    result.mu_prime_hat = d.mu / (1.0 - d.alpha);
    result.s2_hat = d.sigma2 / (1.0 - d.alpha * d.alpha);
    result.residual_norm = std::isfinite(state.cost)
                               ? std::sqrt(2.0 * state.cost)
                               : kInf;
    result.iterations = state.iterations;
    result.converged = state.converged;
    result.identifiability_note = identifiability_note;
    return result;
}

Eta eta_from_start(double alpha0, double mu0, double sigma20) {
    return {std::atanh(alpha0), mu0, std::log(sigma20)};
}

void check_options(const SolveOptions& options) {
    if (!(options.alpha0 > -1.0 && options.alpha0 < 1.0) ||
        !std::isfinite(options.mu0) || !(options.sigma20 > 0.0)) {
        throw std::invalid_argument(
            "SolveOptions: start point must satisfy alpha0 in (-1,1), "
            "sigma20 > 0, mu0 finite");
    }
    if (options.max_iterations < 1) {
        throw std::invalid_argument("SolveOptions: max_iterations must be >= 1");
    }
}

LmState solve_problem(const MomentProblem& problem, const SolveOptions& options) {
    LmState best = lm_minimize(
        problem, eta_from_start(options.alpha0, options.mu0, options.sigma20),
        options.max_iterations);
    auto better = [](const LmState& a, const LmState& b) {
        if (a.converged != b.converged) {
            return a.converged;
        }
        return a.cost < b.cost;
    };
    // The autocov system is triangular: level pins L1, spread then pins L2,
    // c1 then pins alpha. When that closed-form root is admissible it is the
    // exact zero-residual minimizer, so always seed a run there instead of
    // hoping the nominal start finds the right valley.
    if (problem.use_autocov) {
        const double th2 = problem.theta * problem.theta;
        const double l1 = problem.level / problem.theta;
        const double l2 = problem.spread / th2 - 2.0 * l1;
        if (l1 > 0.0 && l2 > l1 * l1) {
            const double s2p = std::log(l2 / (l1 * l1));
            const double mup = std::log(l1) - 0.5 * s2p;
            const double arg = 1.0 + problem.c1 / (th2 * l1 * l1);
            if (arg > 0.0) {
                const double alpha =
                    std::clamp(std::log(arg) / s2p, -0.995, 0.995);
                const LmState candidate = lm_minimize(
                    problem,
                    eta_from_start(alpha, mup * (1.0 - alpha),
                                   s2p * (1.0 - alpha * alpha)),
                    options.max_iterations);
                if (better(candidate, best)) {
                    best = candidate;
                }
            }
        }
    }
    if (!options.multistart) {
        return best;
    }
    for (double alpha0 : {-0.5, 0.0, 0.5}) {
        for (double mu0 : {0.25, 0.75, 1.25}) {
            for (double sigma20 : {0.2, 0.6, 1.0}) {
                const LmState candidate =
                    lm_minimize(problem, eta_from_start(alpha0, mu0, sigma20),
                                options.max_iterations);
                if (better(candidate, best)) {
                    best = candidate;
                }
            }
        }
    }
    return best;
}

void check_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("theta must be > 0");
    }
}

}  // namespace

SampleMoments sample_moments(const std::vector<double>& s_values) {
    if (s_values.empty()) {
        throw std::invalid_argument("sample_moments: empty input");
    }
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    for (double s : s_values) {
        if (!(s >= 0.0)) {
            throw std::invalid_argument(
                "sample_moments: claim totals must be >= 0");
        }
        a1 += s;
        a2 += s * s;
        a3 += s * s * s;
    }
    const double n = static_cast<double>(s_values.size());
    return {a1 / n, a2 / n, a3 / n,
            static_cast<std::int64_t>(s_values.size())};
}

MomentTriple theoretical_time_averaged_moments(const ModelParams& params, int n) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument(
            "theoretical_time_averaged_moments: n must be >= 1");
    }
    const double l1 = lambda_moment(params, 1);
    const double l2 = lambda_moment(params, 2);
    const double l3 = lambda_moment(params, 3);
    const PowerMeans p = power_means(n);
    const double theta = params.theta;
    const double th2 = theta * theta;
    const double th3 = th2 * theta;
    MomentTriple out;
    out.a1 = theta * (l1 + p.p1);
    out.a2 = th2 * (2.0 * l1 + l2 + (2.0 + 2.0 * l1) * p.p1 + p.p2);
    out.a3 = th3 * (6.0 * l1 + 6.0 * l2 + l3 + (6.0 + 12.0 * l1 + 3.0 * l2) * p.p1 +
                    (6.0 + 3.0 * l1) * p.p2 + p.p3);
    return out;
}

EstimateResult solve_moments(const SampleMoments& a, double theta,
                             const SolveOptions& options) {
    check_theta(theta);
    check_options(options);
    if (a.n < 1) {
        throw std::invalid_argument("solve_moments: n must be >= 1");
    }
    if (!(a.a1 > 0.0)) {
        throw std::invalid_argument(
            "solve_moments: degenerate input, a1 must be > 0");
    }
    if (!(a.a2 > a.a1 * a.a1)) {
        throw std::invalid_argument(
            "solve_moments: degenerate input, requires a2 > a1^2 "
            "(constant data carry no variance information)");
    }
    if (!(a.a3 > 0.0)) {
        throw std::invalid_argument(
            "solve_moments: degenerate input, a3 must be > 0");
    }
    MomentProblem problem;
    problem.a1 = a.a1;
    problem.a2 = a.a2;
    problem.a3 = a.a3;
    problem.theta = theta;
    problem.p = power_means(a.n);
    // a1 <= theta*p1 leaves no room for the intensity contribution: the cost
    // then decreases forever along mu' -> -inf and no finite minimizer exists.
    if (!(a.a1 > theta * problem.p.p1)) {
        throw std::invalid_argument(
            "solve_moments: degenerate input, a1 must exceed theta*(n+1)/2 "
            "(the deterministic trend alone already overshoots the sample mean)");
    }
    return finish(solve_problem(problem, options), true);
}

EstimateResult solve_moments_autocov_stats(double level, double spread,
                                           double c1, double level_se,
                                           double spread_se, double c1_se,
                                           double theta,
                                           const SolveOptions& options) {
    check_theta(theta);
    check_options(options);
    if (!(level > 0.0)) {
        throw std::invalid_argument(
            "solve_moments_autocov_stats: degenerate input, level must be > 0 "
            "(it estimates theta*L1)");
    }
    if (!(spread > 2.0 * theta * level)) {
        throw std::invalid_argument(
            "solve_moments_autocov_stats: degenerate input, spread must "
            "exceed 2*theta*level (the implied L2 is not positive)");
    }
    if (!(level_se > 0.0) || !(spread_se > 0.0) || !(c1_se > 0.0) ||
        !std::isfinite(c1)) {
        throw std::invalid_argument(
            "solve_moments_autocov_stats: residual scales must be > 0 and "
            "c1 finite");
    }
    MomentProblem problem;
    problem.theta = theta;
    problem.use_autocov = true;
    problem.level = level;
    problem.spread = spread;
    problem.c1 = c1;
    problem.level_se = level_se;
    problem.spread_se = spread_se;
    problem.c1_se = c1_se;
    return finish(solve_problem(problem, options), false);
}

EstimateResult solve_moments_autocov(const std::vector<double>& series,
                                     double theta,
                                     const SolveOptions& options) {
    check_theta(theta);
    if (series.size() < 3) {
        throw std::invalid_argument(
            "solve_moments_autocov: series length must be >= 3");
    }
    // Detrend with the known premium-free drift theta*t; every statistic
    // below has a t-free expectation.
    std::vector<double> detrended(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        detrended[i] = series[i] - theta * static_cast<double>(i + 1);
    }

    // Weighted mean of a transformed sequence plus its sandwich standard
    // error; the same machinery serves all three statistics.
    const auto weighted_mean = [](const std::vector<double>& x,
                                  const std::vector<double>& w) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += w[i] * x[i];
            den += w[i];
        }
        const double mean = num / den;
        double se_sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            se_sq += w[i] * w[i] * (x[i] - mean) * (x[i] - mean);
        }
        return std::pair<double, double>(mean, std::sqrt(se_sq) / den);
    };

    const std::size_t m = series.size();
    std::vector<double> spread_x(m);
    for (std::size_t i = 0; i < m; ++i) {
        spread_x[i] = detrended[i] * detrended[i] -
                      2.0 * theta * theta * static_cast<double>(i + 1);
    }

    // Var(S_t) grows linearly in t (the Poisson rate includes t), so
    // unweighted averages of detrended values never concentrate: late terms
    // drown the intensity signal carried by the early ones. Weight by the
    // model-implied Var(S_t) = theta^2 (2 (L1 + t) + L2 - L1^2), calibrated
    // in stages: a parameter-free 1/(1+t) pass pins the level L1, then a
    // Poisson-scale pass pins the variance excess L2 - L1^2. The excess is
    // floored at 2 L1: the true excess is nonnegative, and an undersized
    // plug-in (pure pass noise) collapses the weight knee and discards
    // nearly every period, while an oversized one costs little.
    std::vector<double> var_t(m), w1(m), w2(m);
    for (std::size_t i = 0; i < m; ++i) {
        var_t[i] = 2.0 + static_cast<double>(i + 1);
        w1[i] = 1.0 / var_t[i];
    }
    const double l1_rough = weighted_mean(detrended, w1).first / theta;
    if (l1_rough > 0.0) {
        const double th2 = theta * theta;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = static_cast<double>(i + 1);
            var_t[i] = 2.0 * th2 * (l1_rough + t);
            w2[i] = 1.0 / (var_t[i] * var_t[i]);
        }
        double excess = weighted_mean(spread_x, w2).first / th2 -
                        2.0 * l1_rough - l1_rough * l1_rough;
        excess = std::isfinite(excess) ? std::max(excess, 2.0 * l1_rough)
                                       : 2.0 * l1_rough;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = static_cast<double>(i + 1);
            var_t[i] = th2 * (2.0 * (l1_rough + t) + excess);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        w1[i] = 1.0 / var_t[i];
        w2[i] = w1[i] * w1[i];
    }
    const auto [level, level_se] = weighted_mean(detrended, w1);
    const auto [spread, spread_se] = weighted_mean(spread_x, w2);

    std::vector<double> wp(m - 1), prod_x(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        wp[i] = 1.0 / (var_t[i] * var_t[i + 1]);
        prod_x[i] = (detrended[i] - level) * (detrended[i + 1] - level);
    }
    const auto [c1, c1_se] = weighted_mean(prod_x, wp);

    if (!(level_se > 0.0) || !(spread_se > 0.0) || !(c1_se > 0.0)) {
        throw std::invalid_argument(
            "solve_moments_autocov: degenerate input, constant series");
    }
    return solve_moments_autocov_stats(level, spread, c1, level_se, spread_se,
                                       c1_se, theta, options);
}

ReplicationReport replication_study(const ModelParams& truth,
                                    const std::vector<int>& n_list,
                                    std::int64_t reps, std::uint64_t seed,
                                    Estimator estimator,
                                    const SolveOptions& options, int threads) {
    truth.validate();
    check_options(options);
    if (n_list.empty()) {
        throw std::invalid_argument("replication_study: n_list must be nonempty");
    }
    for (int n : n_list) {
        if (n < 1) {
            throw std::invalid_argument("replication_study: every n must be >= 1");
        }
    }
    if (reps < 1) {
        throw std::invalid_argument("replication_study: reps must be >= 1");
    }

    ReplicationReport report;
    report.truth = truth;
    report.n_list = n_list;
    report.reps = reps;
    report.seed = seed;
    const std::array<double, ReplicationReport::n_rows> truth_values = {
        truth.alpha, truth.mu, truth.sigma2, truth.mu / (1.0 - truth.alpha),
        truth.sigma2 / (1.0 - truth.alpha * truth.alpha)};

    struct RepOutcome {
        bool ok;
        std::array<double, ReplicationReport::n_rows> est;
    };

    for (int n : n_list) {
        const std::uint64_t master =
            mix64(seed ^ mix64(static_cast<std::uint64_t>(n)));
        SimConfig config;
        config.params = truth;
        config.horizon = n;
        config.init_mode = InitMode::stationary_mean;
        config.sampling_mode = SamplingMode::marginal;

        auto block = [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            std::vector<RepOutcome> outcomes;
            outcomes.reserve(static_cast<std::size_t>(end - begin));
            for (std::int64_t rep = begin; rep < end; ++rep) {
                Rng rng = Rng::substream(master, static_cast<std::uint64_t>(rep));
                const std::vector<PathRecord> path =
                    sample_aggregate_series(config, rng);
                std::vector<double> data;
                data.reserve(path.size());
                for (const PathRecord& rec : path) {
                    if (rec.t >= 1) {
                        data.push_back(rec.s_total);
                    }
                }
                RepOutcome outcome{false, {}};
                try {
                    const EstimateResult est =
                        estimator == Estimator::moments
                            ? solve_moments(sample_moments(data), truth.theta,
                                            options)
                            : solve_moments_autocov(data, truth.theta, options);
                    if (est.converged) {
                        outcome.ok = true;
                        outcome.est = {est.alpha_hat, est.mu_hat,
                                       est.sigma2_hat, est.mu_prime_hat,
                                       est.s2_hat};
                    }
                } catch (const std::invalid_argument&) {
                } catch (const std::range_error&) {
                }
                outcomes.push_back(outcome);
            }
            return outcomes;
        };

        const auto blocks =
            run_blocks<std::vector<RepOutcome>>(reps, 64, threads, block);

        std::int64_t kept = 0;
        std::array<double, ReplicationReport::n_rows> sum{};
        std::array<double, ReplicationReport::n_rows> sum_sq_err{};
        for (const auto& outcomes : blocks) {
            for (const RepOutcome& outcome : outcomes) {
                if (!outcome.ok) {
                    continue;
                }
                ++kept;
                for (int row = 0; row < ReplicationReport::n_rows; ++row) {
                    sum[row] += outcome.est[row];
                    const double err = outcome.est[row] - truth_values[row];
                    sum_sq_err[row] += err * err;
                }
            }
        }
        report.excluded.push_back(reps - kept);
        for (int row = 0; row < ReplicationReport::n_rows; ++row) {
            ReplicationCell cell{kNan, kNan, kNan};
            if (kept > 0) {
                cell.mean_estimate = sum[row] / static_cast<double>(kept);
                cell.deviation = cell.mean_estimate - truth_values[row];
                cell.mse = sum_sq_err[row] / static_cast<double>(kept);
            }
            report.cells[row].push_back(cell);
        }
    }
    return report;
}

}  // namespace ruinkit
