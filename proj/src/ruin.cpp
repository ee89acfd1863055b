#include "ruinkit/ruin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ruinkit/parallel.hpp"
#include "ruinkit/rng.hpp"

namespace ruinkit {

namespace {

void check_premium(double c, double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("theta must be > 0");
    }
    if (!std::isfinite(c) || !(c > theta)) {
        throw std::domain_error(
            "no positive adjustment coefficient: requires premium c > theta "
            "(got c = " + std::to_string(c) + ", theta = " +
            std::to_string(theta) + ")");
    }
}

void check_u_grid(const std::vector<double>& u_grid) {
    if (u_grid.empty()) {
        throw std::invalid_argument("u_grid must be nonempty");
    }
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        if (!std::isfinite(u_grid[i]) || u_grid[i] < 0.0) {
            throw std::invalid_argument("u_grid values must be finite and >= 0");
        }
        if (i > 0 && !(u_grid[i] > u_grid[i - 1])) {
            throw std::invalid_argument("u_grid must be strictly increasing");
        }
    }
}

}  // namespace

double net_profit_min_premium(const ModelParams& params) {
    return params.theta * lambda_moment(params, 1);
}

AdjustmentCoefficient adjustment_coefficient_closed(double c, double theta) {
    check_premium(c, theta);
    const double r = (c - theta) / (c * theta);
    const double residual = std::abs(mgf_claim(r, theta) - 1.0 - r * c);
    return {r, RootMethod::closed_form, 0, residual};
}

AdjustmentCoefficient adjustment_coefficient_newton(
    const std::function<double(double)>& claim_mgf, double c, double theta,
    const NewtonOptions& options) {
    check_premium(c, theta);
    if (options.max_iterations < 1) {
        throw std::invalid_argument("NewtonOptions: max_iterations must be >= 1");
    }
    auto g = [&](double r) { return claim_mgf(r) - 1.0 - r * c; };

    // g(0) = 0 and g'(0) = E[X] - c < 0, so the positive root sits between a
    // point where g < 0 and one where g > 0. Probe down from the start point
    // for the negative side, then up toward 1/theta for the positive side.
    const double hi_limit = 1.0 / theta;
    double lo = 0.5 * (c - theta) / (c * theta);
    bool found = false;
    for (int k = 0; k < 64 && !found; ++k, lo *= 0.5) {
        found = g(lo) < 0.0;
    }
    if (!found) {
        throw std::domain_error(
            "no positive adjustment coefficient: g(r) = M_x(r) - 1 - rc has "
            "no sign change on (0, 1/theta)");
    }
    lo *= 2.0;  // undo the post-increment halving of the successful probe

    double hi = lo;
    found = false;
    for (int k = 0; k < 64 && !found; ++k) {
        hi = hi_limit - (hi_limit - hi) * 0.5;
        found = g(hi) > 0.0;
    }
    if (!found) {
        throw std::domain_error(
            "no positive adjustment coefficient: g(r) = M_x(r) - 1 - rc has "
            "no sign change on (0, 1/theta)");
    }

    constexpr double kEps = std::numeric_limits<double>::epsilon();
    double r = 0.5 * (lo + hi);
    int iterations = 0;
    for (; iterations < options.max_iterations; ++iterations) {
        const double gr = g(r);
        if (gr == 0.0) {
            return {r, RootMethod::newton, iterations + 1, 0.0};
        }
        if (gr < 0.0) {
            lo = r;
        } else {
            hi = r;
        }
        if (hi - lo <= 4.0 * kEps * std::max(1.0, hi)) {
            break;
        }
        const double h =
            std::min({1e-7 * (1.0 + r), 0.25 * (hi - r), 0.25 * (r - lo)});
        double next = std::numeric_limits<double>::quiet_NaN();
        if (h > 0.0) {
            const double slope = (g(r + h) - g(r - h)) / (2.0 * h);
            next = r - gr / slope;
        }
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        if (next == r) {
            break;
        }
        r = next;
    }
    if (iterations >= options.max_iterations) {
        throw std::runtime_error(
            "adjustment_coefficient_newton: no convergence after " +
            std::to_string(options.max_iterations) +
            " iterations; last iterate r = " + std::to_string(r));
    }
    return {r, RootMethod::newton, iterations + 1, std::abs(g(r))};
}

BoundReport lundberg_bound(const ModelParams& params, double c,
                           const std::vector<double>& u_grid, int truncation) {
    params.validate();
    check_u_grid(u_grid);
    if (truncation < 0) {
        throw std::invalid_argument("lundberg_bound: truncation must be >= 0");
    }
    check_premium(c, params.theta);

    BoundReport report;
    report.r = adjustment_coefficient_closed(c, params.theta);
    report.z = c / params.theta - 1.0;
    report.series = exp_lambda_series(params, report.z, truncation);
    report.c_n = report.series.value();
    report.u_grid = u_grid;
    report.bound_values.reserve(u_grid.size());
    for (double u : u_grid) {
        report.bound_values.push_back(std::exp(-report.r.r_value * u) *
                                      report.c_n);
    }
    report.divergence_warning = report.series.divergence_flag;
    report.net_profit_warning = !(c > net_profit_min_premium(params));
    return report;
}

MgfIdentityCheck mgf_identity_check(const ModelParams& params, double u,
                                    double c, double r, int t,
                                    std::int64_t reps, std::uint64_t seed,
                                    int threads) {
    params.validate();
    if (!(r < 0.0)) {
        throw std::domain_error(
            "mgf_identity_check: requires r < 0 (the right side is divergent "
            "otherwise)");
    }
    if (t < 1) {
        throw std::invalid_argument("mgf_identity_check: t must be >= 1");
    }
    if (reps < 2) {
        throw std::invalid_argument("mgf_identity_check: reps must be >= 2");
    }

    const double z = mgf_claim(r, params.theta) - 1.0;
    const double closed = std::exp(-r * (u + c * static_cast<double>(t))) *
                          std::exp(static_cast<double>(t) * z) *
                          exp_lambda_quadrature(params, z);

    SimConfig config;
    config.params = params;
    config.horizon = t;
    config.init_mode = InitMode::stationary_draw;
    config.sampling_mode = SamplingMode::marginal;

    struct Sums {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    auto block = [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        Sums sums;
        for (std::int64_t rep = begin; rep < end; ++rep) {
            Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(rep));
            const LambdaPath path = sample_lambda_path(config, rng);
            const LatentPoint& last = path.points.back();
            const ClaimDraw draw =
                sample_claims_at(last.t, last.lambda, params.theta, rng);
            const double surplus =
                u + c * static_cast<double>(t) - draw.s_total;
            const double v = std::exp(-r * surplus);
            sums.sum += v;
            sums.sum_sq += v * v;
        }
        return sums;
    };
    const auto blocks = run_blocks<Sums>(reps, 4096, threads, block);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const Sums& s : blocks) {
        sum += s.sum;
        sum_sq += s.sum_sq;
    }
    const double nd = static_cast<double>(reps);
    const double mean = sum / nd;
    const double var = std::max(0.0, sum_sq / nd - mean * mean);
    const double se = std::sqrt(var / nd);

    MgfIdentityCheck check;
    check.mc_value = mean;
    check.mc_se = se;
    check.closed_value = closed;
    check.standardized_diff =
        se > 0.0 ? (mean - closed) / se
                 : (mean == closed
                        ? 0.0
                        : std::numeric_limits<double>::infinity());
    check.r = r;
    check.t = t;
    check.reps = reps;
    return check;
}

BoundReport bound_vs_mc_report(const ModelParams& params, double c,
                               const std::vector<double>& u_grid,
                               const McComparisonOptions& options) {
    BoundReport report = lundberg_bound(params, c, u_grid, options.truncation);
    if (options.horizon < 1) {
        throw std::invalid_argument("bound_vs_mc_report: horizon must be >= 1");
    }
    if (options.reps < 100) {
        throw std::invalid_argument("bound_vs_mc_report: reps must be >= 100");
    }
    if (!(options.fit_window_low > 0.0) ||
        !(options.fit_window_high > options.fit_window_low) ||
        !(options.fit_window_high < 1.0)) {
        throw std::invalid_argument(
            "bound_vs_mc_report: fit window must satisfy 0 < low < high < 1");
    }

    SimConfig config;
    config.params = params;
    config.horizon = options.horizon;
    config.init_mode = options.init_mode;
    config.sampling_mode = SamplingMode::cumulative;
    config.seed = options.seed;

    // One loss sample shared across the grid: common random numbers make
    // psi_hat monotone in u.
    const std::vector<double> losses =
        sample_max_losses(config, c, options.reps, options.threads);
    report.mc_comparison.reserve(u_grid.size());
    for (double u : u_grid) {
        report.mc_comparison.push_back(
            ruin_estimate_from_losses(losses, u, c, options.horizon));
    }

    report.fitted_slope = fit_log_slope(report.mc_comparison,
                                        options.fit_window_low,
                                        options.fit_window_high);
    return report;
}

std::optional<double> fit_log_slope(const std::vector<RuinEstimate>& estimates,
                                    double low, double high) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const RuinEstimate& est : estimates) {
        if (est.psi_hat > low && est.psi_hat < high) {
            xs.push_back(est.u);
            ys.push_back(std::log(est.psi_hat));
        }
    }
    if (xs.size() < 3) {
        return std::nullopt;
    }
    const double nd = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= nd;
    mean_y /= nd;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    if (!(sxx > 0.0)) {
        return std::nullopt;
    }
    return sxy / sxx;
}

}  // namespace ruinkit
