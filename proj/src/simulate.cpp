#include "ruinkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ruinkit/parallel.hpp"

namespace ruinkit {

namespace {

constexpr double kYOverflow = 700.0;
constexpr double kZ975 = 1.959963984540054;

// Poisson(rate) claims summed as exponentials; rate may be zero
// (cumulative increments clamp to zero when the mean rate decreases).
ClaimDraw draw_claims(Rng& rng, double rate, double theta) {
    ClaimDraw draw{rng.poisson(rate), 0.0};
    for (std::int64_t i = 0; i < draw.n_claims; ++i) {
        draw.s_total += rng.exponential(theta);
    }
    return draw;
}

}  // namespace

void SimConfig::validate() const {
    params.validate();
    if (horizon < 1) {
        throw std::invalid_argument("SimConfig: horizon must be >= 1");
    }
    if (init_mode == InitMode::fixed && !std::isfinite(y0)) {
        throw std::invalid_argument("SimConfig: fixed init value must be finite");
    }
}

double SimConfig::resolve_y0(Rng& rng) const {
    switch (init_mode) {
        case InitMode::fixed:
            return y0;
        case InitMode::stationary_mean:
            return params.mu / (1.0 - params.alpha);
        case InitMode::stationary_draw: {
            const StationaryLaw law = stationary_law(params);
            return rng.normal(law.mean_y, std::sqrt(law.var_y));
        }
    }
    throw std::logic_error("SimConfig: unknown init mode");
}

LambdaPath sample_lambda_path(const SimConfig& config, Rng& rng) {
    config.validate();
    LambdaPath path;
    path.y0 = config.resolve_y0(rng);
    path.points.reserve(static_cast<std::size_t>(config.horizon));
    const double sd = std::sqrt(config.params.sigma2);
    double y = path.y0;
    for (int t = 1; t <= config.horizon; ++t) {
        y = config.params.alpha * y + rng.normal(config.params.mu, sd);
        if (y > kYOverflow) {
            throw std::range_error("latent intensity overflow: ln Lambda_" +
                                   std::to_string(t) + " = " + std::to_string(y) +
                                   " exceeds 700; path aborted");
        }
        path.points.push_back({t, y, std::exp(y)});
    }
    return path;
}

ClaimDraw sample_claims_at(int t, double lambda, double theta, Rng& rng) {
    if (t < 0) {
        throw std::invalid_argument("sample_claims_at: t must be >= 0");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("sample_claims_at: lambda must be > 0");
    }
    if (!(theta > 0.0)) {
        throw std::invalid_argument("sample_claims_at: theta must be > 0");
    }
    return draw_claims(rng, lambda + static_cast<double>(t), theta);
}

std::vector<PathRecord> sample_aggregate_series(const SimConfig& config, Rng& rng) {
    const LambdaPath latent = sample_lambda_path(config, rng);
    const double lambda0 = std::exp(latent.y0);
    std::vector<PathRecord> records;
    records.reserve(latent.points.size() + 1);

    if (config.sampling_mode == SamplingMode::marginal) {
        const ClaimDraw at0 = draw_claims(rng, lambda0, config.params.theta);
        records.push_back(
            {0, latent.y0, lambda0, at0.n_claims, at0.s_total, std::nullopt});
        for (const LatentPoint& p : latent.points) {
            const ClaimDraw draw = draw_claims(
                rng, p.lambda + static_cast<double>(p.t), config.params.theta);
            records.push_back(
                {p.t, p.y, p.lambda, draw.n_claims, draw.s_total, std::nullopt});
        }
        return records;
    }

    // Cumulative: S_0 = 0 at the anchor; increment means are
    // Delta(Lambda_t + t) clamped at zero, starting from rate Lambda_0 + 0.
    records.push_back({0, latent.y0, lambda0, 0, 0.0, std::nullopt});
    double prev_rate = lambda0;
    std::int64_t n_acc = 0;
    double s_acc = 0.0;
    for (const LatentPoint& p : latent.points) {
        const double rate = p.lambda + static_cast<double>(p.t);
        const double increment_mean = std::max(rate - prev_rate, 0.0);
        prev_rate = rate;
        const ClaimDraw draw = draw_claims(rng, increment_mean, config.params.theta);
        n_acc += draw.n_claims;
        s_acc += draw.s_total;
        records.push_back({p.t, p.y, p.lambda, n_acc, s_acc, std::nullopt});
    }
    return records;
}

std::vector<PathRecord> sample_surplus_path(const SimConfig& config, double u,
                                            double c, Rng& rng) {
    if (config.sampling_mode != SamplingMode::cumulative) {
        throw std::invalid_argument(
            "sample_surplus_path: requires cumulative sampling mode");
    }
    if (!(u >= 0.0)) {
        throw std::invalid_argument("sample_surplus_path: u must be >= 0");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("sample_surplus_path: c must be > 0");
    }
    std::vector<PathRecord> records = sample_aggregate_series(config, rng);
    for (PathRecord& rec : records) {
        rec.u_surplus = u + c * static_cast<double>(rec.t) - rec.s_total;
    }
    return records;
}

std::vector<double> sample_max_losses(const SimConfig& config, double c,
                                      std::int64_t reps, int threads) {
    config.validate();
    if (config.sampling_mode != SamplingMode::cumulative) {
        throw std::invalid_argument(
            "sample_max_losses: requires cumulative sampling mode");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("sample_max_losses: c must be > 0");
    }
    if (reps < 1) {
        throw std::invalid_argument("sample_max_losses: reps must be >= 1");
    }

    auto block = [&config, c](std::int64_t, std::int64_t begin, std::int64_t end) {
        std::vector<double> losses;
        losses.reserve(static_cast<std::size_t>(end - begin));
        for (std::int64_t r = begin; r < end; ++r) {
            Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r));
            const std::vector<PathRecord> path = sample_aggregate_series(config, rng);
            double worst = -std::numeric_limits<double>::infinity();
            for (const PathRecord& rec : path) {
                worst = std::max(worst, rec.s_total - c * static_cast<double>(rec.t));
            }
            losses.push_back(worst);
        }
        return losses;
    };

    const std::vector<std::vector<double>> blocks =
        run_blocks<std::vector<double>>(reps, 1024, threads, block);
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(reps));
    for (const auto& b : blocks) {
        losses.insert(losses.end(), b.begin(), b.end());
    }
    return losses;
}

RuinEstimate ruin_estimate_from_losses(const std::vector<double>& max_losses,
                                       double u, double c, int horizon) {
    if (max_losses.empty()) {
        throw std::invalid_argument("ruin_estimate_from_losses: no replications");
    }
    const auto reps = static_cast<std::int64_t>(max_losses.size());
    std::int64_t ruined = 0;
    for (double loss : max_losses) {
        if (loss > u) {
            ++ruined;
        }
    }
    const double p = static_cast<double>(ruined) / static_cast<double>(reps);
    const double half =
        kZ975 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    return {p,
            reps,
            std::max(0.0, p - half),
            std::min(1.0, p + half),
            u,
            c,
            horizon};
}

RuinEstimate estimate_ruin_probability(const SimConfig& config, double u,
                                       double c, std::int64_t reps, int threads) {
    if (reps < 100) {
        throw std::invalid_argument(
            "estimate_ruin_probability: reps must be >= 100");
    }
    if (!(u >= 0.0)) {
        throw std::invalid_argument("estimate_ruin_probability: u must be >= 0");
    }
    const std::vector<double> losses = sample_max_losses(config, c, reps, threads);
    return ruin_estimate_from_losses(losses, u, c, config.horizon);
}

}  // namespace ruinkit
