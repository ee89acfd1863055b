#include "ruinkit/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ruinkit {

namespace {

constexpr double kExpArgMax = 700.0;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require(bool condition, const char* message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(alpha) && alpha > -1.0 && alpha < 1.0,
            "ModelParams: alpha must lie strictly inside (-1, 1)");
    require(std::isfinite(mu), "ModelParams: mu must be finite");
    require(std::isfinite(sigma2) && sigma2 >= 0.0,
            "ModelParams: sigma2 must be >= 0");
    require(std::isfinite(theta) && theta > 0.0,
            "ModelParams: theta must be > 0");
}

StationaryLaw stationary_law(const ModelParams& params) {
    params.validate();
    return {params.mu / (1.0 - params.alpha),
            params.sigma2 / (1.0 - params.alpha * params.alpha)};
}

double checked_exp(double x) {
    if (x > kExpArgMax) {
        throw std::range_error("exponent argument " + std::to_string(x) +
                               " exceeds the overflow guard (700)");
    }
    return std::exp(x);
}

double lambda_moment(const ModelParams& params, int n) {
    if (n < 0) {
        throw std::invalid_argument("lambda_moment: n must be >= 0");
    }
    const StationaryLaw law = stationary_law(params);
    const double nd = static_cast<double>(n);
    return checked_exp(nd * law.mean_y + 0.5 * nd * nd * law.var_y);
}

double mean_s(const ModelParams& params, int t) {
    if (t < 0) {
        throw std::invalid_argument("mean_s: t must be >= 0");
    }
    return params.theta * (lambda_moment(params, 1) + static_cast<double>(t));
}

double var_s(const ModelParams& params, int t) {
    if (t < 0) {
        throw std::invalid_argument("var_s: t must be >= 0");
    }
    const double l1 = lambda_moment(params, 1);
    const double l2 = lambda_moment(params, 2);
    const double th2 = params.theta * params.theta;
    return 2.0 * th2 * (l1 + static_cast<double>(t)) + th2 * (l2 - l1 * l1);
}

double third_moment_s(const ModelParams& params, int t) {
    if (t < 0) {
        throw std::invalid_argument("third_moment_s: t must be >= 0");
    }
    const double l1 = lambda_moment(params, 1);
    const double l2 = lambda_moment(params, 2);
    const double l3 = lambda_moment(params, 3);
    const double td = static_cast<double>(t);
    const double th3 = params.theta * params.theta * params.theta;
    // E(S^3 | rate) = 6 th^3 rate + 6 th^3 rate^2 + th^3 rate^3, rate = L + t
    const double rate1 = l1 + td;
    const double rate2 = l2 + 2.0 * td * l1 + td * td;
    const double rate3 = l3 + 3.0 * td * l2 + 3.0 * td * td * l1 + td * td * td;
    return th3 * (6.0 * rate1 + 6.0 * rate2 + rate3);
}

double third_moment_s_printed(const ModelParams& params, int t) {
    if (t < 0) {
        throw std::invalid_argument("third_moment_s_printed: t must be >= 0");
    }
    const StationaryLaw law = stationary_law(params);
    const double mp = law.mean_y;
    const double s2 = law.var_y;
    const double td = static_cast<double>(t);
    const double th3 = params.theta * params.theta * params.theta;
    return th3 * (6.0 * td + 6.0 * td * td + td * td * td) +
           3.0 * th3 * (2.0 * td + td * td) * checked_exp(mp + 0.5 * s2) +
           3.0 * th3 * td * checked_exp(2.0 * mp + 4.0 * s2) +
           th3 * checked_exp(3.0 * mp + 4.5 * s2);
}

MomentSet moments_s(const ModelParams& params, int t) {
    const double m1 = mean_s(params, t);
    return {t, m1, var_s(params, t) + m1 * m1, third_moment_s(params, t)};
}

double mgf_claim(double r, double theta) {
    if (!(theta > 0.0)) {
        throw std::invalid_argument("mgf_claim: theta must be > 0");
    }
    if (!(r < 1.0 / theta)) {
        throw std::domain_error("mgf_claim: undefined for r >= 1/theta");
    }
    return 1.0 / (1.0 - r * theta);
}

SeriesEval exp_lambda_series(const ModelParams& params, double z, int truncation) {
    if (truncation < 0) {
        throw std::invalid_argument("exp_lambda_series: truncation must be >= 0");
    }
    const StationaryLaw law = stationary_law(params);
    const double mp = law.mean_y;
    const double s2 = law.var_y;

    SeriesEval eval;
    eval.z = z;
    eval.truncation_order = truncation;
    eval.partial_sums.resize(static_cast<std::size_t>(truncation) + 1);
    eval.terms.resize(static_cast<std::size_t>(truncation) + 1);
    eval.term_ratios.resize(static_cast<std::size_t>(truncation) + 1);

    double term = 1.0;
    double sum = 1.0;
    eval.terms[0] = term;
    eval.partial_sums[0] = sum;
    for (int n = 0; n <= truncation; ++n) {
        const double ratio =
            z * std::exp(mp + (2.0 * n + 1.0) * 0.5 * s2) / (n + 1.0);
        eval.term_ratios[static_cast<std::size_t>(n)] = ratio;
        if (n < truncation) {
            term *= ratio;  // saturates to +-inf past ~exp(709); reported, not thrown
            sum += term;
            eval.terms[static_cast<std::size_t>(n) + 1] = term;
            eval.partial_sums[static_cast<std::size_t>(n) + 1] = sum;
        }
    }
    eval.last_term_ratio = eval.term_ratios.back();

    const auto& ratios = eval.term_ratios;
    const std::size_t count = ratios.size();
    bool growing = std::abs(ratios.back()) > 1.0;
    for (std::size_t k = count >= 3 ? count - 3 : 0; growing && k + 1 < count; ++k) {
        growing = std::abs(ratios[k]) < std::abs(ratios[k + 1]);
    }
    eval.divergence_flag = growing;
    return eval;
}

double exp_lambda_quadrature(const ModelParams& params, double z) {
    const StationaryLaw law = stationary_law(params);
    if (z > 0.0) {
        throw std::domain_error(
            "exp_lambda_quadrature: E[exp(z*L)] is infinite for z > 0");
    }
    if (z == 0.0) {
        return 1.0;
    }
    const double mp = law.mean_y;
    const double sd = std::sqrt(law.var_y);
    if (sd == 0.0) {
        return std::exp(z * checked_exp(mp));  // point mass at exp(mu')
    }
    const double inv_sd = 1.0 / sd;
    auto integrand = [&](double y) {
        const double u = (y - mp) * inv_sd;
        return std::exp(z * std::exp(y)) * kInvSqrt2Pi * inv_sd *
               std::exp(-0.5 * u * u);
    };
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 15>::integrate(integrand, mp - 10.0 * sd,
                                                mp + 10.0 * sd, 15, 1e-10);
}

MgfSEval mgf_s(const ModelParams& params, double r, int t, int truncation) {
    if (t < 0) {
        throw std::invalid_argument("mgf_s: t must be >= 0");
    }
    const double z = mgf_claim(r, params.theta) - 1.0;
    MgfSEval out;
    out.z = z;
    out.prefactor = checked_exp(static_cast<double>(t) * z);
    if (z <= 0.0) {
        out.used_quadrature = true;
        out.divergence_flag = false;
        out.value = out.prefactor * exp_lambda_quadrature(params, z);
    } else {
        out.used_quadrature = false;
        out.series = exp_lambda_series(params, z, truncation);
        out.divergence_flag = out.series->divergence_flag;
        out.value = out.prefactor * out.series->value();
    }
    return out;
}

}  // namespace ruinkit
