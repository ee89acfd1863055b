// Acceptance suite. Ten numbered criteria, one PASS/FAIL line each, exit
// status 0 only when every criterion holds. Tolerances and runtime budgets
// are pinned inline next to the checks they govern.
//
// Criteria 4 and 10 drive the command-line binary (path injected via the
// RUINKIT_CLI_PATH compile definition); everything else exercises the
// library API directly, with Monte Carlo references drawn from the
// independent std::mt19937_64 oracle in oracles.hpp.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ruinkit/estimate.hpp"
#include "ruinkit/model.hpp"
#include "ruinkit/ruin.hpp"
#include "ruinkit/simulate.hpp"

namespace fs = std::filesystem;

namespace {

const ruinkit::ModelParams kBase{0.6, 0.8, 0.4, 0.5};   // mu' = 2, s'^2 = 0.625
const ruinkit::ModelParams kMild{0.3, 0.2, 0.2, 0.5};   // light-tailed regime

int failures = 0;

void report(int index, bool ok, const std::string& detail) {
    std::printf("[%2d] %s  %s\n", index, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

std::string fmt(double x, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

// ---- CLI plumbing ----------------------------------------------------------

fs::path scratch_file(const std::string& stem) {
    static int counter = 0;
    std::ostringstream name;
    name << "ruinkit_accept_" << ++counter << "_" << stem;
    return fs::temp_directory_path() / name.str();
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(RUINKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    return out;
}

// ---- criteria --------------------------------------------------------------

// 1. Stationary anchor: at (alpha, mu, sigma2) = (0.6, 0.8, 0.4) the
//    stationary log-intensity mean is exactly 2 (0.8 and 0.4 are both
//    binary-exact, so 0.8/0.4 carries no rounding) and the variance is
//    0.4/0.64 = 0.625 to within 1e-15.
void criterion_1() {
    const ruinkit::StationaryLaw law = ruinkit::stationary_law(kBase);
    const bool mean_exact = law.mean_y == 2.0;
    const double var_err = std::fabs(law.var_y - 0.625);
    std::ostringstream d;
    d << "stationary anchor: mean_y " << (mean_exact ? "== 2 exactly" : "!= 2")
      << ", |var_y - 0.625| = " << fmt(var_err, 3) << " (tol 1e-15)";
    report(1, mean_exact && var_err <= 1e-15, d.str());
}

// 2. Closed-form marginal moments match an independent Monte Carlo oracle
//    (std::mt19937_64, gamma-summed claims) at the mild parameter point for
//    t in {1, 5, 10}: m1 within 3 SE, m2 and m3 within 5 SE, 2e6 paths,
//    under 120 s. The oracle run is shared with criterion 3, which reads
//    the t in {0, 1} slices of the same sample.
oracle::MomentOracle shared_oracle;

void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    shared_oracle =
        oracle::mc_marginal_moments(kMild, {0, 1, 5, 10}, 2000000, 1729);
    const double elapsed = seconds_since(start);

    const double se_mult[3] = {3.0, 5.0, 5.0};
    bool ok = elapsed <= 120.0;
    double worst = 0.0;
    for (std::size_t ti = 1; ti < 4; ++ti) {  // skip the t = 0 slice
        const int t = shared_oracle.ts[ti];
        const ruinkit::MomentSet m = ruinkit::moments_s(kMild, t);
        const double closed[3] = {m.m1, m.m2, m.m3};
        for (int j = 1; j <= 3; ++j) {
            const oracle::MomentStats mc = shared_oracle.moment(ti, j);
            const double z = std::fabs(closed[j - 1] - mc.mean) / mc.se;
            worst = std::max(worst, z / se_mult[j - 1]);
            ok = ok && z <= se_mult[j - 1];
        }
    }
    std::ostringstream d;
    d << "moment-oracle equivalence (t in {1,5,10}, 2e6 paths): worst "
      << "|closed - MC| = " << fmt(worst * 100.0, 3)
      << "% of its SE budget (m1: 3 SE, m2/m3: 5 SE), " << fmt(elapsed, 3)
      << " s (limit 120 s)";
    report(2, ok, d.str());
}

// 3. The transcribed third-moment formula is refuted by the same sample
//    that confirms the derived one: at t in {0, 1} the transcribed value
//    sits more than 10 SE from the Monte Carlo mean while the derived value
//    stays within 5 SE. The degenerate point (alpha = mu = sigma2 = 0,
//    theta = 1, t = 0) separates them exactly: 13 versus 1.
void criterion_3() {
    bool ok = true;
    double min_printed_gap = 1e300;
    double max_derived_gap = 0.0;
    for (std::size_t ti = 0; ti < 2; ++ti) {  // t = 0 and t = 1 slices
        const int t = shared_oracle.ts[ti];
        const oracle::MomentStats mc = shared_oracle.moment(ti, 3);
        const double printed_z =
            std::fabs(ruinkit::third_moment_s_printed(kMild, t) - mc.mean) /
            mc.se;
        const double derived_z =
            std::fabs(ruinkit::third_moment_s(kMild, t) - mc.mean) / mc.se;
        min_printed_gap = std::min(min_printed_gap, printed_z);
        max_derived_gap = std::max(max_derived_gap, derived_z);
        ok = ok && printed_z > 10.0 && derived_z <= 5.0;
    }
    const ruinkit::ModelParams degenerate{0.0, 0.0, 0.0, 1.0};
    const bool exact = ruinkit::third_moment_s(degenerate, 0) == 13.0 &&
                       ruinkit::third_moment_s_printed(degenerate, 0) == 1.0;
    ok = ok && exact;
    std::ostringstream d;
    d << "third-moment erratum (t in {0,1}): transcribed formula >= "
      << fmt(min_printed_gap, 4) << " SE from MC (required > 10), derived <= "
      << fmt(max_derived_gap, 3) << " SE (required <= 5); degenerate point "
      << (exact ? "13 vs 1 exact" : "13 vs 1 FAILED");
    report(3, ok, d.str());
}

// 4. Replication study through the CLI: 500 replications at n in
//    {5, 20, 50} under the (0.6, 0.8, 0.4, 0.5) truth. The replication
//    means of (mu', s'^2) at n = 50 fall within 0.25 / 0.35 of (2, 0.625),
//    both MSE columns decrease strictly in n, the markdown report carries
//    both two-column table blocks, all under 300 s. The alpha row is
//    reported, not asserted: the pooled moments identify only (mu', s'^2),
//    so alpha_hat tracks the solver start (reference replication mean from
//    the original study: 0.60063).
void criterion_4() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path md = scratch_file("table1.md");
    const fs::path csv = scratch_file("table1.csv");
    const int exit_code =
        run_cli("table1 --reps 500 --n-list 5,20,50 --seed 2 --out " +
                md.string() + " --csv-out " + csv.string());
    const double elapsed = seconds_since(start);

    bool ok = exit_code == 0 && elapsed <= 300.0;

    const std::string md_text = slurp(md);
    std::size_t blocks = 0;
    for (std::size_t pos = md_text.find("| para | t-v |");
         pos != std::string::npos;
         pos = md_text.find("| para | t-v |", pos + 1)) {
        ++blocks;
    }
    ok = ok && blocks == 2;

    // parameter,truth,n,estimation,deviation,mse with a textual first column
    std::vector<std::string> lines = split(slurp(csv), '\n');
    struct Row {
        double n, estimation, mse;
    };
    auto rows_for = [&lines](const std::string& name) {
        std::vector<Row> out;
        for (const std::string& line : lines) {
            const std::vector<std::string> cells = split(line, ',');
            if (cells.size() == 6 && cells[0] == name) {
                out.push_back({std::stod(cells[2]), std::stod(cells[3]),
                               std::stod(cells[5])});
            }
        }
        return out;
    };
    auto mse_decreasing = [](const std::vector<Row>& rows) {
        bool dec = rows.size() == 3;
        for (std::size_t i = 1; dec && i < rows.size(); ++i) {
            dec = rows[i].n > rows[i - 1].n && rows[i].mse < rows[i - 1].mse;
        }
        return dec;
    };
    const std::vector<Row> mu_prime = rows_for("mu_prime");
    const std::vector<Row> s2 = rows_for("s2");
    const std::vector<Row> alpha = rows_for("alpha");
    ok = ok && mse_decreasing(mu_prime) && mse_decreasing(s2) &&
         alpha.size() == 3;
    const double mu_err =
        mu_prime.size() == 3 ? std::fabs(mu_prime[2].estimation - 2.0) : 1e300;
    const double s2_err =
        s2.size() == 3 ? std::fabs(s2[2].estimation - 0.625) : 1e300;
    ok = ok && mu_err <= 0.25 && s2_err <= 0.35;

    std::ostringstream d;
    d << "replication study (CLI, 500 reps, n in {5,20,50}): |mean mu'(50) - "
         "2| = "
      << fmt(mu_err, 3) << " (tol 0.25), |mean s2(50) - 0.625| = "
      << fmt(s2_err, 3) << " (tol 0.35), both MSE columns strictly decreasing "
      << (mse_decreasing(mu_prime) && mse_decreasing(s2) ? "yes" : "NO")
      << ", table blocks " << blocks << "/2, " << fmt(elapsed, 3)
      << " s (limit 300 s); alpha_hat means (manifold-identified, recorded "
         "not asserted, reference 0.60063): ";
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        d << (i ? "/" : "") << fmt(alpha[i].estimation, 5);
    }
    report(4, ok, d.str());
    fs::remove(md);
    fs::remove(csv);
}

// 5. Feeding the solver its own exact time-averaged moments returns the
//    truth with residual norm <= 1e-10, and the residual is flat (spread
//    <= 1e-10) across five points of the solution manifold
//    { (a, 2(1-a), 0.625(1-a^2)) } that share (mu', s'^2) = (2, 0.625).
void criterion_5() {
    const ruinkit::MomentTriple targets =
        ruinkit::theoretical_time_averaged_moments(kBase, 50);
    const ruinkit::SampleMoments a{targets.a1, targets.a2, targets.a3, 50};

    ruinkit::SolveOptions at_truth;
    at_truth.alpha0 = kBase.alpha;
    at_truth.mu0 = kBase.mu;
    at_truth.sigma20 = kBase.sigma2;
    const ruinkit::EstimateResult fixed_point =
        ruinkit::solve_moments(a, kBase.theta, at_truth);

    const double manifold_alphas[5] = {-0.5, 0.0, 0.3, 0.6, 0.9};
    double res_min = 1e300, res_max = 0.0, moment_mismatch = 0.0;
    bool all_converged = true;
    for (double alpha : manifold_alphas) {
        const ruinkit::ModelParams point{alpha, 2.0 * (1.0 - alpha),
                                         0.625 * (1.0 - alpha * alpha),
                                         kBase.theta};
        const ruinkit::MomentTriple at_point =
            ruinkit::theoretical_time_averaged_moments(point, 50);
        moment_mismatch = std::max(
            moment_mismatch,
            std::max(std::fabs(at_point.a1 - targets.a1) / targets.a1,
                     std::max(std::fabs(at_point.a2 - targets.a2) / targets.a2,
                              std::fabs(at_point.a3 - targets.a3) /
                                  targets.a3)));
        ruinkit::SolveOptions from_point;
        from_point.alpha0 = point.alpha;
        from_point.mu0 = point.mu;
        from_point.sigma20 = point.sigma2;
        const ruinkit::EstimateResult est =
            ruinkit::solve_moments(a, kBase.theta, from_point);
        all_converged = all_converged && est.converged;
        res_min = std::min(res_min, est.residual_norm);
        res_max = std::max(res_max, est.residual_norm);
    }
    const bool ok = fixed_point.converged &&
                    fixed_point.residual_norm <= 1e-10 && all_converged &&
                    res_max <= 1e-10 && (res_max - res_min) <= 1e-10 &&
                    moment_mismatch <= 1e-12;
    std::ostringstream d;
    d << "exact-moment fixed point: residual " << fmt(fixed_point.residual_norm, 3)
      << " (tol 1e-10); manifold residual spread "
      << fmt(res_max - res_min, 3) << " over 5 alpha points (tol 1e-10), "
      << "max moment mismatch " << fmt(moment_mismatch, 3) << " (tol 1e-12)";
    report(5, ok, d.str());
}

// 6. Newton and the closed form agree on the adjustment coefficient to
//    1e-12 over a 3x3 grid of theta in {0.25, 0.5, 1.0} and c/theta in
//    {1.5, 2, 4}; the boundary c = theta is rejected by both routes.
void criterion_6() {
    double worst = 0.0;
    bool ok = true;
    for (double theta : {0.25, 0.5, 1.0}) {
        for (double ratio : {1.5, 2.0, 4.0}) {
            const double c = ratio * theta;
            const double closed =
                ruinkit::adjustment_coefficient_closed(c, theta).r_value;
            const double newton =
                ruinkit::adjustment_coefficient_newton(
                    [theta](double r) { return ruinkit::mgf_claim(r, theta); },
                    c, theta)
                    .r_value;
            worst = std::max(worst, std::fabs(newton - closed));
        }
    }
    ok = ok && worst <= 1e-12;
    bool closed_rejects = false, newton_rejects = false;
    try {
        ruinkit::adjustment_coefficient_closed(0.5, 0.5);
    } catch (const std::domain_error&) {
        closed_rejects = true;
    }
    try {
        ruinkit::adjustment_coefficient_newton(
            [](double r) { return ruinkit::mgf_claim(r, 0.5); }, 0.5, 0.5);
    } catch (const std::domain_error&) {
        newton_rejects = true;
    }
    ok = ok && closed_rejects && newton_rejects;
    std::ostringstream d;
    d << "adjustment coefficient: max |Newton - closed| = " << fmt(worst, 3)
      << " over 9-point grid (tol 1e-12); c = theta rejected by "
      << (closed_rejects && newton_rejects ? "both routes" : "NOT both routes");
    report(6, ok, d.str());
}

// 7. Surplus-transform identity: at the mild point with u = 2, c = 1.2,
//    r = -0.5, t = 5, the Monte Carlo mean of e^{-r U(t)} over 1e6 paths
//    lands within 3 standard errors of the closed form, under 60 s.
void criterion_7() {
    const auto start = std::chrono::steady_clock::now();
    const ruinkit::MgfIdentityCheck check =
        ruinkit::mgf_identity_check(kMild, 2.0, 1.2, -0.5, 5, 1000000, 7);
    const double elapsed = seconds_since(start);
    const bool ok = std::fabs(check.standardized_diff) <= 3.0 &&
                    elapsed <= 60.0;
    std::ostringstream d;
    d << "surplus-transform identity (r = -0.5, t = 5, 1e6 paths): |MC - "
         "closed| = "
      << fmt(std::fabs(check.standardized_diff), 3) << " SE (tol 3), "
      << fmt(elapsed, 3) << " s (limit 60 s)";
    report(7, ok, d.str());
}

// 8. Exponential ruin bound versus finite-horizon Monte Carlo at the mild
//    point with premium c = 1.5 x the net-profit minimum (R ~ 1.10231):
//    every grid estimate respects psi_hat <= e^{-Ru} C_10, and the fitted
//    log-slope is at most -0.8 R, with horizon 100 and 2e5 replications
//    per grid point, under 180 s.
void criterion_8() {
    const auto start = std::chrono::steady_clock::now();
    const double c = 1.5 * ruinkit::net_profit_min_premium(kMild);
    std::vector<double> grid;
    for (double u = 0.5; u <= 6.0 + 1e-9; u += 0.5) {
        grid.push_back(u);
    }
    ruinkit::McComparisonOptions options;
    options.horizon = 100;
    options.reps = 200000;
    options.truncation = 10;
    options.seed = 60601;
    const ruinkit::BoundReport rep =
        ruinkit::bound_vs_mc_report(kMild, c, grid, options);
    const double elapsed = seconds_since(start);

    bool dominated = true;
    double closest = 1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dominated =
            dominated && rep.mc_comparison[i].psi_hat <= rep.bound_values[i];
        if (rep.mc_comparison[i].psi_hat > 0.0) {
            closest = std::min(
                closest, rep.bound_values[i] / rep.mc_comparison[i].psi_hat);
        }
    }
    const double slope_cap = -0.8 * rep.r.r_value;
    const bool slope_ok =
        rep.fitted_slope.has_value() && *rep.fitted_slope <= slope_cap;
    const bool ok = dominated && slope_ok && elapsed <= 180.0;
    std::ostringstream d;
    d << "ruin bound vs MC (c = 1.5 x net-profit min, R = "
      << fmt(rep.r.r_value, 6) << "): bound holds at all " << grid.size()
      << " grid points (min bound/psi_hat = " << fmt(closest, 3)
      << "), fitted slope "
      << (rep.fitted_slope ? fmt(*rep.fitted_slope, 4) : std::string("none"))
      << " <= " << fmt(slope_cap, 4) << " "
      << (slope_ok ? "yes" : "NO") << ", " << fmt(elapsed, 3)
      << " s (limit 180 s)";
    report(8, ok, d.str());
}

// 9. Series diagnostics at the divergent point z = 11 (the c = 6 premium
//    under the base parameters): the divergence flag is raised by N = 20,
//    partial sums increase strictly, and the closed-form term ratios match
//    direct term division to 1e-12 relative.
void criterion_9() {
    const ruinkit::SeriesEval series =
        ruinkit::exp_lambda_series(kBase, 11.0, 20);
    bool increasing = true;
    for (std::size_t n = 1; n < series.partial_sums.size(); ++n) {
        increasing =
            increasing && series.partial_sums[n] > series.partial_sums[n - 1];
    }
    double worst_ratio_err = 0.0;
    for (std::size_t n = 0; n + 1 < series.terms.size(); ++n) {
        const double direct = series.terms[n + 1] / series.terms[n];
        worst_ratio_err =
            std::max(worst_ratio_err,
                     std::fabs(series.term_ratios[n] - direct) / direct);
    }
    const bool ok = series.divergence_flag && increasing &&
                    worst_ratio_err <= 1e-12;
    std::ostringstream d;
    d << "series diagnostics (z = 11, N = 20): divergence flag "
      << (series.divergence_flag ? "raised" : "NOT raised")
      << ", partial sums strictly increasing " << (increasing ? "yes" : "NO")
      << ", max term-ratio mismatch " << fmt(worst_ratio_err, 3)
      << " (tol 1e-12)";
    report(9, ok, d.str());
}

// 10. Determinism contract through the CLI: identical invocations produce
//     byte-identical output files, and the threaded ruin estimator yields
//     the same bytes at --threads 1 and --threads 4.
void criterion_10() {
    const fs::path sim_a = scratch_file("sim_a.csv");
    const fs::path sim_b = scratch_file("sim_b.csv");
    bool ok = run_cli("simulate --horizon 50 --seed 123 --out " +
                      sim_a.string()) == 0 &&
              run_cli("simulate --horizon 50 --seed 123 --out " +
                      sim_b.string()) == 0;
    const bool sim_equal = slurp(sim_a) == slurp(sim_b) && !slurp(sim_a).empty();

    const std::string ruin_args =
        "ruin-mc --c 6 --horizon 30 --reps 5000 --seed 9 --u-grid 0:5:1 ";
    const fs::path ruin_1 = scratch_file("ruin_t1.csv");
    const fs::path json_1 = scratch_file("ruin_t1.json");
    const fs::path ruin_4 = scratch_file("ruin_t4.csv");
    const fs::path json_4 = scratch_file("ruin_t4.json");
    ok = ok &&
         run_cli(ruin_args + "--threads 1 --out " + ruin_1.string() +
                 " --json-out " + json_1.string()) == 0 &&
         run_cli(ruin_args + "--threads 4 --out " + ruin_4.string() +
                 " --json-out " + json_4.string()) == 0;
    const bool ruin_equal = slurp(ruin_1) == slurp(ruin_4) &&
                            slurp(json_1) == slurp(json_4) &&
                            !slurp(ruin_1).empty();
    ok = ok && sim_equal && ruin_equal;
    std::ostringstream d;
    d << "determinism: repeated simulate runs byte-identical "
      << (sim_equal ? "yes" : "NO")
      << "; ruin-mc --threads 1 vs --threads 4 byte-identical (CSV and JSON) "
      << (ruin_equal ? "yes" : "NO");
    report(10, ok, d.str());
    for (const fs::path& p : {sim_a, sim_b, ruin_1, json_1, ruin_4, json_4}) {
        fs::remove(p);
    }
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures > 0) {
        std::printf("%d of 10 acceptance criteria failed\n", failures);
        return 1;
    }
    std::printf("all 10 acceptance criteria passed\n");
    return 0;
}
