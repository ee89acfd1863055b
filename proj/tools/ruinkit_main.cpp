// Command-line front end: seeded, reproducible runs of the simulator, the
// moment formulas, the estimators, and the ruin-bound analysis. Every
// command is a pure function of (config file, flags, seed) to output bytes;
// --threads changes wall time only. Diagnostics go to stderr, data to
// files or stdout.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ruinkit/estimate.hpp"
#include "ruinkit/io.hpp"
#include "ruinkit/model.hpp"
#include "ruinkit/rng.hpp"
#include "ruinkit/ruin.hpp"
#include "ruinkit/simulate.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json load_config(const std::string& path) {
    if (path.empty()) {
        return ordered_json::object();
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    try {
        ordered_json cfg = ordered_json::parse(in);
        if (!cfg.is_object()) {
            throw std::runtime_error("config " + path +
                                     ": top level must be a JSON object");
        }
        return cfg;
    } catch (const nlohmann::json::parse_error& err) {
        throw std::runtime_error("config " + path + ": " + err.what());
    }
}

// Flags override config-file values, which override defaults.
template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const ordered_json& cfg,
       const char* key, const T& fallback) {
    if (opt != nullptr && opt->count() > 0) {
        return flag_value;
    }
    if (cfg.contains(key)) {
        try {
            return cfg.at(key).get<T>();
        } catch (const nlohmann::json::exception& err) {
            throw std::runtime_error(std::string("config key \"") + key +
                                     "\": " + err.what());
        }
    }
    return fallback;
}

ruinkit::InitMode parse_init_mode(const std::string& text) {
    if (text == "fixed") {
        return ruinkit::InitMode::fixed;
    }
    if (text == "stationary_mean") {
        return ruinkit::InitMode::stationary_mean;
    }
    if (text == "stationary_draw") {
        return ruinkit::InitMode::stationary_draw;
    }
    throw std::invalid_argument(
        "init mode must be fixed, stationary_mean, or stationary_draw; got '" +
        text + "'");
}

ruinkit::SamplingMode parse_sampling_mode(const std::string& text) {
    if (text == "marginal") {
        return ruinkit::SamplingMode::marginal;
    }
    if (text == "cumulative") {
        return ruinkit::SamplingMode::cumulative;
    }
    throw std::invalid_argument(
        "sampling mode must be marginal or cumulative; got '" + text + "'");
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << bytes;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed while writing output file: " + path);
    }
}

// Per-subcommand flag storage plus the loaded config; the o_* handles tell
// which flags were given explicitly.
struct Args {
    std::string config_path;
    double alpha = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double theta = 0.0;
    double c = 0.0;
    int horizon = 0;
    std::string init_mode;
    double y0 = 0.0;
    std::string sampling_mode;
    std::uint64_t seed = 0;
    std::int64_t reps = 0;
    int truncation = 0;
    std::string u_grid;
    std::string out = "-";
    std::string json_out;
    std::string csv_out;
    int threads = 1;

    std::string data_path;
    double alpha0 = 0.5;
    double mu0 = 0.5;
    double sigma20 = 0.5;
    int max_iterations = 200;
    bool use_autocov = false;
    bool multistart = false;
    bool paper_m3 = false;
    bool with_mc = false;
    std::vector<int> n_list;
    std::string estimator;

    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_mu = nullptr;
    CLI::Option* o_sigma2 = nullptr;
    CLI::Option* o_theta = nullptr;
    CLI::Option* o_c = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_init_mode = nullptr;
    CLI::Option* o_y0 = nullptr;
    CLI::Option* o_sampling = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_reps = nullptr;
    CLI::Option* o_truncation = nullptr;
    CLI::Option* o_u_grid = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_threads = nullptr;
    CLI::Option* o_data = nullptr;
    CLI::Option* o_n_list = nullptr;
    CLI::Option* o_estimator = nullptr;

    ordered_json cfg;

    void add_common(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "JSON config file; flags override file values");
        o_seed = cmd->add_option("--seed", seed, "master RNG seed (default 0)");
        o_out = cmd->add_option("--out", out,
                                "output path, '-' for stdout (default '-')");
        o_threads =
            cmd->add_option("--threads", threads,
                            "worker threads; changes wall time, never bytes")
                ->check(CLI::Range(1, 256));
    }

    void add_params(CLI::App* cmd) {
        o_alpha = cmd->add_option("--alpha", alpha,
                                  "AR coefficient in (-1,1) (default 0.6)");
        o_mu = cmd->add_option("--mu", mu, "innovation mean (default 0.8)");
        o_sigma2 = cmd->add_option("--sigma2", sigma2,
                                   "innovation variance >= 0 (default 0.4)");
        o_theta = cmd->add_option("--theta", theta,
                                  "mean claim size > 0 (default 0.5)");
    }

    void add_sim(CLI::App* cmd) {
        o_horizon = cmd->add_option("--horizon", horizon,
                                    "number of time steps (default 50)");
        o_init_mode = cmd->add_option(
            "--init-mode", init_mode,
            "ln Lambda_0: fixed | stationary_mean | stationary_draw "
            "(default stationary_mean)");
        o_y0 = cmd->add_option("--y0", y0,
                               "ln Lambda_0 value for --init-mode fixed");
    }

    void load() { cfg = load_config(config_path); }

    ruinkit::ModelParams params() const {
        ruinkit::ModelParams p;
        p.alpha = pick(o_alpha, alpha, cfg, "alpha", 0.6);
        p.mu = pick(o_mu, mu, cfg, "mu", 0.8);
        p.sigma2 = pick(o_sigma2, sigma2, cfg, "sigma2", 0.4);
        p.theta = pick(o_theta, theta, cfg, "theta", 0.5);
        p.validate();
        return p;
    }

    double premium() const {
        if ((o_c == nullptr || o_c->count() == 0) && !cfg.contains("c")) {
            throw std::invalid_argument(
                "premium required: pass --c or config key \"c\"");
        }
        return pick(o_c, c, cfg, "c", 0.0);
    }

    std::uint64_t seed_value() const {
        return pick(o_seed, seed, cfg, "seed", std::uint64_t{0});
    }
    int horizon_value(int fallback) const {
        return pick(o_horizon, horizon, cfg, "horizon", fallback);
    }
    std::string out_value() const {
        return pick(o_out, out, cfg, "out", std::string{"-"});
    }
    int threads_value() const {
        const int k = pick(o_threads, threads, cfg, "threads", 1);
        if (k < 1 || k > 256) {
            throw std::invalid_argument("threads must be in [1, 256]");
        }
        return k;
    }
    std::int64_t reps_value(std::int64_t fallback) const {
        return pick(o_reps, reps, cfg, "reps", fallback);
    }
    int truncation_value(int fallback) const {
        return pick(o_truncation, truncation, cfg, "truncation", fallback);
    }
    std::vector<double> u_grid_value(const std::string& fallback) const {
        return ruinkit::parse_u_grid(
            pick(o_u_grid, u_grid, cfg, "u_grid", fallback));
    }
    ruinkit::InitMode init_mode_value() const {
        return parse_init_mode(pick(o_init_mode, init_mode, cfg, "init_mode",
                                    std::string{"stationary_mean"}));
    }
    ruinkit::SamplingMode sampling_mode_value() const {
        return parse_sampling_mode(pick(o_sampling, sampling_mode, cfg,
                                        "sampling_mode",
                                        std::string{"marginal"}));
    }

    ruinkit::SimConfig sim_config(int default_horizon) const {
        ruinkit::SimConfig config;
        config.params = params();
        config.horizon = horizon_value(default_horizon);
        config.init_mode = init_mode_value();
        config.y0 = pick(o_y0, y0, cfg, "y0", 0.0);
        config.sampling_mode = sampling_mode_value();
        config.seed = seed_value();
        config.validate();
        return config;
    }

    ruinkit::SolveOptions solve_options() const {
        ruinkit::SolveOptions options;
        options.alpha0 = alpha0;
        options.mu0 = mu0;
        options.sigma20 = sigma20;
        options.multistart = multistart;
        options.max_iterations = max_iterations;
        return options;
    }
};

void run_simulate(Args& a) {
    a.load();
    ruinkit::SimConfig config = a.sim_config(50);
    ruinkit::Rng rng(config.seed);
    const std::vector<ruinkit::PathRecord> records =
        ruinkit::sample_aggregate_series(config, rng);
    std::ostringstream text;
    ruinkit::write_csv_row(text, {"t", "y", "lambda", "n_claims", "s_total"});
    for (const ruinkit::PathRecord& rec : records) {
        ruinkit::write_csv_row(text, {std::to_string(rec.t),
                                      ruinkit::format_double(rec.y),
                                      ruinkit::format_double(rec.lambda),
                                      std::to_string(rec.n_claims),
                                      ruinkit::format_double(rec.s_total)});
    }
    write_output(a.out_value(), text.str());
}

void run_moments(Args& a) {
    a.load();
    const ruinkit::ModelParams params = a.params();
    const int horizon = a.horizon_value(50);
    if (horizon < 0) {
        throw std::invalid_argument("horizon must be >= 0 for moments");
    }
    std::ostringstream text;
    std::vector<std::string> header = {"t", "m1", "m2", "m3"};
    if (a.paper_m3) {
        header.push_back("m3_printed");
    }
    ruinkit::write_csv_row(text, header);
    for (int t = 0; t <= horizon; ++t) {
        const ruinkit::MomentSet m = ruinkit::moments_s(params, t);
        std::vector<std::string> cells = {std::to_string(t),
                                          ruinkit::format_double(m.m1),
                                          ruinkit::format_double(m.m2),
                                          ruinkit::format_double(m.m3)};
        if (a.paper_m3) {
            cells.push_back(ruinkit::format_double(
                ruinkit::third_moment_s_printed(params, t)));
        }
        ruinkit::write_csv_row(text, cells);
    }
    write_output(a.out_value(), text.str());
}

void run_estimate(Args& a) {
    a.load();
    const std::string path =
        pick(a.o_data, a.data_path, a.cfg, "data", std::string{});
    if (path.empty()) {
        throw std::invalid_argument(
            "estimate: claim-series CSV required (positional argument or "
            "config key \"data\")");
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open data file: " + path);
    }
    const ruinkit::CsvTable table = ruinkit::read_numeric_csv(in, path);
    std::vector<double> series = ruinkit::csv_column(table, "s_total");
    bool has_t = false;
    for (const std::string& name : table.header) {
        has_t = has_t || name == "t";
    }
    if (has_t) {
        const std::vector<double> ts = ruinkit::csv_column(table, "t");
        std::vector<double> kept;
        kept.reserve(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (ts[i] >= 1.0) {
                kept.push_back(series[i]);
            }
        }
        series = std::move(kept);
    }
    const double theta = pick(a.o_theta, a.theta, a.cfg, "theta", 0.5);
    const ruinkit::SolveOptions options = a.solve_options();
    const ruinkit::EstimateResult result =
        a.use_autocov ? ruinkit::solve_moments_autocov(series, theta, options)
                      : ruinkit::solve_moments(
                            ruinkit::sample_moments(series), theta, options);
    if (!result.converged) {
        std::cerr << "ruinkit: notice: solver did not converge after "
                  << result.iterations << " iterations\n";
    }
    ordered_json summary;
    summary["alpha_hat"] = result.alpha_hat;
    summary["mu_hat"] = result.mu_hat;
    summary["sigma2_hat"] = result.sigma2_hat;
    summary["mu_prime_hat"] = result.mu_prime_hat;
    summary["s2_hat"] = result.s2_hat;
    summary["residual"] = result.residual_norm;
    summary["iterations"] = result.iterations;
    summary["converged"] = result.converged;
    summary["identifiability_note"] =
        result.identifiability_note
            ? "pooled moments determine only (mu_prime, s2); alpha_hat "
              "depends on the start point (use --use-autocov for an "
              "identifiable alpha)"
            : "";
    write_output(a.out_value(), summary.dump(2) + "\n");
}

void append_report_rows(std::ostringstream& md, std::ostringstream& csv,
                        const ruinkit::ReplicationReport& report,
                        const std::array<double, 5>& truths, int row_begin,
                        int row_end) {
    for (int row = row_begin; row < row_end; ++row) {
        md << "| " << ruinkit::ReplicationReport::row_names[row] << " | "
           << ruinkit::format_double(truths[row]) << " |";
        for (std::size_t ni = 0; ni < report.n_list.size(); ++ni) {
            const ruinkit::ReplicationCell& cell = report.cells[row][ni];
            md << ' ' << ruinkit::format_double(cell.mean_estimate) << " | "
               << ruinkit::format_double(cell.deviation) << " | "
               << ruinkit::format_double(cell.mse) << " |";
            ruinkit::write_csv_row(
                csv, {ruinkit::ReplicationReport::row_names[row],
                      ruinkit::format_double(truths[row]),
                      std::to_string(report.n_list[ni]),
                      ruinkit::format_double(cell.mean_estimate),
                      ruinkit::format_double(cell.deviation),
                      ruinkit::format_double(cell.mse)});
        }
        md << '\n';
    }
}

void run_table1(Args& a) {
    a.load();
    const ruinkit::ModelParams truth = a.params();
    const std::int64_t reps = a.reps_value(500);
    std::vector<int> n_list =
        pick(a.o_n_list, a.n_list, a.cfg, "n_list", std::vector<int>{5, 20, 50});
    const std::string estimator_name = pick(a.o_estimator, a.estimator, a.cfg,
                                            "estimator", std::string{"moments"});
    ruinkit::Estimator estimator;
    if (estimator_name == "moments") {
        estimator = ruinkit::Estimator::moments;
    } else if (estimator_name == "autocov") {
        estimator = ruinkit::Estimator::autocov;
    } else {
        throw std::invalid_argument(
            "estimator must be moments or autocov; got '" + estimator_name +
            "'");
    }

    const ruinkit::ReplicationReport report = ruinkit::replication_study(
        truth, n_list, reps, a.seed_value(), estimator, a.solve_options(),
        a.threads_value());

    for (std::size_t ni = 0; ni < report.n_list.size(); ++ni) {
        if (report.excluded[ni] > 0) {
            std::cerr << "ruinkit: notice: n=" << report.n_list[ni] << ": "
                      << report.excluded[ni]
                      << " replications excluded (no convergence or "
                         "degenerate sample)\n";
        }
    }

    const std::array<double, 5> truths = {
        truth.alpha, truth.mu, truth.sigma2, truth.mu / (1.0 - truth.alpha),
        truth.sigma2 / (1.0 - truth.alpha * truth.alpha)};

    std::ostringstream md;
    std::ostringstream csv;
    ruinkit::write_csv_row(
        csv, {"parameter", "truth", "n", "estimation", "deviation", "mse"});

    auto table_header = [&md, &report]() {
        md << "| para | t-v |";
        for (int n : report.n_list) {
            md << " n=" << n << " estimation | n=" << n << " deviation | n="
               << n << " MSE |";
        }
        md << '\n' << "|---|---|";
        for (std::size_t ni = 0; ni < report.n_list.size(); ++ni) {
            md << "---|---|---|";
        }
        md << '\n';
    };

    md << "Moment estimation over " << report.reps
       << " replications per sample size (seed " << report.seed << ").\n\n";
    table_header();
    append_report_rows(md, csv, report, truths, 0, 3);
    md << "\nImplied stationary quantities (identifiable from pooled "
          "moments):\n\n";
    table_header();
    append_report_rows(md, csv, report, truths, 3, 5);

    write_output(a.out_value(), md.str());
    if (!a.csv_out.empty()) {
        write_output(a.csv_out, csv.str());
    }
}

void emit_bound_warnings(const ruinkit::BoundReport& report) {
    if (report.divergence_warning) {
        std::cerr << "ruinkit: warning: the bound constant's series is in its "
                     "divergent regime at z = "
                  << ruinkit::format_double(report.z)
                  << "; C_N = " << ruinkit::format_double(report.c_n)
                  << " is a truncation (N = " << report.series.truncation_order
                  << ") of a formally infinite expectation\n";
    }
    if (report.net_profit_warning) {
        std::cerr << "ruinkit: warning: premium does not exceed the net-profit "
                     "minimum theta*E[Lambda]; the bound is valid but may be "
                     "vacuous\n";
    }
}

ordered_json bound_json(const ruinkit::BoundReport& report) {
    ordered_json summary;
    summary["R"] = report.r.r_value;
    summary["z"] = report.z;
    summary["C_N"] = report.series.partial_sums;
    summary["divergence_flag"] = report.divergence_warning;
    summary["net_profit_warning"] = report.net_profit_warning;
    if (report.fitted_slope.has_value()) {
        summary["fitted_slope"] = *report.fitted_slope;
    } else {
        summary["fitted_slope"] = nullptr;
    }
    return summary;
}

void run_bound(Args& a) {
    a.load();
    const ruinkit::ModelParams params = a.params();
    const double c = a.premium();
    const std::vector<double> grid = a.u_grid_value("0:10:0.5");
    const int truncation = a.truncation_value(10);

    ruinkit::BoundReport report;
    if (a.with_mc) {
        ruinkit::McComparisonOptions options;
        options.horizon = a.horizon_value(200);
        options.reps = a.reps_value(10000);
        options.truncation = truncation;
        options.seed = a.seed_value();
        options.init_mode = a.init_mode_value();
        options.threads = a.threads_value();
        report = ruinkit::bound_vs_mc_report(params, c, grid, options);
    } else {
        report = ruinkit::lundberg_bound(params, c, grid, truncation);
    }
    emit_bound_warnings(report);
    if (a.with_mc && !report.fitted_slope.has_value()) {
        std::cerr << "ruinkit: notice: slope fit omitted (fewer than 3 grid "
                     "points with psi_hat inside the fit window)\n";
    }

    std::ostringstream text;
    if (a.with_mc) {
        ruinkit::write_csv_row(text,
                               {"u", "bound", "psi_hat", "ci_low", "ci_high"});
        for (std::size_t i = 0; i < report.u_grid.size(); ++i) {
            const ruinkit::RuinEstimate& est = report.mc_comparison[i];
            ruinkit::write_csv_row(
                text, {ruinkit::format_double(report.u_grid[i]),
                       ruinkit::format_double(report.bound_values[i]),
                       ruinkit::format_double(est.psi_hat),
                       ruinkit::format_double(est.ci_low),
                       ruinkit::format_double(est.ci_high)});
        }
    } else {
        ruinkit::write_csv_row(text, {"u", "bound"});
        for (std::size_t i = 0; i < report.u_grid.size(); ++i) {
            ruinkit::write_csv_row(
                text, {ruinkit::format_double(report.u_grid[i]),
                       ruinkit::format_double(report.bound_values[i])});
        }
    }
    write_output(a.out_value(), text.str());
    if (!a.json_out.empty()) {
        write_output(a.json_out, bound_json(report).dump(2) + "\n");
    }
}

void run_ruin_mc(Args& a) {
    a.load();
    ruinkit::SimConfig config = a.sim_config(200);
    config.sampling_mode = ruinkit::SamplingMode::cumulative;
    const double c = a.premium();
    if (!(c > 0.0)) {
        throw std::invalid_argument("premium c must be > 0");
    }
    const std::vector<double> grid = a.u_grid_value("0:10:0.5");
    const std::int64_t reps = a.reps_value(10000);

    const std::vector<double> losses =
        ruinkit::sample_max_losses(config, c, reps, a.threads_value());
    std::vector<ruinkit::RuinEstimate> estimates;
    estimates.reserve(grid.size());
    for (double u : grid) {
        estimates.push_back(
            ruinkit::ruin_estimate_from_losses(losses, u, c, config.horizon));
    }
    const std::optional<double> slope =
        ruinkit::fit_log_slope(estimates, 1e-3, 0.3);
    if (!slope.has_value()) {
        std::cerr << "ruinkit: notice: slope fit omitted (fewer than 3 grid "
                     "points with psi_hat inside the fit window)\n";
    }

    std::ostringstream text;
    ruinkit::write_csv_row(text, {"u", "psi_hat", "ci_low", "ci_high"});
    for (const ruinkit::RuinEstimate& est : estimates) {
        ruinkit::write_csv_row(text, {ruinkit::format_double(est.u),
                                      ruinkit::format_double(est.psi_hat),
                                      ruinkit::format_double(est.ci_low),
                                      ruinkit::format_double(est.ci_high)});
    }
    write_output(a.out_value(), text.str());

    if (!a.json_out.empty()) {
        ordered_json summary;
        if (c > config.params.theta) {
            summary["R"] =
                ruinkit::adjustment_coefficient_closed(c, config.params.theta)
                    .r_value;
        } else {
            summary["R"] = nullptr;
        }
        if (slope.has_value()) {
            summary["fitted_slope"] = *slope;
        } else {
            summary["fitted_slope"] = nullptr;
        }
        summary["horizon"] = config.horizon;
        summary["reps"] = reps;
        summary["seed"] = config.seed;
        write_output(a.json_out, summary.dump(2) + "\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ruinkit: AR(1) log-intensity compound-Poisson risk model toolkit"};
    app.require_subcommand(1);

    Args a_sim, a_mom, a_est, a_tab, a_bound, a_ruin;

    CLI::App* sim = app.add_subcommand(
        "simulate", "sample one aggregate-claims path to CSV");
    a_sim.add_common(sim);
    a_sim.add_params(sim);
    a_sim.add_sim(sim);
    a_sim.o_sampling = sim->add_option(
        "--sampling-mode", a_sim.sampling_mode,
        "marginal | cumulative (default marginal)");

    CLI::App* mom = app.add_subcommand(
        "moments", "closed-form m1, m2, m3 of the total claims per t");
    a_mom.add_common(mom);
    a_mom.add_params(mom);
    a_mom.o_horizon = mom->add_option("--horizon", a_mom.horizon,
                                      "emit rows for t = 0..horizon");
    mom->add_flag("--paper-m3", a_mom.paper_m3,
                  "append the originally published third-moment formula as "
                  "m3_printed (disagrees with m3 whenever sigma2 > 0)");

    CLI::App* est = app.add_subcommand(
        "estimate", "fit (alpha, mu, sigma2) from a claim-series CSV");
    a_est.add_common(est);
    a_est.o_data = est->add_option(
        "data", a_est.data_path,
        "CSV with an s_total column; rows with t = 0 are skipped");
    a_est.o_theta = est->add_option("--theta", a_est.theta,
                                    "known mean claim size (default 0.5)");
    est->add_flag("--use-autocov", a_est.use_autocov,
                  "match the lag-1 autocovariance instead of the third "
                  "moment, making alpha identifiable");
    est->add_flag("--multistart", a_est.multistart,
                  "search a 3x3x3 grid of start points");
    est->add_option("--alpha0", a_est.alpha0, "solver start for alpha");
    est->add_option("--mu0", a_est.mu0, "solver start for mu");
    est->add_option("--sigma20", a_est.sigma20, "solver start for sigma2");
    est->add_option("--max-iter", a_est.max_iterations,
                    "solver iteration budget");

    CLI::App* tab = app.add_subcommand(
        "table1", "replication study: simulate, estimate, tabulate");
    a_tab.add_common(tab);
    a_tab.add_params(tab);
    a_tab.o_reps = tab->add_option("--reps", a_tab.reps,
                                   "replications per sample size (default 500)");
    a_tab.o_n_list = tab->add_option("--n-list", a_tab.n_list,
                                     "sample sizes (default 5,20,50)")
                         ->delimiter(',');
    a_tab.o_estimator = tab->add_option(
        "--estimator", a_tab.estimator, "moments | autocov (default moments)");
    tab->add_option("--csv-out", a_tab.csv_out, "also write the report as CSV");
    tab->add_flag("--multistart", a_tab.multistart,
                  "solver multistart per replication");
    tab->add_option("--alpha0", a_tab.alpha0, "solver start for alpha");
    tab->add_option("--mu0", a_tab.mu0, "solver start for mu");
    tab->add_option("--sigma20", a_tab.sigma20, "solver start for sigma2");

    CLI::App* bnd = app.add_subcommand(
        "bound", "exponential ruin bound e^{-Ru} C_N over a surplus grid");
    a_bound.add_common(bnd);
    a_bound.add_params(bnd);
    a_bound.o_c = bnd->add_option("--c", a_bound.c,
                                  "premium income per unit time (> theta)");
    a_bound.o_u_grid = bnd->add_option(
        "--u-grid", a_bound.u_grid,
        "surplus grid start:stop:step, start inclusive, stop exclusive "
        "(default 0:10:0.5)");
    a_bound.o_truncation = bnd->add_option(
        "--truncation", a_bound.truncation,
        "series truncation order N for the constant C_N (default 10)");
    bnd->add_flag("--with-mc", a_bound.with_mc,
                  "pair the bound with Monte Carlo ruin estimates");
    a_bound.o_horizon = bnd->add_option("--horizon", a_bound.horizon,
                                        "MC ruin horizon (default 200)");
    a_bound.o_reps = bnd->add_option("--reps", a_bound.reps,
                                     "MC replications (default 10000)");
    a_bound.o_init_mode = bnd->add_option("--init-mode", a_bound.init_mode,
                                          "MC ln Lambda_0 convention");
    bnd->add_option("--json-out", a_bound.json_out,
                    "write the JSON summary (R, z, C_N, divergence flag, "
                    "fitted slope) to this path");

    CLI::App* ruin = app.add_subcommand(
        "ruin-mc", "Monte Carlo finite-horizon ruin probabilities over a grid");
    a_ruin.add_common(ruin);
    a_ruin.add_params(ruin);
    a_ruin.add_sim(ruin);
    a_ruin.o_c = ruin->add_option("--c", a_ruin.c,
                                  "premium income per unit time (> 0)");
    a_ruin.o_u_grid = ruin->add_option(
        "--u-grid", a_ruin.u_grid,
        "surplus grid start:stop:step (default 0:10:0.5)");
    a_ruin.o_reps = ruin->add_option("--reps", a_ruin.reps,
                                     "MC replications (default 10000)");
    ruin->add_option("--json-out", a_ruin.json_out,
                     "write the JSON summary (R, fitted slope) to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sim)) {
            run_simulate(a_sim);
        } else if (app.got_subcommand(mom)) {
            run_moments(a_mom);
        } else if (app.got_subcommand(est)) {
            run_estimate(a_est);
        } else if (app.got_subcommand(tab)) {
            run_table1(a_tab);
        } else if (app.got_subcommand(bnd)) {
            run_bound(a_bound);
        } else if (app.got_subcommand(ruin)) {
            run_ruin_mc(a_ruin);
        }
    } catch (const std::exception& err) {
        std::cerr << "ruinkit: error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
