#include "lattice_smooth/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "lattice_smooth/parallel.hpp"
#include "lattice_smooth/rng.hpp"

#include <CLI11.hpp>

namespace latsm {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json slope_json(const SlopeFit& fit) {
    return ordered_json{{"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"stderr", fit.stderr_slope}};
}

ordered_json marginal_json(const MarginalSpec& z) {
    switch (z.kind) {
        case MarginalKind::PointMass: return {{"law", "point_mass"}, {"m", z.param}};
        case MarginalKind::Uniform: return {{"law", "uniform"}, {"a", z.param}};
        case MarginalKind::Gaussian: return {{"law", "gaussian"}, {"sigma", z.param}};
        case MarginalKind::Empirical:
            return {{"law", "empirical"}, {"count", z.sample.size()}};
    }
    return {};
}

} // namespace

ordered_json rate_report_json(const RateReport& report) {
    ordered_json points = ordered_json::array();
    for (const RatePoint& p : report.points)
        points.push_back({{"n", p.n},
                          {"h", p.h},
                          {"mean_sup", p.mean_sup},
                          {"median_sup", p.median_sup},
                          {"q90_sup", p.q90_sup},
                          {"grid_points", p.grid_points},
                          {"grid_capped", p.grid_capped}});
    return ordered_json{{"study", report.study},
                        {"d", report.d},
                        {"replications", report.replications},
                        {"target", report.target},
                        {"seed", report.seed},
                        {"points", points},
                        {"fit", slope_json(report.fit)},
                        {"theoretical_slope", report.theoretical_slope},
                        {"tolerance", report.tolerance},
                        {"monotone_fraction", report.monotone_fraction},
                        {"verdict", report.verdict}};
}

ordered_json bias_report_json(const BiasReport& report) {
    ordered_json points = ordered_json::array();
    for (const BiasPoint& p : report.points)
        points.push_back({{"n", p.n},
                          {"h", p.h},
                          {"max_abs_bias", p.max_abs_bias},
                          {"bound", p.bound},
                          {"ratio", p.ratio}});
    return ordered_json{{"study", report.study},
                        {"d", report.d},
                        {"battery", report.battery},
                        {"points", points},
                        {"ratio_trend_slope", report.ratio_trend_slope},
                        {"verdict", report.verdict}};
}

ordered_json variance_report_json(const VarianceReport& report) {
    ordered_json points = ordered_json::array();
    for (const VariancePoint& p : report.points)
        points.push_back(
            {{"n", p.n}, {"h", p.h}, {"rms", p.rms}, {"exact_rms", p.exact_rms}});
    return ordered_json{{"study", report.study},
                        {"d", report.d},
                        {"seed", report.seed},
                        {"oracle_pass", report.oracle_pass},
                        {"oracle_worst_gap", report.oracle_worst_gap},
                        {"iid_equality_pass", report.iid_equality_pass},
                        {"iid_worst_gap", report.iid_worst_gap},
                        {"points", points},
                        {"fit", slope_json(report.fit)},
                        {"theoretical_slope", report.theoretical_slope},
                        {"tolerance", report.tolerance},
                        {"verdict", report.verdict}};
}

ordered_json condition_report_json(const ConditionReport& report) {
    ordered_json terms = ordered_json::array();
    for (const ConditionTerm& t : report.terms)
        terms.push_back(
            {{"lag", t.lag}, {"value", t.value}, {"exact", t.exact}, {"method", t.method}});
    ordered_json out{{"condition", condition_name(report.id)},
                     {"verdict", verdict_name(report.verdict)},
                     {"sum", report.sum},
                     {"truncation_radius", report.truncation_radius},
                     {"terms", terms}};
    if (report.q > 0.0) out["q"] = report.q;
    if (report.p > 0.0) out["p"] = report.p;
    if (!report.reason.empty()) out["reason"] = report.reason;
    return out;
}

namespace {

ordered_json orlicz_answer(const OrliczRequest& req) {
    ordered_json out{{"op", req.op}};
    if (req.marginal) out["marginal"] = marginal_json(*req.marginal);
    auto need_marginal = [&]() -> const MarginalSpec& {
        if (!req.marginal) throw validation_error("orlicz op '" + req.op + "' needs a marginal");
        return *req.marginal;
    };
    if (req.op == "luxemburg_norm") {
        const LuxemburgResult r = luxemburg_norm(need_marginal(), req.beta, req.tol);
        out["beta"] = req.beta;
        out["value"] = r.value;
        out["status"] = r.ok() ? "OK" : "DIVERGENT";
    } else if (req.op == "c_k") {
        const LuxemburgResult r = c_k_coefficient(need_marginal(), req.alpha, req.beta, req.tol);
        out["alpha"] = req.alpha;
        out["beta"] = req.beta;
        out["value"] = r.value;
        out["status"] = r.ok() ? "OK" : "DIVERGENT";
    } else if (req.op == "d_k") {
        out["alpha"] = req.alpha;
        out["p"] = req.p;
        out["value"] = d_k_coefficient(need_marginal(), req.alpha, req.p);
    } else if (req.op == "psi") {
        out["beta"] = req.beta;
        out["x"] = req.x;
        out["value"] = psi_eval(YoungFunctionBeta(req.beta), req.x);
    } else if (req.op == "beta_of_q") {
        out["q"] = req.q;
        out["value"] = beta_of_q(req.q);
    } else if (req.op == "quantile") {
        out["u"] = req.u;
        out["value"] = quantile_q(need_marginal(), req.u);
    } else if (req.op == "lp_norm") {
        out["p"] = req.p;
        out["value"] = lp_norm(need_marginal(), req.p);
    } else if (req.op == "norm_equivalence") {
        const NormEquivalenceDiag diag = norm_equivalence_diag(need_marginal(), req.beta);
        out["beta"] = req.beta;
        out["luxemburg"] = diag.luxemburg.value;
        out["luxemburg_status"] = diag.luxemburg.ok() ? "OK" : "DIVERGENT";
        out["sup_scaled_lp"] = diag.sup_scaled_lp;
    } else if (req.op == "serfling_bound") {
        out["m_inf"] = req.m_inf;
        out["phi"] = req.phi;
        out["value"] = serfling_bound(req.m_inf, req.phi);
    } else if (req.op == "rio_bound") {
        out["alpha"] = req.alpha;
        out["p"] = req.p;
        out["value"] = rio_bound(need_marginal(), req.alpha, req.p);
    } else {
        throw validation_error("unknown orlicz op '" + req.op + "'");
    }
    return out;
}

// `simulate`: field summary statistics and covariance checks per n.
ordered_json run_simulate(const ExperimentConfig& config, CsvWriter* csv) {
    config.validate(false);
    ordered_json per_n = ordered_json::array();
    for (const std::int64_t n : config.n_values) {
        const double h = config.bandwidth_for(n);
        const LatticeShape shape{config.d, n};
        const FieldSample field =
            generate(config.generator, shape, replicate_seed(config.seed, "simulate", n, 0));
        double mean = 0.0, ss = 0.0;
        for (const double v : field.values) mean += v;
        mean /= static_cast<double>(field.values.size());
        for (const double v : field.values) ss += (v - mean) * (v - mean);
        const double variance = ss / static_cast<double>(field.values.size());

        ordered_json lags = ordered_json::array();
        const std::int64_t radius = config.generator.dependence_radius(config.d);
        const Box sites = lattice_box(shape);
        for (std::int64_t lag = 0; lag <= radius + 1; ++lag) {
            Index offset(static_cast<std::size_t>(config.d), 0);
            offset[0] = lag;
            double emp = 0.0;
            std::int64_t pairs = 0;
            sites.for_each([&](const Index& i, std::int64_t flat) {
                if (i[0] + lag > n) return;
                Index j = i;
                j[0] += lag;
                emp += field.values[static_cast<std::size_t>(flat)] *
                       field.values[static_cast<std::size_t>(sites.flatten(j))];
                ++pairs;
            });
            emp = pairs > 0 ? emp / static_cast<double>(pairs) : 0.0;
            const double theory = theoretical_covariance(config.generator, offset);
            lags.push_back({{"lag_e1", lag}, {"empirical", emp}, {"theoretical", theory}});
            if (csv) {
                csv->add("simulate", config.d, n, h, 0, "cov_emp_lag" + std::to_string(lag), emp);
                csv->add("simulate", config.d, n, h, 0, "cov_theory_lag" + std::to_string(lag),
                         theory);
            }
        }
        if (csv) {
            csv->add("simulate", config.d, n, h, 0, "mean", mean);
            csv->add("simulate", config.d, n, h, 0, "variance", variance);
        }
        per_n.push_back({{"n", n},
                         {"sites", field.values.size()},
                         {"mean", mean},
                         {"variance", variance},
                         {"covariance", lags}});
    }
    return ordered_json{{"study", "simulate"},
                        {"d", config.d},
                        {"generator", config.generator.describe()},
                        {"seed", config.seed},
                        {"per_n", per_n}};
}

// `estimate`: one replicate per n, g_n on the grid plus the sup deviation.
ordered_json run_estimate(const ExperimentConfig& config, CsvWriter* csv) {
    config.validate(false);
    ordered_json per_n = ordered_json::array();
    for (const std::int64_t n : config.n_values) {
        const double h = config.bandwidth_for(n);
        const EstimationProblem problem = make_problem(config, n, h);
        const FieldSample field =
            generate(config.generator, problem.shape, replicate_seed(config.seed, "estimate", n, 0));
        const std::vector<double> y = build_observations(problem, field);
        const EvalGrid grid = make_uniform_grid(
            config.d, config.grid.kind == GridPolicy::Kind::Fixed
                          ? config.grid.points_per_axis
                          : std::clamp<std::int64_t>(
                                static_cast<std::int64_t>(std::ceil(config.grid.kappa / h)) + 1, 2,
                                config.grid.max_points_per_axis));
        const std::int64_t total = grid.point_count();
        const std::int64_t P = grid.points_per_axis;
        const double spacing = 1.0 / static_cast<double>(P - 1);
        std::vector<double> x(static_cast<std::size_t>(config.d));
        for (std::int64_t p = 0; p < total && csv; ++p) {
            std::int64_t rest = p;
            for (int a = config.d - 1; a >= 0; --a) {
                x[static_cast<std::size_t>(a)] = std::min(1.0, static_cast<double>(rest % P) * spacing);
                rest /= P;
            }
            csv->add("estimate", config.d, n, h, 0, "x" + std::to_string(p),
                     estimate(problem, y, x));
        }
        const SupReport sup = sup_deviation(problem, y, grid);
        if (csv) csv->add("estimate", config.d, n, h, 0, "sup", sup.sup_deviation);
        per_n.push_back({{"n", n},
                         {"h", h},
                         {"grid_points", sup.grid_points},
                         {"sup_deviation", sup.sup_deviation},
                         {"argmax", sup.argmax}});
    }
    return ordered_json{{"study", "estimate"}, {"d", config.d}, {"per_n", per_n}};
}

int finish(const ordered_json& report, const CsvWriter* csv, const std::string& out_base,
           bool quiet, int exit_code) {
    if (!out_base.empty()) {
        if (csv) csv->write_to(out_base + ".csv");
        std::ofstream json_file(out_base + ".json", std::ios::binary);
        if (!json_file) throw configuration_error("cannot open JSON output path");
        json_file << report.dump(2) << '\n';
        if (!quiet)
            std::cout << "wrote " << out_base << ".json"
                      << (csv ? " and " + out_base + ".csv" : "") << "\n";
    } else if (!quiet) {
        std::cout << report.dump(2) << '\n';
    }
    return exit_code;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Fixed-design kernel regression on lattices with dependent errors"};
    app.require_subcommand(1);

    std::string config_path, out_base;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false, quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config")->required();
        cmd->add_option("--out", out_base, "output base path (.csv/.json appended)");
        cmd->add_option("--seed", seed_override, "override the config master seed")
            ->each([&](const std::string&) { has_seed_override = true; });
        cmd->add_flag("--quiet", quiet, "suppress stdout reporting");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate error fields, report moments");
    CLI::App* estimate_cmd = app.add_subcommand("estimate", "evaluate g_n on a grid");
    CLI::App* bias = app.add_subcommand("bias", "deterministic bias-bound study");
    CLI::App* variance = app.add_subcommand("variance", "variance oracle + rate study");
    CLI::App* rates = app.add_subcommand("rates", "sup-norm convergence rate study");
    CLI::App* conditions = app.add_subcommand("conditions", "dependence condition reports");
    CLI::App* orlicz = app.add_subcommand("orlicz", "Orlicz calculus queries");
    for (CLI::App* cmd : {simulate, estimate_cmd, bias, variance, rates, conditions, orlicz})
        add_common(cmd);

    try {
        std::vector<std::string> argv_like = args; // CLI11 consumes reversed argv
        std::reverse(argv_like.begin(), argv_like.end());
        app.parse(argv_like);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 1;
    }

    try {
        ExperimentConfig config = load_config(config_path);
        if (has_seed_override) config.seed = seed_override;
        if (out_base.empty()) out_base = config.output_base;

        if (simulate->parsed()) {
            CsvWriter csv;
            const ordered_json report = run_simulate(config, &csv);
            return finish(report, &csv, out_base, quiet, 0);
        }
        if (estimate_cmd->parsed()) {
            CsvWriter csv;
            const ordered_json report = run_estimate(config, &csv);
            return finish(report, &csv, out_base, quiet, 0);
        }
        if (bias->parsed()) {
            CsvWriter csv;
            const BiasReport report = run_bias_study(config, &csv);
            return finish(bias_report_json(report), &csv, out_base, quiet,
                          report.verdict == "FAIL" ? 2 : 0);
        }
        if (variance->parsed()) {
            CsvWriter csv;
            const VarianceReport report = run_variance_study(config, &csv);
            return finish(variance_report_json(report), &csv, out_base, quiet,
                          report.verdict == "FAIL" ? 2 : 0);
        }
        if (rates->parsed()) {
            CsvWriter csv;
            const RateReport report = run_rate_study(config, &csv);
            return finish(rate_report_json(report), &csv, out_base, quiet,
                          report.verdict == "FAIL" ? 2 : 0);
        }
        if (conditions->parsed()) {
            if (config.condition_ids.empty())
                throw validation_error("config: `conditions.ids` is empty");
            ordered_json reports = ordered_json::array();
            for (const std::string& id : config.condition_ids)
                reports.push_back(condition_report_json(check_condition(
                    condition_from_string(id), config.generator, config.d,
                    config.condition_params)));
            return finish(ordered_json{{"study", "conditions"}, {"reports", reports}}, nullptr,
                          out_base, quiet, 0);
        }
        if (orlicz->parsed()) {
            if (config.orlicz_requests.empty())
                throw validation_error("config: `orlicz` request list is empty");
            ordered_json answers = ordered_json::array();
            for (const OrliczRequest& req : config.orlicz_requests)
                answers.push_back(orlicz_answer(req));
            return finish(ordered_json{{"study", "orlicz"}, {"answers", answers}}, nullptr,
                          out_base, quiet, 0);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace latsm
