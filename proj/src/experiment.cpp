#include "lattice_smooth/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lattice_smooth/parallel.hpp"
#include "lattice_smooth/rng.hpp"

#include <nlohmann/json.hpp>

namespace latsm {

using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

EvalGrid make_study_grid(const ExperimentConfig& config, double h, double target_rate) {
    const GridPolicy& policy = config.grid;
    if (policy.kind == GridPolicy::Kind::Fixed)
        return make_uniform_grid(config.d, policy.points_per_axis);
    if (policy.covering)
        return make_covering_grid(config.d, h, target_rate, policy.max_total_cubes,
                                  policy.max_points_per_axis);
    const double spacing = h / policy.kappa;
    auto points = static_cast<std::int64_t>(std::ceil(1.0 / spacing)) + 1;
    points = std::clamp<std::int64_t>(points, 2, policy.max_points_per_axis);
    return make_uniform_grid(config.d, points);
}

double sorted_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const auto r = static_cast<std::size_t>(values.size());
    if (r == 0) return 0.0;
    const auto k = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(r) - 1.0, std::ceil(q * static_cast<double>(r)) - 1.0));
    return values[std::max<std::size_t>(k, 0)];
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t r = values.size();
    if (r == 0) return 0.0;
    return r % 2 == 1 ? values[r / 2] : 0.5 * (values[r / 2 - 1] + values[r / 2]);
}

} // namespace

KernelSpec ExperimentConfig::make_kernel() const {
    return kernel_kind == KernelKind::Uniform ? KernelSpec::uniform(d)
                                              : KernelSpec::pedestal_kernel(d, kernel_a, kernel_b);
}

void ExperimentConfig::validate(bool slope_study) const {
    if (d < 1) throw validation_error("config: d must be >= 1");
    if (n_values.empty()) throw validation_error("config: empty n list");
    for (std::size_t k = 1; k < n_values.size(); ++k)
        if (n_values[k] <= n_values[k - 1])
            throw validation_error("config: n list must be strictly increasing");
    if (slope_study) {
        if (n_values.size() < 4)
            throw validation_error("config: slope fits need at least 4 n values");
        if (replications < 30)
            throw validation_error("config: Monte Carlo criteria need R >= 30");
    }
    if (replications < 1) throw validation_error("config: replications must be >= 1");
    generator.validate(d);
    schedule.validate(d, n_values);
    make_kernel();
    if (!variance_point.empty() && static_cast<int>(variance_point.size()) != d)
        throw validation_error("config: variance_point dimension mismatch");
    for (const double c : variance_point)
        if (c < 0.0 || c > 1.0) throw validation_error("config: variance_point outside [0,1]^d");
}

bool rate_parameters_admissible(int d, double p, double a, double b, double theta1,
                                double theta2) {
    if (d < 1 || !(p > 2.0) || a < 0.0 || b < 0.0) return false;
    const double dd = static_cast<double>(d);
    const double theta = (2.0 * a * (dd + p) - dd * dd - 2.0) / (dd * (3.0 * dd + 2.0));
    return theta >= theta2 && dd * (3.0 * dd + 2.0) * theta1 + 2.0 * (dd + p) * b > 2.0;
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
    const std::size_t m = points.size();
    if (m < 3) throw domain_error("fit_slope needs at least 3 points");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (!(sxx > 0.0)) throw domain_error("fit_slope needs at least two distinct x values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double rss = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - fit.intercept - fit.slope * x;
        rss += r * r;
    }
    fit.stderr_slope = std::sqrt(std::max(rss, 0.0) / (static_cast<double>(m) - 2.0) / sxx);
    return fit;
}

void CsvWriter::add(const std::string& study, int d, std::int64_t n, double h,
                    std::int64_t replicate, const std::string& statistic, double value) {
    std::ostringstream row;
    row << study << ',' << d << ',' << n << ',' << format_double(h) << ',' << replicate << ','
        << statistic << ',' << format_double(value);
    rows_.push_back(row.str());
}

std::string CsvWriter::str() const {
    std::string out = "study,d,n,h,replicate,statistic,value\n";
    for (const auto& row : rows_) {
        out += row;
        out += '\n';
    }
    return out;
}

void CsvWriter::write_to(const std::string& path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw configuration_error("cannot open CSV output path: " + path);
    file << str();
}

std::uint64_t replicate_seed(std::uint64_t master, const std::string& study, std::int64_t n,
                             std::int64_t replicate) {
    const std::uint64_t s1 = derive_seed(master, fnv1a(study));
    const std::uint64_t s2 = derive_seed(s1, static_cast<std::uint64_t>(n));
    return derive_seed(s2, static_cast<std::uint64_t>(replicate));
}

EstimationProblem make_problem(const ExperimentConfig& config, std::int64_t n, double h) {
    EstimationProblem problem;
    problem.shape = LatticeShape{config.d, n};
    problem.kernel = config.make_kernel();
    problem.bandwidth = h;
    problem.regression = make_regression(config.regression_name, config.lipschitz, config.d);
    problem.validate();
    return problem;
}

std::vector<double> build_observations(const EstimationProblem& problem,
                                       const FieldSample& field) {
    const Box sites = lattice_box(problem.shape);
    std::vector<double> y(field.values.size());
    std::vector<double> coords(static_cast<std::size_t>(problem.shape.d));
    const double n = static_cast<double>(problem.shape.n);
    sites.for_each([&](const Index& i, std::int64_t flat) {
        for (std::size_t a = 0; a < coords.size(); ++a)
            coords[a] = static_cast<double>(i[a]) / n;
        y[static_cast<std::size_t>(flat)] =
            problem.regression->eval(coords) + field.values[static_cast<std::size_t>(flat)];
    });
    return y;
}

double weight_square_sum(const EstimationProblem& problem, std::span<const double> x) {
    // Walks the same window the estimator uses, accumulating a_i(x)^2.
    double acc = 0.0;
    const std::int64_t n = problem.shape.n;
    const double nd = static_cast<double>(n);
    const double h = problem.bandwidth;
    Index i(static_cast<std::size_t>(problem.shape.d));
    std::function<void(int)> walk = [&](int axis) {
        auto lo = static_cast<std::int64_t>(std::ceil((x[static_cast<std::size_t>(axis)] - h) * nd)) - 1;
        auto hi = static_cast<std::int64_t>(std::floor((x[static_cast<std::size_t>(axis)] + h) * nd)) + 1;
        lo = std::max<std::int64_t>(lo, 1);
        hi = std::min<std::int64_t>(hi, n);
        for (std::int64_t v = lo; v <= hi; ++v) {
            i[static_cast<std::size_t>(axis)] = v;
            if (axis + 1 < problem.shape.d) {
                walk(axis + 1);
            } else {
                const double w = weight(problem, x, i);
                acc += w * w;
            }
        }
    };
    walk(0);
    return acc;
}

RateReport run_rate_study(const ExperimentConfig& config, CsvWriter* csv) {
    config.validate(true);
    RateReport report;
    report.d = config.d;
    report.replications = config.replications;
    report.target = config.rates_target == DeviationTarget::Mean ? "deviation" : "total_error";
    report.seed = config.seed;
    report.theoretical_slope = 1.0 / (2.0 + config.d);
    report.tolerance = config.slope_tolerance;

    for (const std::int64_t n : config.n_values) {
        const double h = config.bandwidth_for(n);
        const double rate =
            std::pow(std::log(static_cast<double>(n)) / std::pow(static_cast<double>(n), config.d),
                     1.0 / (2.0 + config.d));
        const EstimationProblem problem = make_problem(config, n, h);
        const EvalGrid grid = make_study_grid(config, h, rate);

        std::vector<double> sups(static_cast<std::size_t>(config.replications), 0.0);
        parallel_for(config.replications, [&](std::int64_t r) {
            const std::uint64_t seed = replicate_seed(config.seed, "rates", n, r);
            try {
                const FieldSample field = generate(config.generator, problem.shape, seed);
                const std::vector<double> y = build_observations(problem, field);
                sups[static_cast<std::size_t>(r)] =
                    sup_deviation(problem, y, grid, config.rates_target).sup_deviation;
            } catch (const std::exception& err) {
                throw numerical_error("replicate " + std::to_string(r) + " (seed " +
                                      std::to_string(seed) + ") failed: " + err.what());
            }
        });

        RatePoint point;
        point.n = n;
        point.h = h;
        point.grid_points = grid.point_count();
        point.grid_capped = grid.capped;
        double mean = 0.0;
        for (const double s : sups) mean += s;
        point.mean_sup = mean / static_cast<double>(config.replications);
        point.median_sup = median_of(sups);
        point.q90_sup = sorted_quantile(sups, 0.9);
        report.points.push_back(point);

        if (csv) {
            for (std::size_t r = 0; r < sups.size(); ++r)
                csv->add("rates", config.d, n, h, static_cast<std::int64_t>(r), "sup_deviation",
                         sups[r]);
            csv->add("rates", config.d, n, h, -1, "mean_sup", point.mean_sup);
            csv->add("rates", config.d, n, h, -1, "median_sup", point.median_sup);
            csv->add("rates", config.d, n, h, -1, "q90_sup", point.q90_sup);
        }
    }

    const bool degenerate = std::any_of(report.points.begin(), report.points.end(),
                                        [](const RatePoint& p) { return !(p.mean_sup > 0.0); });
    if (degenerate) {
        report.verdict = "DEGENERATE";
        return report;
    }

    std::vector<std::pair<double, double>> points;
    for (const RatePoint& p : report.points) {
        const double regressor =
            std::log(std::log(static_cast<double>(p.n)) / std::pow(static_cast<double>(p.n), config.d));
        points.emplace_back(regressor, std::log(p.mean_sup));
    }
    report.fit = fit_slope(points);
    report.verdict =
        std::abs(report.fit.slope - report.theoretical_slope) <= report.tolerance ? "PASS" : "FAIL";

    int monotone = 0;
    for (std::size_t k = 1; k < report.points.size(); ++k)
        if (report.points[k].mean_sup <= report.points[k - 1].mean_sup) ++monotone;
    report.monotone_fraction =
        report.points.size() > 1
            ? static_cast<double>(monotone) / static_cast<double>(report.points.size() - 1)
            : 1.0;
    return report;
}

BiasReport run_bias_study(const ExperimentConfig& config, CsvWriter* csv) {
    config.validate(false);
    BiasReport report;
    report.d = config.d;
    const auto battery = lipschitz_battery(config.lipschitz, config.d);
    for (const auto& g : battery) report.battery.push_back(g.name);

    for (const std::int64_t n : config.n_values) {
        const double h = config.bandwidth_for(n);
        BiasPoint point;
        point.n = n;
        point.h = h;
        point.bound = config.lipschitz * h + 1e-12;

        for (std::size_t b = 0; b < battery.size(); ++b) {
            EstimationProblem problem = make_problem(config, n, h);
            problem.regression = battery[b];
            const EvalGrid grid = make_study_grid(config, h, h);
            const std::int64_t total = grid.point_count();
            const std::int64_t P = grid.points_per_axis;
            const double spacing = 1.0 / static_cast<double>(P - 1);

            std::vector<double> biases(static_cast<std::size_t>(total));
            parallel_for(total, [&](std::int64_t p) {
                std::vector<double> x(static_cast<std::size_t>(config.d));
                std::int64_t rest = p;
                for (int a = config.d - 1; a >= 0; --a) {
                    x[static_cast<std::size_t>(a)] =
                        std::min(1.0, static_cast<double>(rest % P) * spacing);
                    rest /= P;
                }
                biases[static_cast<std::size_t>(p)] = bias_at(problem, x);
            });
            double max_abs = 0.0;
            for (std::int64_t p = 0; p < total; ++p) {
                const double v = std::abs(biases[static_cast<std::size_t>(p)]);
                if (v > max_abs) max_abs = v;
                if (csv)
                    csv->add("bias", config.d, n, h, static_cast<std::int64_t>(b),
                             "x" + std::to_string(p), biases[static_cast<std::size_t>(p)]);
            }
            if (csv)
                csv->add("bias", config.d, n, h, static_cast<std::int64_t>(b), "sup", max_abs);
            point.max_abs_bias = std::max(point.max_abs_bias, max_abs);
        }
        point.ratio = point.max_abs_bias / h;
        report.points.push_back(point);
    }

    bool bound_ok = true;
    for (const BiasPoint& p : report.points) bound_ok = bound_ok && p.max_abs_bias <= p.bound;

    double trend = 0.0;
    if (report.points.size() >= 3) {
        std::vector<std::pair<double, double>> pts;
        for (const BiasPoint& p : report.points)
            pts.emplace_back(std::log(static_cast<double>(p.n)),
                             std::log(std::max(p.ratio, 1e-300)));
        trend = fit_slope(pts).slope;
    }
    report.ratio_trend_slope = trend;
    report.verdict = (bound_ok && trend <= 0.02) ? "PASS" : "FAIL";
    return report;
}

VarianceReport run_variance_study(const ExperimentConfig& config, CsvWriter* csv) {
    const bool mc_part = config.n_values.size() >= 4 && config.replications >= 30;
    config.validate(mc_part);
    VarianceReport report;
    report.d = config.d;
    report.seed = config.seed;
    report.theoretical_slope = -0.5 * config.d;
    report.tolerance = config.variance_slope_tolerance;

    std::vector<double> x0 = config.variance_point;
    if (x0.empty()) x0.assign(static_cast<std::size_t>(config.d), 0.5);

    // Part (a): exact double-sum oracle on small lattices.
    const double cov_sum = covariance_absolute_sum(config.generator, config.d);
    double worst_gap = -1e300, worst_iid_gap = 0.0;
    std::int64_t oracle_points = 0;
    for (const std::int64_t n : config.n_values) {
        if (n > 64) continue;
        const double h = config.bandwidth_for(n);
        const EstimationProblem problem = make_problem(config, n, h);
        const EvalGrid grid = make_study_grid(config, h, h);
        const std::int64_t total = grid.point_count();
        const std::int64_t P = grid.points_per_axis;
        const double spacing = 1.0 / static_cast<double>(P - 1);
        GeneratorSpec iid_spec;
        iid_spec.kind = GeneratorKind::IID;
        iid_spec.innovation = config.generator.innovation;

        for (std::int64_t p = 0; p < total; ++p) {
            std::vector<double> x(static_cast<std::size_t>(config.d));
            std::int64_t rest = p;
            for (int a = config.d - 1; a >= 0; --a) {
                x[static_cast<std::size_t>(a)] = std::min(1.0, static_cast<double>(rest % P) * spacing);
                rest /= P;
            }
            const double lhs = exact_squared_sum_moment(problem, config.generator, x);
            const double rhs = cov_sum * weight_sum(problem, x);
            worst_gap = std::max(worst_gap, lhs - rhs);
            const double lhs_iid = exact_squared_sum_moment(problem, iid_spec, x);
            const double rhs_iid = iid_spec.innovation.variance() * weight_square_sum(problem, x);
            worst_iid_gap = std::max(worst_iid_gap, std::abs(lhs_iid - rhs_iid));
            ++oracle_points;
        }
        if (csv) {
            csv->add("variance", config.d, n, h, -1, "oracle_worst_gap", worst_gap);
            csv->add("variance", config.d, n, h, -1, "iid_worst_gap", worst_iid_gap);
        }
    }
    report.oracle_worst_gap = oracle_points > 0 ? worst_gap : 0.0;
    report.oracle_pass = oracle_points == 0 || worst_gap <= 1e-10;
    report.iid_worst_gap = worst_iid_gap;
    report.iid_equality_pass = oracle_points == 0 || worst_iid_gap <= 1e-10;

    // Part (b): Monte Carlo pointwise RMS against (n h)^{-d/2}.
    if (mc_part) {
        for (const std::int64_t n : config.n_values) {
            const double h = config.bandwidth_for(n);
            const EstimationProblem problem = make_problem(config, n, h);
            const double expected_at_x0 = expected_estimate(problem, x0);

            std::vector<double> vs(static_cast<std::size_t>(config.replications), 0.0);
            parallel_for(config.replications, [&](std::int64_t r) {
                const std::uint64_t seed = replicate_seed(config.seed, "variance", n, r);
                try {
                    const FieldSample field = generate(config.generator, problem.shape, seed);
                    const std::vector<double> y = build_observations(problem, field);
                    vs[static_cast<std::size_t>(r)] = estimate(problem, y, x0) - expected_at_x0;
                } catch (const std::exception& err) {
                    throw numerical_error("replicate " + std::to_string(r) + " (seed " +
                                          std::to_string(seed) + ") failed: " + err.what());
                }
            });

            VariancePoint point;
            point.n = n;
            point.h = h;
            double ss = 0.0;
            for (const double v : vs) ss += v * v;
            point.rms = std::sqrt(ss / static_cast<double>(config.replications));
            point.exact_rms = std::sqrt(exact_squared_sum_moment(problem, config.generator, x0)) /
                              weight_sum(problem, x0);
            report.points.push_back(point);

            if (csv) {
                for (std::size_t r = 0; r < vs.size(); ++r)
                    csv->add("variance", config.d, n, h, static_cast<std::int64_t>(r), "v_at_x0",
                             vs[r]);
                csv->add("variance", config.d, n, h, -1, "rms", point.rms);
                csv->add("variance", config.d, n, h, -1, "exact_rms", point.exact_rms);
            }
        }
        const bool degenerate = std::any_of(report.points.begin(), report.points.end(),
                                            [](const VariancePoint& p) { return !(p.rms > 0.0); });
        if (degenerate) {
            report.verdict = "DEGENERATE";
            return report;
        }
        std::vector<std::pair<double, double>> pts;
        for (const VariancePoint& p : report.points)
            pts.emplace_back(std::log(static_cast<double>(p.n) * p.h), std::log(p.rms));
        report.fit = fit_slope(pts);
        const bool slope_ok =
            std::abs(report.fit.slope - report.theoretical_slope) <= report.tolerance;
        report.verdict =
            (report.oracle_pass && report.iid_equality_pass && slope_ok) ? "PASS" : "FAIL";
    } else {
        report.verdict = (report.oracle_pass && report.iid_equality_pass) ? "PASS" : "FAIL";
    }
    return report;
}

} // namespace latsm
