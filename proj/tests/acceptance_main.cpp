// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each criterion pins its tolerances in code; nothing is tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "lattice_smooth/dependence.hpp"
#include "lattice_smooth/experiment.hpp"
#include "lattice_smooth/orlicz.hpp"
#include "oracles.hpp"

using namespace latsm;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, double seconds, const std::string& detail) {
    std::printf("[%s] %-34s (%6.1fs) %s\n", pass ? "PASS" : "FAIL", name.c_str(), seconds,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

GeneratorSpec md_rademacher_sign() {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::MdNeighbor;
    spec.innovation = {InnovationLawKind::Rademacher, 0.0};
    spec.link = LinkFn::Sign;
    return spec;
}

GeneratorSpec linear_1_05(int d) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::Linear;
    spec.innovation = {InnovationLawKind::Gaussian, 1.0};
    Index zero(static_cast<std::size_t>(d), 0);
    Index e1(static_cast<std::size_t>(d), 0);
    e1[0] = 1;
    spec.coefficients = {{zero, 1.0}, {e1, 0.5}};
    return spec;
}

double optimal_as_bandwidth(int d, std::int64_t n) {
    return std::pow(std::log(static_cast<double>(n)) / std::pow(static_cast<double>(n), d),
                    1.0 / (2.0 + d));
}

// ---------------------------------------------------------------- criterion 1
void criterion_bias_bound() {
    Timer timer;
    bool pass = true;
    double worst_margin = -1e300;
    char detail[160];

    const auto run_case = [&](int d, std::vector<std::int64_t> ns, std::int64_t pts) {
        for (const std::int64_t n : ns) {
            const double h = optimal_as_bandwidth(d, n);
            for (const auto& g : lipschitz_battery(1.0, d)) {
                EstimationProblem problem;
                problem.shape = LatticeShape{d, n};
                problem.kernel = KernelSpec::uniform(d);
                problem.bandwidth = h;
                problem.regression = g;
                problem.validate();
                const double bound = 1.0 * h + 1e-12;
                std::vector<double> x(static_cast<std::size_t>(d));
                std::int64_t total = 1;
                for (int a = 0; a < d; ++a) total *= pts;
                for (std::int64_t flat = 0; flat < total; ++flat) {
                    std::int64_t rest = flat;
                    for (int a = d - 1; a >= 0; --a) {
                        x[static_cast<std::size_t>(a)] = static_cast<double>(rest % pts) /
                                                         static_cast<double>(pts - 1);
                        rest /= pts;
                    }
                    const double b = std::abs(bias_at(problem, x));
                    worst_margin = std::max(worst_margin, b - bound);
                    if (b > bound) pass = false;
                }
            }
        }
    };
    run_case(1, {10, 100, 1000}, 401);
    run_case(2, {16, 64}, 61);

    const double elapsed = timer.seconds();
    pass = pass && elapsed < 10.0;
    std::snprintf(detail, sizeof detail, "worst |bias| - (B h + 1e-12) = %.3e; budget 10s",
                  worst_margin);
    report("1 bias bound (Prop 3.1)", pass, elapsed, detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_weight_envelope() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    char detail[160];

    const auto check_grid = [&](int d, std::int64_t n, double h, const KernelSpec& kernel,
                                std::int64_t pts) {
        EstimationProblem problem;
        problem.shape = LatticeShape{d, n};
        problem.kernel = kernel;
        problem.bandwidth = h;
        const double c = kernel.lower, C = kernel.upper;
        const double nh = static_cast<double>(bandwidth_site_count(n, h));
        std::vector<double> x(static_cast<std::size_t>(d));
        std::int64_t total = 1;
        for (int a = 0; a < d; ++a) total *= pts;
        for (std::int64_t flat = 0; flat < total; ++flat) {
            std::int64_t rest = flat;
            for (int a = d - 1; a >= 0; --a) {
                x[static_cast<std::size_t>(a)] =
                    static_cast<double>(rest % pts) / static_cast<double>(pts - 1);
                rest /= pts;
            }
            const double ws = weight_sum(problem, x);
            const double lo = c * std::pow(nh - 1.0, d);
            const double hi = C * std::pow(2.0 * nh + 2.0, d);
            double paper = C;
            for (int a = 0; a < d; ++a)
                paper *= std::floor(static_cast<double>(n) * (x[static_cast<std::size_t>(a)] + h) +
                                    1e-9);
            if (!(ws >= lo - 1e-9 && ws <= hi + 1e-9 && ws <= paper + 1e-9)) pass = false;
            if (n <= 64) {
                const double brute = oracles::brute_weight_sum(problem, x);
                worst = std::max(worst, std::abs(ws - brute));
                if (std::abs(ws - brute) > 1e-12) pass = false;
            }
        }
    };

    for (const KernelSpec& k1 : {KernelSpec::uniform(1), KernelSpec::pedestal_kernel(1, 1.0, 1.0)}) {
        check_grid(1, 10, 0.3, k1, 401);
        check_grid(1, 37, 0.11, k1, 401);
        check_grid(1, 64, optimal_as_bandwidth(1, 64), k1, 401);
        check_grid(1, 1000, optimal_as_bandwidth(1, 1000), k1, 401);
    }
    for (const KernelSpec& k2 : {KernelSpec::uniform(2), KernelSpec::pedestal_kernel(2, 1.0, 1.0)}) {
        check_grid(2, 8, 0.4, k2, 61);
        check_grid(2, 16, optimal_as_bandwidth(2, 16), k2, 61);
        check_grid(2, 64, optimal_as_bandwidth(2, 64), k2, 61);
    }

    std::snprintf(detail, sizeof detail,
                  "corrected + paper envelopes on all grids; max |window - brute| = %.2e", worst);
    report("2 weight-sum envelope (Lemma 4.1)", pass, timer.seconds(), detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_variance_oracle() {
    Timer timer;
    bool pass = true;
    double worst_gap = -1e300, worst_iid = 0.0;
    char detail[160];

    const auto run_case = [&](int d, std::vector<std::int64_t> ns, std::int64_t pts, double h0) {
        const GeneratorSpec gen = linear_1_05(d);
        const double cov_sum = covariance_absolute_sum(gen, d);
        GeneratorSpec iid;
        iid.kind = GeneratorKind::IID;
        iid.innovation = {InnovationLawKind::Gaussian, 1.0};
        for (const std::int64_t n : ns) {
            const double h = h0 > 0.0 ? h0 : optimal_as_bandwidth(d, n);
            EstimationProblem problem;
            problem.shape = LatticeShape{d, n};
            problem.kernel = KernelSpec::uniform(d);
            problem.bandwidth = h;
            std::vector<double> x(static_cast<std::size_t>(d));
            std::int64_t total = 1;
            for (int a = 0; a < d; ++a) total *= pts;
            for (std::int64_t flat = 0; flat < total; ++flat) {
                std::int64_t rest = flat;
                for (int a = d - 1; a >= 0; --a) {
                    x[static_cast<std::size_t>(a)] =
                        static_cast<double>(rest % pts) / static_cast<double>(pts - 1);
                    rest /= pts;
                }
                const double lhs = exact_squared_sum_moment(problem, gen, x);
                const double rhs = cov_sum * weight_sum(problem, x);
                worst_gap = std::max(worst_gap, lhs - rhs);
                if (lhs > rhs + 1e-10) pass = false;
                const double lhs_iid = exact_squared_sum_moment(problem, iid, x);
                const double rhs_iid = weight_square_sum(problem, x);
                worst_iid = std::max(worst_iid, std::abs(lhs_iid - rhs_iid));
                if (std::abs(lhs_iid - rhs_iid) > 1e-10) pass = false;
            }
        }
    };
    run_case(1, {16, 32, 64}, 101, 0.25);
    run_case(2, {8, 16}, 21, 0.3);
    run_case(1, {64}, 101, -1.0);
    run_case(2, {16}, 21, -1.0);

    std::snprintf(detail, sizeof detail,
                  "max(E S^2 - sum|cov| sum a) = %.3e; IID equality gap = %.3e", worst_gap,
                  worst_iid);
    report("3 variance oracle (Thm 3.2(2))", pass, timer.seconds(), detail);
}

// ---------------------------------------------------------------- criterion 4
void criterion_variance_rate() {
    Timer timer;
    bool pass = true;
    char detail[160];
    double slopes[2] = {0.0, 0.0};
    int idx = 0;
    for (const GeneratorSpec& gen : {md_rademacher_sign(), linear_1_05(1)}) {
        ExperimentConfig config;
        config.d = 1;
        config.n_values = {512, 1024, 2048, 4096, 8192};
        config.generator = gen;
        config.kernel_kind = KernelKind::Uniform;
        config.schedule.form = BandwidthForm::OptimalAs;
        config.regression_name = "sinusoid";
        config.replications = 200;
        config.seed = 1870 + static_cast<std::uint64_t>(idx);
        config.variance_slope_tolerance = 0.1;
        const VarianceReport report_v = run_variance_study(config, nullptr);
        slopes[idx] = report_v.fit.slope;
        if (std::abs(report_v.fit.slope + 0.5) > 0.1) pass = false;
        ++idx;
    }
    const double elapsed = timer.seconds();
    pass = pass && elapsed < 120.0;
    std::snprintf(detail, sizeof detail,
                  "slopes: MD %.3f, LINEAR %.3f; band [-0.6,-0.4]; budget 120s", slopes[0],
                  slopes[1]);
    report("4 variance rate (Thm 3.2(2))", pass, timer.seconds(), detail);
}

// ------------------------------------------------------- criteria 5, 8 + inv.
void criteria_sup_rate_and_determinism() {
    char detail[200];

    // d = 1: covering-refined grid, MD bounded errors.
    ExperimentConfig d1;
    d1.d = 1;
    d1.n_values = {512, 1024, 2048, 4096, 8192, 16384};
    d1.generator = md_rademacher_sign();
    d1.kernel_kind = KernelKind::Uniform;
    d1.schedule.form = BandwidthForm::OptimalAs;
    d1.regression_name = "sinusoid";
    d1.grid.kind = GridPolicy::Kind::ByBandwidth;
    d1.grid.covering = true;
    d1.grid.max_points_per_axis = 32768;
    d1.grid.max_total_cubes = 1 << 21;
    d1.replications = 100;
    d1.seed = 20240601;
    d1.slope_tolerance = 0.12;

    Timer t1;
    CsvWriter csv_first;
    const RateReport r1 = run_rate_study(d1, &csv_first);
    const double d1_seconds = t1.seconds();
    const bool d1_pass = r1.verdict == "PASS" && d1_seconds < 300.0;
    std::snprintf(detail, sizeof detail, "slope %.4f vs 1/3, tol 0.12, se %.4f; budget 300s",
                  r1.fit.slope, r1.fit.stderr_slope);
    report("5a sup-norm rate d=1 (Cor 3.1)", d1_pass, d1_seconds, detail);

    // d = 2: bandwidth-proportional grid (the covering refinement is not
    // affordable in d = 2; the delta/h ratio stays fixed across n).
    ExperimentConfig d2;
    d2.d = 2;
    d2.n_values = {32, 64, 128, 256};
    d2.generator = md_rademacher_sign();
    d2.kernel_kind = KernelKind::Uniform;
    d2.schedule.form = BandwidthForm::OptimalAs;
    d2.regression_name = "sinusoid";
    d2.grid.kind = GridPolicy::Kind::ByBandwidth;
    d2.grid.covering = false;
    d2.grid.kappa = 8.0;
    d2.grid.max_points_per_axis = 512;
    d2.replications = 50;
    d2.seed = 20240602;
    d2.slope_tolerance = 0.12;

    Timer t2;
    const RateReport r2 = run_rate_study(d2, nullptr);
    const double d2_seconds = t2.seconds();
    const bool d2_pass = r2.verdict == "PASS" && d2_seconds < 600.0;
    std::snprintf(detail, sizeof detail, "slope %.4f vs 1/4, tol 0.12, se %.4f; budget 600s",
                  r2.fit.slope, r2.fit.stderr_slope);
    report("5b sup-norm rate d=2 (Cor 3.1)", d2_pass, d2_seconds, detail);

    // Config-validator half of criterion 5: the admissibility inequalities.
    Timer t3;
    const bool admissible_good = rate_parameters_admissible(1, 4.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0);
    const bool admissible_bad = !rate_parameters_admissible(1, 4.0, 0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0);
    std::snprintf(detail, sizeof detail, "theta/log inequalities accept and reject as stated");
    report("5c rate-parameter validator", admissible_good && admissible_bad, t3.seconds(), detail);

    // Stochastic monotonicity invariant on the d = 1 reference study.
    std::snprintf(detail, sizeof detail, "mean sup decreasing on %.0f%% of consecutive pairs",
                  100.0 * r1.monotone_fraction);
    report("5d stochastic monotonicity d=1", r1.monotone_fraction >= 0.9, 0.0, detail);

    // Criterion 8: rerun the full d = 1 study; bytes must match.
    Timer t8;
    CsvWriter csv_second;
    (void)run_rate_study(d1, &csv_second);
    const bool identical = csv_first.str() == csv_second.str();
    std::snprintf(detail, sizeof detail, "two runs, %zu CSV bytes each", csv_first.str().size());
    report("8 determinism (byte-identical CSV)", identical, t8.seconds(), detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_orlicz_goldens() {
    Timer timer;
    bool pass = true;
    char detail[160];

    const double ln2 = std::log(2.0);
    for (const double a : {1.0, 3.7}) {
        const LuxemburgResult r = luxemburg_norm(MarginalSpec::point_mass(a), 2.0, 1e-10);
        if (!r.ok() || std::abs(r.value - a / std::sqrt(ln2)) > 1e-8) pass = false;
    }
    const LuxemburgResult g = luxemburg_norm(MarginalSpec::gaussian(1.0), 2.0, 1e-10);
    if (!g.ok() || std::abs(g.value - std::sqrt(8.0 / 3.0)) > 1e-6) pass = false;

    if (c_k_coefficient(MarginalSpec::point_mass(1.0), 0.0, 2.0, 1e-10).value != 0.0) pass = false;
    const LuxemburgResult ck = c_k_coefficient(MarginalSpec::point_mass(1.0), 0.1, 2.0, 1e-10);
    if (!ck.ok() || std::abs(ck.value - 1.0 / std::sqrt(std::log(11.0))) > 1e-6) pass = false;

    double worst_homogeneity = 0.0;
    for (const double lambda : {0.5, 2.0, 10.0}) {
        const double base = luxemburg_norm(MarginalSpec::point_mass(1.3), 2.0, 1e-10).value;
        const double scaled = luxemburg_norm(MarginalSpec::point_mass(1.3 * lambda), 2.0, 1e-10).value;
        worst_homogeneity = std::max(worst_homogeneity,
                                     std::abs(scaled - lambda * base) / (lambda * base));
        const double gbase = luxemburg_norm(MarginalSpec::gaussian(1.0), 2.0, 1e-10).value;
        const double gscaled =
            luxemburg_norm(MarginalSpec::gaussian(lambda), 2.0, 1e-10).value;
        worst_homogeneity = std::max(worst_homogeneity,
                                     std::abs(gscaled - lambda * gbase) / (lambda * gbase));
    }
    if (worst_homogeneity > 1e-8) pass = false;

    std::snprintf(detail, sizeof detail,
                  "point/gaussian norms, c_k inversion, homogeneity drift %.2e", worst_homogeneity);
    report("6 Orlicz golden values", pass, timer.seconds(), detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_dependence_checkers() {
    Timer timer;
    bool pass = true;
    char detail[200];

    const ConditionParams params{1.0, 4.0, 1e-10};
    for (const ConditionId id : {ConditionId::C1, ConditionId::C2, ConditionId::C3}) {
        const ConditionReport r = check_condition(id, md_rademacher_sign(), 1, params);
        if (r.verdict != ConditionVerdict::HoldsExact || r.sum != 0.0) pass = false;
    }
    const ConditionReport c4 = check_condition(ConditionId::C4, linear_1_05(1), 1, params);
    if (c4.verdict != ConditionVerdict::HoldsExact || std::abs(c4.sum - 2.25) > 1e-12)
        pass = false;

    // Mixing-profile zeros beyond the radius against a block-independence
    // Monte Carlo: block functionals at gap > radius decorrelate within 4 SE.
    const GeneratorSpec gen = linear_1_05(1);
    const MixingProfile profile = mixing_profile(gen, 1);
    bool zeros_ok = profile.alpha_1_inf(profile.radius + 1) == 0.0 &&
                    profile.phi_inf_1(profile.radius + 1) == 0.0;
    const FieldSample field = generate(gen, LatticeShape{1, 150000}, 777);
    const std::int64_t gap = profile.radius + 1, width = 2,
                       stride = 2 * width + gap + 3;
    std::vector<double> us, vs;
    for (std::int64_t s = 0; s + width + gap + width < field.shape.n; s += stride) {
        double u = 0.0, v = 0.0;
        for (std::int64_t k = 0; k < width; ++k) {
            u += field.values[static_cast<std::size_t>(s + k)];
            v += field.values[static_cast<std::size_t>(s + width + gap + k)];
        }
        us.push_back(u);
        vs.push_back(v);
    }
    const double mu = oracles::mean(us), mv = oracles::mean(vs);
    std::vector<double> centered;
    for (std::size_t k = 0; k < us.size(); ++k) centered.push_back((us[k] - mu) * (vs[k] - mv));
    const double cov = oracles::mean(centered);
    const double se = oracles::sample_sd(centered) / std::sqrt(static_cast<double>(us.size()));
    const bool mc_ok = std::abs(cov) <= 4.0 * se;
    pass = pass && zeros_ok && mc_ok;

    std::snprintf(detail, sizeof detail,
                  "C1-C3 exact zeros; C4 = %.12f; block cov %.2e vs 4se %.2e", c4.sum, cov,
                  4.0 * se);
    report("7 dependence checkers", pass, timer.seconds(), detail);
}

} // namespace

int main() {
    std::printf("acceptance suite: fixed-design kernel regression on dependent lattices\n");
    criterion_bias_bound();
    criterion_weight_envelope();
    criterion_variance_oracle();
    criterion_variance_rate();
    criteria_sup_rate_and_determinism();
    criterion_orlicz_goldens();
    criterion_dependence_checkers();
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
