#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lattice_smooth/dependence.hpp"
#include "lattice_smooth/estimator.hpp"
#include "lattice_smooth/field_gen.hpp"

namespace latsm {

/// How evaluation grids are built for a study.
struct GridPolicy {
    enum class Kind { ByBandwidth, Fixed };
    Kind kind = Kind::ByBandwidth;
    std::int64_t points_per_axis = 401;   // Fixed
    double kappa = 8.0;                   // ByBandwidth: spacing h / kappa
    bool covering = false;                // refine spacing to min(h/8, l_n) + diagnostics
    std::int64_t max_points_per_axis = 4096;
    std::int64_t max_total_cubes = 1 << 21;
};

struct OrliczRequest {
    std::string op; // luxemburg_norm | c_k | d_k | psi | beta_of_q | quantile |
                    // lp_norm | norm_equivalence | serfling_bound | rio_bound
    std::optional<MarginalSpec> marginal;
    double beta = 2.0;
    double q = 1.0;
    double p = 4.0;
    double alpha = 1.0;
    double x = 0.0;
    double u = 0.0;
    double m_inf = 0.0;
    double phi = 0.0;
    double tol = 1e-10;
};

struct ExperimentConfig {
    int d = 1;
    std::vector<std::int64_t> n_values;
    GeneratorSpec generator;
    KernelKind kernel_kind = KernelKind::Uniform;
    double kernel_a = 1.0, kernel_b = 1.0; // Pedestal parameters
    BandwidthSchedule schedule;
    std::string regression_name = "affine";
    double lipschitz = 1.0;
    GridPolicy grid;
    int replications = 100;
    std::uint64_t seed = 1u;
    double slope_tolerance = 0.12;           // sup-norm rate band half-width
    double variance_slope_tolerance = 0.1;   // variance rate band half-width
    std::vector<double> variance_point;      // x0; defaults to (0.5,...,0.5)
    DeviationTarget rates_target = DeviationTarget::Mean; // or Truth: sup |g_n - g|

    std::string output_base; // default report path; the CLI --out flag overrides

    std::vector<std::string> condition_ids; // `conditions` subcommand
    ConditionParams condition_params;
    std::vector<OrliczRequest> orlicz_requests; // `orlicz` subcommand

    KernelSpec make_kernel() const;
    double bandwidth_for(std::int64_t n) const { return schedule.value(d, n); }
    /// Full validation for slope-fitting studies (>= 4 n values, R >= 30).
    void validate(bool slope_study) const;
};

/// Parses the JSON config document; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Admissibility of the power-log rate parameters:
/// theta = (2a(d+p) - d^2 - 2) / (d(3d+2)) must reach theta2 and
/// d(3d+2) theta1 + 2(d+p) b must exceed 2.
bool rate_parameters_admissible(int d, double p, double a, double b, double theta1,
                                double theta2);

/// Ordinary least squares on (x, y) pairs; exact on collinear input.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

/// Buffered CSV emitter with the fixed header
/// `study,d,n,h,replicate,statistic,value`; numbers are printed with %.17g so
/// identical runs produce identical bytes.
class CsvWriter {
public:
    void add(const std::string& study, int d, std::int64_t n, double h, std::int64_t replicate,
             const std::string& statistic, double value);
    void write_to(const std::string& path) const;
    std::string str() const;

private:
    std::vector<std::string> rows_;
};

struct RatePoint {
    std::int64_t n = 0;
    double h = 0.0;
    double mean_sup = 0.0;
    double median_sup = 0.0;
    double q90_sup = 0.0;
    std::int64_t grid_points = 0;
    bool grid_capped = false;
};

struct RateReport {
    std::string study = "rates";
    int d = 1;
    int replications = 0;
    std::string target = "deviation"; // or "total_error" for corollary studies
    std::vector<RatePoint> points;
    SlopeFit fit;
    double theoretical_slope = 0.0;
    double tolerance = 0.0;
    std::string verdict; // PASS | FAIL | DEGENERATE
    double monotone_fraction = 0.0; // consecutive-n pairs with decreasing mean sup
    std::uint64_t seed = 0;
};

/// Monte Carlo sup-norm rate study: R replications per n, sup |g_n - E g_n|
/// over the study grid, slope of log mean sup against log(n^{-d} log n).
RateReport run_rate_study(const ExperimentConfig& config, CsvWriter* csv);

struct BiasPoint {
    std::int64_t n = 0;
    double h = 0.0;
    double max_abs_bias = 0.0; // over grid and battery
    double bound = 0.0;        // B h + 1e-12
    double ratio = 0.0;        // max_abs_bias / h
};

struct BiasReport {
    std::string study = "bias";
    int d = 1;
    std::vector<BiasPoint> points;
    double ratio_trend_slope = 0.0; // log ratio vs log n; growth means failure
    std::string verdict;
    std::vector<std::string> battery;
};

/// Deterministic bias study over the Lipschitz battery.
BiasReport run_bias_study(const ExperimentConfig& config, CsvWriter* csv);

struct VariancePoint {
    std::int64_t n = 0;
    double h = 0.0;
    double rms = 0.0;        // Monte Carlo RMS of V_n(x0)
    double exact_rms = 0.0;  // sqrt(E S_n(x0)^2) / weight_sum(x0)
};

struct VarianceReport {
    std::string study = "variance";
    int d = 1;
    bool oracle_pass = false;  // E S^2 <= sum|cov| * sum a_i at every grid x (n <= 64)
    double oracle_worst_gap = 0.0;
    bool iid_equality_pass = false; // E S^2 == sigma^2 sum a_i^2 for IID errors
    double iid_worst_gap = 0.0;
    std::vector<VariancePoint> points;
    SlopeFit fit;
    double theoretical_slope = 0.0;
    double tolerance = 0.0;
    std::string verdict;
    std::uint64_t seed = 0;
};

/// Variance study: exact small-n oracle inequality plus the Monte Carlo
/// log RMS V_n(x0) ~ -d/2 log(n h_n) slope.
VarianceReport run_variance_study(const ExperimentConfig& config, CsvWriter* csv);

/// Sum of squared weights (for the IID variance identity E S^2 = sigma^2 sum a^2).
double weight_square_sum(const EstimationProblem& problem, std::span<const double> x);

/// Y_i = g(i/n) + eps_i over the lattice, row-major.
std::vector<double> build_observations(const EstimationProblem& problem,
                                       const FieldSample& field);

/// Replicate seed chain: master -> study -> n -> replicate.
std::uint64_t replicate_seed(std::uint64_t master, const std::string& study, std::int64_t n,
                             std::int64_t replicate);

/// Problem instance for one n of a configured study.
EstimationProblem make_problem(const ExperimentConfig& config, std::int64_t n, double h);

} // namespace latsm
