#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lattice_smooth/kernel.hpp"
#include "lattice_smooth/lattice.hpp"

namespace latsm {

/// A named B-Lipschitz regression function on [0,1]^d (Lipschitz w.r.t. the
/// max norm, matching the kernel geometry).
struct RegressionFunction {
    std::string name;
    double lipschitz = 1.0; // B
    std::function<double(std::span<const double>)> eval;
};

/// Battery members: "constant", "affine", "distance", "sinusoid".
RegressionFunction make_regression(const std::string& name, double lipschitz, int d);
/// The three nonconstant members, used by bias studies.
std::vector<RegressionFunction> lipschitz_battery(double lipschitz, int d);

/// Fixed-design problem: observations on {1..n}^d, covariates i/n, kernel
/// window radius h.
struct EstimationProblem {
    LatticeShape shape;
    KernelSpec kernel;
    double bandwidth = 0.25; // h in (0,1)
    std::optional<RegressionFunction> regression;

    void validate() const; // requires floor(n h) >= 2 so every window is nonempty
};

/// floor(n h) with a one-sided roundoff guard (n h within 1e-9 of an integer
/// counts as that integer).
std::int64_t bandwidth_site_count(std::int64_t n, double h);

enum class BandwidthForm { OptimalAs, OptimalLp, PowerLog };

/// h_n schedules:
///   OptimalAs  h_n = (n^{-d} log n)^{1/(2+d)}
///   OptimalLp  h_n = n^{-d/(2+d)}
///   PowerLog   h_n = n^{-theta2} (log n)^{theta1}
struct BandwidthSchedule {
    BandwidthForm form = BandwidthForm::OptimalAs;
    double theta1 = 0.0;
    double theta2 = 0.0;

    double value(int d, std::int64_t n) const;
    /// Checks h_n in (0,1) decreasing, n h_n increasing, floor(n h_n) >= 2
    /// over a configured n range.
    void validate(int d, std::span<const std::int64_t> ns) const;
};

/// Evaluation grid over [0,1]^d: a uniform fine grid (points j/(P-1) per
/// axis), optionally paired with a covering of [0,1]^d by equal cubes whose
/// centers carry the pointwise-to-uniform decomposition diagnostics.
struct EvalGrid {
    int d = 1;
    std::int64_t points_per_axis = 2;

    bool has_covering = false;
    std::int64_t cubes_per_axis = 0; // centers (k+1/2)/M, cubes [k/M,(k+1)/M]
    bool capped = false;
    double requested_side = 0.0; // rate * h^{2d+1} before flooring/capping

    double cube_side() const { return has_covering ? 1.0 / static_cast<double>(cubes_per_axis) : 0.0; }
    std::int64_t point_count() const;
    std::int64_t cube_count() const;
};

EvalGrid make_uniform_grid(int d, std::int64_t points_per_axis);

/// Uniform grid by spacing: the actual spacing 1/(P-1) is the largest value
/// not exceeding the request.
EvalGrid make_uniform_grid_with_spacing(int d, double spacing);

/// Covering with side v_n h^{2d+1} (the target-rate sequence times h^{2d+1}),
/// floored at 2^-20 and capped at max_total_cubes; the fine grid gets spacing
/// min(h/8, side), itself capped at max_points_per_axis.
EvalGrid make_covering_grid(int d, double h, double target_rate, std::int64_t max_total_cubes,
                            std::int64_t max_points_per_axis);

/// a_i(x) = K((x - i/n)/h); i must lie in {1..n}^d.
double weight(const EstimationProblem& problem, std::span<const double> x, const Index& i);

/// Sum of a_i(x) over the lattice, visiting only the O((2nh+1)^d) window.
double weight_sum(const EstimationProblem& problem, std::span<const double> x);

/// g_n(x) = sum Y_i a_i(x) / sum a_i(x); Y is row-major over {1..n}^d.
double estimate(const EstimationProblem& problem, std::span<const double> Y,
                std::span<const double> x);

/// E g_n(x) = sum a_i(x) g(i/n) / sum a_i(x)  (exact: the errors are centered).
double expected_estimate(const EstimationProblem& problem, std::span<const double> x);

/// E g_n(x) - g(x); |bias| <= B h everywhere.
double bias_at(const EstimationProblem& problem, std::span<const double> x);

struct SupReport {
    double sup_deviation = 0.0; // sup over the fine grid of |g_n - E g_n|
    std::vector<double> argmax;
    std::int64_t grid_points = 0;

    // Covering decomposition diagnostics (when the grid carries a covering):
    // sup <= a1 + a2 + a3 up to roundoff.
    bool has_covering = false;
    double a1 = 0.0; // max_k sup_{x in I_k} |g_n(x) - g_n(c_k)|
    double a2 = 0.0; // max_k sup_{x in I_k} |E g_n(x) - E g_n(c_k)|
    double a3 = 0.0; // max_k |V_n(c_k)|
    std::int64_t cube_count = 0;
    double cube_side = 0.0;
    bool capped = false;
};

/// What the sup scan centers g_n on: its exact mean (the stochastic term
/// V_n), or the true regression function (total error, for studies of the
/// combined bias + deviation rate).
enum class DeviationTarget { Mean, Truth };

/// Sup over the grid of |g_n(x) - E g_n(x)| (or |g_n(x) - g(x)| under
/// DeviationTarget::Truth) plus covering diagnostics for the V_n term.
/// Uniform kernels take an O(1)-per-point prefix-sum path; the result agrees
/// with the generic window path up to summation roundoff.
SupReport sup_deviation(const EstimationProblem& problem, std::span<const double> Y,
                        const EvalGrid& grid, DeviationTarget target = DeviationTarget::Mean);

/// E S_n(x)^2 = sum_{k,l} a_k(x) a_l(x) E(eps_k eps_l), evaluated exactly via
/// the model covariances (only lags within the dependence radius contribute).
struct GeneratorSpec;
double exact_squared_sum_moment(const EstimationProblem& problem, const GeneratorSpec& generator,
                                std::span<const double> x);

} // namespace latsm
