#include "lattice_smooth/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "lattice_smooth/field_gen.hpp"
#include "lattice_smooth/parallel.hpp"

namespace latsm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Offset in kernel coordinates; every membership decision in this file goes
// through the same expression so window enumeration and kernel support agree
// bit-for-bit.
inline double scaled_offset(double x, std::int64_t i, double n, double h) {
    return (x - static_cast<double>(i) / n) / h;
}

inline bool axis_inside(double x, std::int64_t i, double n, double h) {
    return std::abs(scaled_offset(x, i, n, h)) <= 1.0 + kSupportFuzz;
}

// Kernel value as a function of ||u||_inf (both shipped kernels are radial in
// the max norm).
inline double kernel_value_at(const KernelSpec& k, double maxnorm) {
    if (maxnorm > 1.0 + kSupportFuzz) return 0.0;
    if (k.kind == KernelKind::Uniform) return 1.0 / k.normalizer;
    return (k.pedestal + k.tent * (1.0 - std::min(maxnorm, 1.0))) / k.normalizer;
}

struct AxisRange {
    std::int64_t lo;
    std::int64_t hi; // inclusive; empty when hi < lo
};

// Candidate window along one axis, widened by one site on each side; the
// per-site support test is authoritative.
AxisRange candidate_range(double x, double n, double h) {
    auto lo = static_cast<std::int64_t>(std::ceil((x - h) * n)) - 1;
    auto hi = static_cast<std::int64_t>(std::floor((x + h) * n)) + 1;
    return {std::max<std::int64_t>(lo, 1), std::min<std::int64_t>(hi, static_cast<std::int64_t>(n))};
}

// Tight per-axis window (exact membership), for the prefix-sum path.
AxisRange tight_range(double x, double n, double h) {
    AxisRange r = candidate_range(x, n, h);
    while (r.lo <= r.hi && !axis_inside(x, r.lo, n, h)) ++r.lo;
    while (r.hi >= r.lo && !axis_inside(x, r.hi, n, h)) --r.hi;
    return r;
}

// Visits the kernel window of x in row-major site order;
// body(flat_site_index, kernel_value). Recursion depth is the dimension.
template <class Body>
void visit_window(const KernelSpec& kernel, std::span<const double> x, std::int64_t n, double h,
                  Body&& body) {
    const int d = static_cast<int>(x.size());
    const double nd = static_cast<double>(n);
    auto recurse = [&](auto&& self, int axis, double partial_max, std::int64_t base) -> void {
        const AxisRange r = candidate_range(x[static_cast<std::size_t>(axis)], nd, h);
        if (axis == d - 1) {
            for (std::int64_t i = r.lo; i <= r.hi; ++i) {
                const double m =
                    std::max(partial_max, std::abs(scaled_offset(x[static_cast<std::size_t>(axis)], i, nd, h)));
                if (m <= 1.0 + kSupportFuzz) body(base * n + (i - 1), kernel_value_at(kernel, m));
            }
            return;
        }
        for (std::int64_t i = r.lo; i <= r.hi; ++i) {
            const double m =
                std::max(partial_max, std::abs(scaled_offset(x[static_cast<std::size_t>(axis)], i, nd, h)));
            if (m <= 1.0 + kSupportFuzz) self(self, axis + 1, m, base * n + (i - 1));
        }
    };
    recurse(recurse, 0, 0.0, 0);
}

void check_point(std::span<const double> x, int d) {
    if (static_cast<int>(x.size()) != d)
        throw domain_error("evaluation point dimension mismatch");
}

} // namespace

RegressionFunction make_regression(const std::string& name, double lipschitz, int d) {
    if (!(lipschitz > 0.0)) throw validation_error("Lipschitz constant must be > 0");
    RegressionFunction g;
    g.name = name;
    g.lipschitz = lipschitz;
    if (name == "constant") {
        g.eval = [](std::span<const double>) { return 0.5; };
    } else if (name == "affine") {
        g.eval = [lipschitz](std::span<const double> x) { return lipschitz * x[0]; };
    } else if (name == "distance") {
        g.eval = [lipschitz](std::span<const double> x) {
            double m = 0.0;
            for (const double v : x) m = std::max(m, std::abs(v - 0.5));
            return lipschitz * m;
        };
    } else if (name == "sinusoid") {
        const double scale = lipschitz / (2.0 * kPi * d);
        g.eval = [scale](std::span<const double> x) {
            double s = 0.0;
            for (const double v : x) s += std::sin(2.0 * kPi * v);
            return scale * s;
        };
    } else {
        throw validation_error("unknown regression function: " + name);
    }
    return g;
}

std::vector<RegressionFunction> lipschitz_battery(double lipschitz, int d) {
    return {make_regression("affine", lipschitz, d), make_regression("distance", lipschitz, d),
            make_regression("sinusoid", lipschitz, d)};
}

void EstimationProblem::validate() const {
    shape.validate();
    if (kernel.d != shape.d) throw validation_error("kernel dimension != lattice dimension");
    if (!(bandwidth > 0.0) || !(bandwidth < 1.0))
        throw validation_error("bandwidth must lie in (0,1)");
    if (bandwidth_site_count(shape.n, bandwidth) < 2)
        throw validation_error("bandwidth too small: floor(n h) >= 2 required");
    if (regression && !(regression->lipschitz > 0.0))
        throw validation_error("regression Lipschitz constant must be > 0");
}

std::int64_t bandwidth_site_count(std::int64_t n, double h) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * h + 1e-9));
}

double BandwidthSchedule::value(int d, std::int64_t n) const {
    const double nd = static_cast<double>(n);
    switch (form) {
        case BandwidthForm::OptimalAs:
            return std::pow(std::log(nd) / std::pow(nd, d), 1.0 / (2.0 + d));
        case BandwidthForm::OptimalLp:
            return std::pow(nd, -static_cast<double>(d) / (2.0 + d));
        case BandwidthForm::PowerLog:
            return std::pow(nd, -theta2) * std::pow(std::log(nd), theta1);
    }
    throw validation_error("unknown bandwidth form");
}

void BandwidthSchedule::validate(int d, std::span<const std::int64_t> ns) const {
    if (form == BandwidthForm::PowerLog) {
        if (!(theta1 >= 0.0) || !(theta2 >= 0.0))
            throw validation_error("power-log schedule needs theta1, theta2 >= 0");
        if (!(theta2 > 0.0))
            throw validation_error("power-log schedule needs theta2 > 0 for h_n -> 0");
        if (theta2 > 1.0 || (theta2 == 1.0 && theta1 <= 0.0))
            throw validation_error("power-log schedule violates n h_n -> infinity");
    }
    double prev_h = 1.0, prev_nh = 0.0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const double h = value(d, ns[k]);
        if (!(h > 0.0) || !(h < 1.0))
            throw validation_error("schedule leaves (0,1) at n = " + std::to_string(ns[k]));
        if (bandwidth_site_count(ns[k], h) < 2)
            throw validation_error("floor(n h_n) < 2 at n = " + std::to_string(ns[k]));
        const double nh = static_cast<double>(ns[k]) * h;
        if (k > 0 && !(h < prev_h))
            throw validation_error("h_n not decreasing over the configured n range");
        if (k > 0 && !(nh > prev_nh))
            throw validation_error("n h_n not increasing over the configured n range");
        prev_h = h;
        prev_nh = nh;
    }
}

std::int64_t EvalGrid::point_count() const {
    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= points_per_axis;
    return total;
}

std::int64_t EvalGrid::cube_count() const {
    if (!has_covering) return 0;
    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= cubes_per_axis;
    return total;
}

EvalGrid make_uniform_grid(int d, std::int64_t points_per_axis) {
    if (d < 1 || points_per_axis < 2)
        throw configuration_error("uniform grid needs d >= 1 and >= 2 points per axis");
    EvalGrid grid;
    grid.d = d;
    grid.points_per_axis = points_per_axis;
    return grid;
}

EvalGrid make_uniform_grid_with_spacing(int d, double spacing) {
    if (!(spacing > 0.0) || spacing > 1.0)
        throw configuration_error("uniform grid spacing must lie in (0,1]");
    return make_uniform_grid(d, static_cast<std::int64_t>(std::ceil(1.0 / spacing)) + 1);
}

EvalGrid make_covering_grid(int d, double h, double target_rate, std::int64_t max_total_cubes,
                            std::int64_t max_points_per_axis) {
    if (!(h > 0.0) || !(target_rate > 0.0))
        throw configuration_error("covering grid needs h > 0 and a positive target rate");
    EvalGrid grid;
    grid.d = d;
    grid.has_covering = true;
    grid.requested_side = target_rate * std::pow(h, 2 * d + 1);
    double side = std::max(grid.requested_side, 0x1.0p-20);
    grid.capped = side > grid.requested_side;
    std::int64_t per_axis = static_cast<std::int64_t>(std::ceil(1.0 / side));
    const auto axis_cap = static_cast<std::int64_t>(
        std::floor(std::pow(static_cast<double>(max_total_cubes), 1.0 / d)));
    if (per_axis > axis_cap) {
        per_axis = std::max<std::int64_t>(axis_cap, 1);
        grid.capped = true;
    }
    grid.cubes_per_axis = per_axis;

    const double spacing = std::min(h / 8.0, grid.cube_side());
    std::int64_t points = static_cast<std::int64_t>(std::ceil(1.0 / spacing)) + 1;
    if (points > max_points_per_axis) {
        points = max_points_per_axis;
        grid.capped = true;
    }
    grid.points_per_axis = std::max<std::int64_t>(points, 2);
    return grid;
}

double weight(const EstimationProblem& problem, std::span<const double> x, const Index& i) {
    check_point(x, problem.shape.d);
    if (!lattice_box(problem.shape).contains(i))
        throw domain_error("site index outside the lattice");
    std::vector<double> u(x.size());
    for (std::size_t a = 0; a < x.size(); ++a)
        u[a] = scaled_offset(x[a], i[a], static_cast<double>(problem.shape.n), problem.bandwidth);
    return kernel_eval(problem.kernel, u);
}

double weight_sum(const EstimationProblem& problem, std::span<const double> x) {
    check_point(x, problem.shape.d);
    double sum = 0.0;
    std::int64_t count = 0;
    visit_window(problem.kernel, x, problem.shape.n, problem.bandwidth,
                 [&](std::int64_t, double w) {
                     sum += w;
                     ++count;
                 });
    if (count == 0)
        throw degenerate_bandwidth_error("empty kernel window: floor(n h) >= 2 violated");
    return sum;
}

double estimate(const EstimationProblem& problem, std::span<const double> Y,
                std::span<const double> x) {
    check_point(x, problem.shape.d);
    if (static_cast<std::int64_t>(Y.size()) != problem.shape.site_count())
        throw domain_error("observation array size != lattice site count");
    double sum_w = 0.0, sum_wy = 0.0;
    visit_window(problem.kernel, x, problem.shape.n, problem.bandwidth,
                 [&](std::int64_t flat, double w) {
                     sum_w += w;
                     sum_wy += w * Y[static_cast<std::size_t>(flat)];
                 });
    if (sum_w <= 0.0)
        throw degenerate_bandwidth_error("empty kernel window: floor(n h) >= 2 violated");
    return sum_wy / sum_w;
}

namespace {

// g(i/n) for the flat site index, reusing one coordinate buffer.
struct DesignEvaluator {
    const EstimationProblem& problem;
    mutable std::vector<double> coords;

    explicit DesignEvaluator(const EstimationProblem& p)
        : problem(p), coords(static_cast<std::size_t>(p.shape.d)) {}

    double operator()(std::int64_t flat) const {
        const double n = static_cast<double>(problem.shape.n);
        for (int a = problem.shape.d - 1; a >= 0; --a) {
            coords[static_cast<std::size_t>(a)] = static_cast<double>(flat % problem.shape.n + 1) / n;
            flat /= problem.shape.n;
        }
        return problem.regression->eval(coords);
    }
};

} // namespace

double expected_estimate(const EstimationProblem& problem, std::span<const double> x) {
    check_point(x, problem.shape.d);
    if (!problem.regression)
        throw configuration_error("expected_estimate needs the true regression function");
    const DesignEvaluator g(problem);
    double sum_w = 0.0, sum_wg = 0.0;
    visit_window(problem.kernel, x, problem.shape.n, problem.bandwidth,
                 [&](std::int64_t flat, double w) {
                     sum_w += w;
                     sum_wg += w * g(flat);
                 });
    if (sum_w <= 0.0)
        throw degenerate_bandwidth_error("empty kernel window: floor(n h) >= 2 violated");
    return sum_wg / sum_w;
}

double bias_at(const EstimationProblem& problem, std::span<const double> x) {
    return expected_estimate(problem, x) - problem.regression->eval(x);
}

namespace {

// Inclusive prefix table over the lattice for O(2^d) window sums.
class PrefixSums {
public:
    PrefixSums(const LatticeShape& shape, std::span<const double> cells) : shape_(shape) {
        table_ = std::vector<double>(cells.begin(), cells.end());
        std::int64_t stride = 1;
        for (int a = shape.d - 1; a >= 0; --a) {
            axis_accumulate(stride, stride * shape.n);
            stride *= shape.n;
        }
    }

    // Sum over the box [lo, hi] (1-based inclusive per axis).
    double box_sum(std::span<const AxisRange> box) const {
        double total = 0.0;
        const int d = shape_.d;
        for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
            std::int64_t flat = 0;
            int sign = 1;
            bool valid = true;
            for (int a = 0; a < d; ++a) {
                std::int64_t idx;
                if (mask & (1ull << a)) {
                    idx = box[static_cast<std::size_t>(a)].lo - 1; // exclusive corner
                    sign = -sign;
                } else {
                    idx = box[static_cast<std::size_t>(a)].hi;
                }
                if (idx < 1) {
                    valid = false;
                    break;
                }
                flat = flat * shape_.n + (idx - 1);
            }
            if (valid) total += sign * table_[static_cast<std::size_t>(flat)];
        }
        return total;
    }

private:
    void axis_accumulate(std::int64_t stride, std::int64_t block) {
        const std::int64_t total = static_cast<std::int64_t>(table_.size());
        for (std::int64_t base = 0; base < total; base += block)
            for (std::int64_t off = stride; off < block; ++off)
                table_[static_cast<std::size_t>(base + off)] +=
                    table_[static_cast<std::size_t>(base + off - stride)];
    }

    LatticeShape shape_;
    std::vector<double> table_;
};

struct GridScan {
    double sup = 0.0;
    std::int64_t arg_flat = -1;
    double a1 = 0.0, a2 = 0.0;
};

} // namespace

SupReport sup_deviation(const EstimationProblem& problem, std::span<const double> Y,
                        const EvalGrid& grid, DeviationTarget target) {
    problem.validate();
    if (!problem.regression)
        throw configuration_error("sup_deviation needs the true regression function");
    if (grid.d != problem.shape.d) throw configuration_error("grid dimension mismatch");
    if (static_cast<std::int64_t>(Y.size()) != problem.shape.site_count())
        throw domain_error("observation array size != lattice site count");

    const int d = problem.shape.d;
    const std::int64_t P = grid.points_per_axis;
    const double spacing = 1.0 / static_cast<double>(P - 1);
    const std::int64_t total_points = grid.point_count();
    const std::int64_t M = grid.has_covering ? grid.cubes_per_axis : 0;

    const bool fast = problem.kernel.kind == KernelKind::Uniform;

    // Residuals and (for the covering diagnostics) raw observations and design
    // values, behind prefix tables on the uniform fast path.
    const DesignEvaluator design(problem);
    std::vector<double> residual(Y.size());
    std::vector<double> gvals(Y.size());
    for (std::size_t f = 0; f < Y.size(); ++f) {
        gvals[f] = design(static_cast<std::int64_t>(f));
        residual[f] = Y[f] - gvals[f];
    }

    std::optional<PrefixSums> eps_prefix, y_prefix, g_prefix;
    if (fast) {
        eps_prefix.emplace(problem.shape, residual);
        if (grid.has_covering || target == DeviationTarget::Truth) {
            y_prefix.emplace(problem.shape, Y);
            g_prefix.emplace(problem.shape, gvals);
        }
    }

    const double n = static_cast<double>(problem.shape.n);
    const double h = problem.bandwidth;

    // V_n, g_n and E g_n at one point. The uniform-kernel path uses window
    // means via prefix sums; the generic path walks the window once.
    auto evaluate_point = [&](std::span<const double> x, double* gn, double* egn) -> double {
        if (fast) {
            std::vector<AxisRange> box(static_cast<std::size_t>(d));
            for (int a = 0; a < d; ++a) {
                box[static_cast<std::size_t>(a)] = tight_range(x[static_cast<std::size_t>(a)], n, h);
                if (box[static_cast<std::size_t>(a)].hi < box[static_cast<std::size_t>(a)].lo)
                    throw degenerate_bandwidth_error("empty kernel window");
            }
            double count = 1.0;
            for (const auto& r : box) count *= static_cast<double>(r.hi - r.lo + 1);
            const double v = eps_prefix->box_sum(box) / count;
            if (gn) *gn = y_prefix->box_sum(box) / count;
            if (egn) *egn = g_prefix->box_sum(box) / count;
            return v;
        }
        double sum_w = 0.0, sum_wy = 0.0, sum_wg = 0.0;
        visit_window(problem.kernel, x, problem.shape.n, h, [&](std::int64_t flat, double w) {
            sum_w += w;
            sum_wy += w * Y[static_cast<std::size_t>(flat)];
            sum_wg += w * gvals[static_cast<std::size_t>(flat)];
        });
        if (sum_w <= 0.0) throw degenerate_bandwidth_error("empty kernel window");
        if (gn) *gn = sum_wy / sum_w;
        if (egn) *egn = sum_wg / sum_w;
        return (sum_wy - sum_wg) / sum_w;
    };

    // Cube-center values, needed for the covering diagnostics.
    std::vector<double> center_gn, center_egn, center_v;
    if (grid.has_covering) {
        const std::int64_t cubes = grid.cube_count();
        center_gn.assign(static_cast<std::size_t>(cubes), 0.0);
        center_egn.assign(static_cast<std::size_t>(cubes), 0.0);
        center_v.assign(static_cast<std::size_t>(cubes), 0.0);
        parallel_for(cubes, [&](std::int64_t k) {
            std::vector<double> c(static_cast<std::size_t>(d));
            std::int64_t rest = k;
            for (int a = d - 1; a >= 0; --a) {
                c[static_cast<std::size_t>(a)] =
                    (static_cast<double>(rest % M) + 0.5) / static_cast<double>(M);
                rest /= M;
            }
            double gn = 0.0, egn = 0.0;
            center_v[static_cast<std::size_t>(k)] = evaluate_point(c, &gn, &egn);
            center_gn[static_cast<std::size_t>(k)] = gn;
            center_egn[static_cast<std::size_t>(k)] = egn;
        });
    }

    // Fine-grid scan, chunked for deterministic reduction.
    const std::int64_t chunks = std::min<std::int64_t>(total_points, 8LL * worker_count());
    std::vector<GridScan> partial(static_cast<std::size_t>(chunks));
    const std::int64_t chunk_len = (total_points + chunks - 1) / chunks;
    parallel_for(chunks, [&](std::int64_t chunk) {
        GridScan scan;
        std::vector<double> x(static_cast<std::size_t>(d));
        const std::int64_t begin = chunk * chunk_len;
        const std::int64_t end = std::min(begin + chunk_len, total_points);
        for (std::int64_t p = begin; p < end; ++p) {
            std::int64_t rest = p;
            for (int a = d - 1; a >= 0; --a) {
                x[static_cast<std::size_t>(a)] = std::min(1.0, static_cast<double>(rest % P) * spacing);
                rest /= P;
            }
            std::int64_t cube = 0;
            if (grid.has_covering) {
                for (int a = 0; a < d; ++a) {
                    const auto idx = std::min(
                        static_cast<std::int64_t>(x[static_cast<std::size_t>(a)] * static_cast<double>(M)),
                        M - 1);
                    cube = cube * M + idx;
                }
            }
            double gn = 0.0, egn = 0.0;
            const bool want_parts = grid.has_covering;
            const bool want_gn = want_parts || target == DeviationTarget::Truth;
            const double v_mean =
                evaluate_point(x, want_gn ? &gn : nullptr, want_parts ? &egn : nullptr);
            const double v = target == DeviationTarget::Mean
                                 ? v_mean
                                 : gn - problem.regression->eval(x);
            const double av = std::abs(v);
            if (av > scan.sup || scan.arg_flat < 0) {
                scan.sup = av;
                scan.arg_flat = p;
            }
            if (want_parts) {
                scan.a1 = std::max(scan.a1, std::abs(gn - center_gn[static_cast<std::size_t>(cube)]));
                scan.a2 = std::max(scan.a2, std::abs(egn - center_egn[static_cast<std::size_t>(cube)]));
            }
        }
        partial[static_cast<std::size_t>(chunk)] = scan;
    });

    GridScan best;
    for (const auto& scan : partial) {
        if (scan.arg_flat < 0) continue;
        if (best.arg_flat < 0 || scan.sup > best.sup) {
            best.sup = scan.sup;
            best.arg_flat = scan.arg_flat;
        }
        best.a1 = std::max(best.a1, scan.a1);
        best.a2 = std::max(best.a2, scan.a2);
    }

    SupReport report;
    report.sup_deviation = best.sup;
    report.grid_points = total_points;
    report.argmax.assign(static_cast<std::size_t>(d), 0.0);
    std::int64_t rest = best.arg_flat;
    for (int a = d - 1; a >= 0; --a) {
        report.argmax[static_cast<std::size_t>(a)] =
            std::min(1.0, static_cast<double>(rest % P) * spacing);
        rest /= P;
    }
    if (grid.has_covering) {
        report.has_covering = true;
        report.a1 = best.a1;
        report.a2 = best.a2;
        report.a3 = 0.0;
        for (const double v : center_v) report.a3 = std::max(report.a3, std::abs(v));
        report.cube_count = grid.cube_count();
        report.cube_side = grid.cube_side();
        report.capped = grid.capped;
    }
    return report;
}

double exact_squared_sum_moment(const EstimationProblem& problem, const GeneratorSpec& generator,
                                std::span<const double> x) {
    check_point(x, problem.shape.d);
    const int d = problem.shape.d;
    const std::int64_t radius = generator.dependence_radius(d);

    // Collect the window once; pair sites within the dependence radius.
    std::vector<std::pair<Index, double>> window;
    visit_window(problem.kernel, x, problem.shape.n, problem.bandwidth,
                 [&](std::int64_t flat, double w) {
                     Index i(static_cast<std::size_t>(d));
                     std::int64_t rest = flat;
                     for (int a = d - 1; a >= 0; --a) {
                         i[static_cast<std::size_t>(a)] = rest % problem.shape.n + 1;
                         rest /= problem.shape.n;
                     }
                     window.emplace_back(std::move(i), w);
                 });
    // Index weights by site for O(window * (2r+1)^d) pairing.
    const Box sites = lattice_box(problem.shape);
    std::vector<double> weight_by_flat(static_cast<std::size_t>(problem.shape.site_count()), 0.0);
    for (const auto& [i, w] : window)
        weight_by_flat[static_cast<std::size_t>(sites.flatten(i))] = w;

    const Box lag_box{Index(static_cast<std::size_t>(d), -radius),
                      Index(static_cast<std::size_t>(d), radius)};
    std::vector<std::pair<Index, double>> lags;
    lag_box.for_each([&](const Index& lag, std::int64_t) {
        const double cov = theoretical_covariance(generator, lag);
        if (cov != 0.0) lags.emplace_back(lag, cov);
    });

    double total = 0.0;
    Index other(static_cast<std::size_t>(d));
    for (const auto& [i, w] : window) {
        for (const auto& [lag, cov] : lags) {
            bool inside = true;
            for (int a = 0; a < d; ++a) {
                other[static_cast<std::size_t>(a)] = i[static_cast<std::size_t>(a)] + lag[static_cast<std::size_t>(a)];
                if (other[static_cast<std::size_t>(a)] < 1 || other[static_cast<std::size_t>(a)] > problem.shape.n) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            const double w2 = weight_by_flat[static_cast<std::size_t>(sites.flatten(other))];
            if (w2 != 0.0) total += w * w2 * cov;
        }
    }
    return total;
}

} // namespace latsm
