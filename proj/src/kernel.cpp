#include "lattice_smooth/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "lattice_smooth/lattice.hpp"

namespace latsm {

KernelSpec KernelSpec::uniform(int d) {
    if (d < 1) throw validation_error("kernel dimension must satisfy d >= 1");
    KernelSpec k;
    k.kind = KernelKind::Uniform;
    k.d = d;
    k.normalizer = std::ldexp(1.0, d); // 2^d
    k.lower = k.upper = 1.0 / k.normalizer;
    k.lipschitz = 0.0;
    return k;
}

KernelSpec KernelSpec::pedestal_kernel(int d, double a, double b) {
    if (d < 1) throw validation_error("kernel dimension must satisfy d >= 1");
    if (!(a > 0.0)) throw validation_error("pedestal height a must be > 0");
    if (!(b >= 0.0)) throw validation_error("tent weight b must be >= 0");
    KernelSpec k;
    k.kind = KernelKind::Pedestal;
    k.d = d;
    k.pedestal = a;
    k.tent = b;
    k.normalizer = std::ldexp(a + b / (d + 1.0), d); // 2^d (a + b/(d+1))
    k.lower = a / k.normalizer;
    k.upper = (a + b) / k.normalizer;
    k.lipschitz = b / k.normalizer;
    return k;
}

double kernel_eval(const KernelSpec& kernel, std::span<const double> u) {
    double m = 0.0;
    for (const double v : u) m = std::max(m, std::abs(v));
    if (m > 1.0 + kSupportFuzz) return 0.0;
    switch (kernel.kind) {
        case KernelKind::Uniform: return 1.0 / kernel.normalizer;
        case KernelKind::Pedestal:
            return (kernel.pedestal + kernel.tent * (1.0 - std::min(m, 1.0))) / kernel.normalizer;
    }
    return 0.0;
}

A1Report verify_a1(const KernelSpec& kernel, int resolution) {
    if (resolution < 8) throw domain_error("verify_a1 needs resolution >= 8");
    const int d = kernel.d;
    const Box grid{Index(d, -resolution), Index(d, resolution)};
    const std::int64_t total = grid.volume();
    const double step = 1.0 / resolution;

    std::vector<double> values(static_cast<std::size_t>(total));
    std::vector<double> point(d);
    grid.for_each([&](const Index& i, std::int64_t flat) {
        for (int a = 0; a < d; ++a) point[static_cast<std::size_t>(a)] = static_cast<double>(i[a]) * step;
        values[static_cast<std::size_t>(flat)] = kernel_eval(kernel, point);
    });

    A1Report report;
    report.min_value = *std::min_element(values.begin(), values.end());
    report.max_value = *std::max_element(values.begin(), values.end());

    // Adjacent grid pairs along each axis; trapezoid weights on the same pass.
    double quotient = 0.0;
    double integral = 0.0;
    grid.for_each([&](const Index& i, std::int64_t flat) {
        double w = 1.0;
        std::int64_t stride = 1;
        for (int a = d - 1; a >= 0; --a) {
            if (std::abs(i[a]) == resolution) w *= 0.5;
            if (i[a] < resolution) {
                const double diff = std::abs(values[static_cast<std::size_t>(flat + stride)] -
                                             values[static_cast<std::size_t>(flat)]);
                quotient = std::max(quotient, diff / step);
            }
            stride *= 2 * static_cast<std::int64_t>(resolution) + 1;
        }
        integral += w * values[static_cast<std::size_t>(flat)];
    });
    for (int a = 0; a < d; ++a) integral *= step;

    report.lipschitz_quotient = quotient;
    report.integral = integral;
    // Trapezoid cells stay inside [min_cell, max_cell], which are eta*step apart.
    report.integral_error_bound = kernel.lipschitz * step * std::ldexp(1.0, d) + 1e-9;

    const double tol = 1e-9;
    report.pass = report.min_value >= kernel.lower - tol && report.max_value <= kernel.upper + tol &&
                  report.lipschitz_quotient <= kernel.lipschitz + tol &&
                  std::abs(report.integral - 1.0) <= report.integral_error_bound;
    return report;
}

} // namespace latsm
