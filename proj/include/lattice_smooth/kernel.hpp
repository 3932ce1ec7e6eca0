#pragma once

#include <span>
#include <vector>

#include "lattice_smooth/errors.hpp"

namespace latsm {

enum class KernelKind { Uniform, Pedestal };

/// A probability kernel on [-1,1]^d that is symmetric, bounded away from zero
/// on its support, and Lipschitz inside the support (jumps across the support
/// boundary are allowed; the Lipschitz requirement applies on [-1,1]^d only).
///
///   Uniform    K(u) = 2^{-d}
///   Pedestal   K(u) = (a + b (1 - ||u||_inf)) / Z,  Z = 2^d (a + b/(d+1))
///
/// Common compact kernels (Epanechnikov, triangular) vanish at the support
/// boundary and so violate the lower bound c > 0; the pedestal keeps
/// c = a/Z > 0 while still exercising a nonconstant shape.
struct KernelSpec {
    KernelKind kind = KernelKind::Uniform;
    int d = 1;
    double pedestal = 0.0; // a
    double tent = 0.0;     // b

    // Certified constants: c <= K <= C on [-1,1]^d, |K(x)-K(y)| <= eta ||x-y||_inf.
    // Factories fill the exact values; tests may deliberately misdeclare them.
    double lower = 0.0;     // c
    double upper = 0.0;     // C
    double lipschitz = 0.0; // eta
    double normalizer = 1.0;

    static KernelSpec uniform(int d);
    static KernelSpec pedestal_kernel(int d, double a, double b);
};

/// Roundoff slack on the support test: ||u||_inf <= 1 + kSupportFuzz counts as
/// inside. Keeps the closed window closed when (x - i/n)/h lands a few ulps
/// past 1 at exact-boundary geometry.
inline constexpr double kSupportFuzz = 1e-12;

/// K(u); exactly 0 outside the (fuzzed) support, within [c, C] inside.
double kernel_eval(const KernelSpec& kernel, std::span<const double> u);

struct A1Report {
    double min_value = 0.0;
    double max_value = 0.0;
    double lipschitz_quotient = 0.0;
    double integral = 0.0;
    double integral_error_bound = 0.0;
    bool pass = false;
};

/// Certifies the declared constants on a (2*resolution+1)^d grid over
/// [-1,1]^d: extrema against [c, C], adjacent-pair Lipschitz quotients against
/// eta, and a trapezoid estimate of the integral against 1.
A1Report verify_a1(const KernelSpec& kernel, int resolution);

} // namespace latsm
