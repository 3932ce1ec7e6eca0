#pragma once

#include <functional>

namespace latsm {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth = 48);

/// 15-point Gauss-Legendre rule on [a, b]; exact for polynomials up to degree 29.
double integrate_gl15(const std::function<double(double)>& f, double a, double b);

} // namespace latsm
