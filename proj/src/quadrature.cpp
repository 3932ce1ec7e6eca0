#include "lattice_smooth/quadrature.hpp"

#include <cmath>

namespace latsm {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double integrate_gl15(const std::function<double(double)>& f, double a, double b) {
    // Nodes/weights for [-1, 1].
    static const double x[8] = {0.0,
                                0.2011940939974345,
                                0.3941513470775634,
                                0.5709721726085388,
                                0.7244177313601701,
                                0.8482065834104272,
                                0.9372733924007060,
                                0.9879925180204854};
    static const double w[8] = {0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
                                0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
                                0.0703660474881081, 0.0307532419961173};
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double sum = w[0] * f(c);
    for (int k = 1; k < 8; ++k) sum += w[k] * (f(c - hw * x[k]) + f(c + hw * x[k]));
    return sum * hw;
}

} // namespace latsm
