#include "lattice_smooth/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lattice_smooth/quadrature.hpp"
#include "lattice_smooth/rng.hpp"

namespace latsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

YoungFunctionBeta::YoungFunctionBeta(double beta_value) : beta(beta_value) {
    if (!(beta > 0.0)) throw validation_error("Young function shape beta must be > 0");
    xi = (beta < 1.0) ? std::pow((1.0 - beta) / beta, 1.0 / beta) : 0.0;
}

double YoungFunctionBeta::operator()(double x) const {
    return std::exp(std::pow(x + xi, beta)) - std::exp(std::pow(xi, beta));
}

double YoungFunctionBeta::unit_level() const {
    return std::pow(std::log(1.0 + std::exp(std::pow(xi, beta))), 1.0 / beta) - xi;
}

double psi_eval(const YoungFunctionBeta& yf, double x) {
    if (x < 0.0) throw domain_error("psi_beta is defined on x >= 0");
    if (x == 0.0) return 0.0;
    return yf(x);
}

double beta_of_q(double q) {
    if (!(q > 0.0) || !(q < 2.0)) throw domain_error("beta(q) needs 0 < q < 2");
    return 2.0 * q / (2.0 - q);
}

MarginalSpec MarginalSpec::point_mass(double m) {
    MarginalSpec z;
    z.kind = MarginalKind::PointMass;
    z.param = m;
    z.validate();
    return z;
}

MarginalSpec MarginalSpec::uniform(double a) {
    MarginalSpec z;
    z.kind = MarginalKind::Uniform;
    z.param = a;
    z.validate();
    return z;
}

MarginalSpec MarginalSpec::gaussian(double sigma) {
    MarginalSpec z;
    z.kind = MarginalKind::Gaussian;
    z.param = sigma;
    z.validate();
    return z;
}

MarginalSpec MarginalSpec::empirical(std::vector<double> values) {
    MarginalSpec z;
    z.kind = MarginalKind::Empirical;
    z.param = 0.0;
    z.sample = std::move(values);
    // Tail quantiles read the magnitudes in descending order.
    for (double& v : z.sample) v = std::abs(v);
    std::sort(z.sample.begin(), z.sample.end(), std::greater<double>());
    z.validate();
    return z;
}

void MarginalSpec::validate() const {
    switch (kind) {
        case MarginalKind::PointMass:
            if (!(param >= 0.0) || !std::isfinite(param))
                throw validation_error("point mass level must be finite and >= 0");
            return;
        case MarginalKind::Uniform:
            if (!(param > 0.0)) throw validation_error("uniform marginal needs a > 0");
            return;
        case MarginalKind::Gaussian:
            if (!(param > 0.0)) throw validation_error("gaussian marginal needs sigma > 0");
            return;
        case MarginalKind::Empirical:
            if (sample.empty()) throw validation_error("empirical marginal needs a nonempty sample");
            for (const double v : sample)
                if (!std::isfinite(v)) throw validation_error("empirical sample must be finite");
            return;
    }
    throw validation_error("unknown marginal kind");
}

bool MarginalSpec::is_zero() const {
    switch (kind) {
        case MarginalKind::PointMass: return param == 0.0;
        case MarginalKind::Empirical:
            return std::all_of(sample.begin(), sample.end(), [](double v) { return v == 0.0; });
        default: return false;
    }
}

double quantile_q(const MarginalSpec& Z, double u) {
    if (u < 0.0 || u > 1.0) throw domain_error("tail quantile argument must lie in [0,1]");
    switch (Z.kind) {
        case MarginalKind::PointMass: return u < 1.0 ? Z.param : 0.0;
        case MarginalKind::Uniform: return Z.param * (1.0 - u);
        case MarginalKind::Gaussian:
            if (u >= 1.0) return 0.0;
            // -Phi^{-1}(u/2): stable for u down to the underflow threshold.
            return -Z.param * normal_quantile(0.5 * u);
        case MarginalKind::Empirical: {
            const auto n = static_cast<double>(Z.sample.size());
            const auto k = static_cast<std::size_t>(std::floor(u * n));
            if (k >= Z.sample.size()) return 0.0;
            return Z.sample[k]; // tail-inverse: right-continuous in u, drops at u = k/n
        }
    }
    throw validation_error("unknown marginal kind");
}

double lp_norm(const MarginalSpec& Z, double p) {
    if (!(p > 0.0)) throw domain_error("lp_norm needs p > 0");
    switch (Z.kind) {
        case MarginalKind::PointMass: return Z.param;
        case MarginalKind::Uniform: return Z.param / std::pow(p + 1.0, 1.0 / p);
        case MarginalKind::Gaussian: {
            // E|Z|^p = sigma^p 2^{p/2} Gamma((p+1)/2) / Gamma(1/2)
            const double log_moment = 0.5 * p * std::log(2.0) +
                                      std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5);
            return Z.param * std::exp(log_moment / p);
        }
        case MarginalKind::Empirical: {
            double acc = 0.0;
            for (const double v : Z.sample) acc += std::pow(v, p);
            return std::pow(acc / static_cast<double>(Z.sample.size()), 1.0 / p);
        }
    }
    throw validation_error("unknown marginal kind");
}

namespace {

// True when E psi_beta(|Z|/c) = +inf for every c > 0.
bool psi_moment_divergent(const MarginalSpec& Z, double beta) {
    return Z.kind == MarginalKind::Gaussian && beta > 2.0;
}

// int_0^alpha psi_beta(Q(u)/c) du. Exact for point masses and samples;
// adaptive quadrature for Uniform; for Gaussian the integral is taken in
// v = log(1/u), where the integrand decays exponentially whenever it is
// finite, and panels are accumulated until they stop contributing.
double psi_tail_integral(const MarginalSpec& Z, const YoungFunctionBeta& yf, double c,
                         double alpha, double tol) {
    if (alpha <= 0.0) return 0.0;
    switch (Z.kind) {
        case MarginalKind::PointMass:
            return alpha * yf(Z.param / c);
        case MarginalKind::Empirical: {
            const auto n = static_cast<double>(Z.sample.size());
            const auto full = static_cast<std::size_t>(std::floor(alpha * n));
            double acc = 0.0;
            for (std::size_t k = 0; k < full && k < Z.sample.size(); ++k)
                acc += yf(Z.sample[k] / c) / n;
            if (full < Z.sample.size()) {
                const double remainder = alpha - static_cast<double>(full) / n;
                if (remainder > 0.0) acc += remainder * yf(Z.sample[full] / c);
            }
            return acc;
        }
        case MarginalKind::Uniform: {
            const double a = Z.param;
            // The integrand is largest at u = 0; an overflow there means the
            // level is past any threshold and Simpson would produce NaN.
            if (!std::isfinite(yf(a / c))) return kInf;
            return integrate_adaptive(
                [&](double u) { return yf(a * (1.0 - u) / c); }, 0.0, alpha, 0.1 * tol);
        }
        case MarginalKind::Gaussian: {
            auto integrand = [&](double v) {
                const double u = std::exp(-v);
                return yf(quantile_q(Z, u) / c) * u;
            };
            const double v0 = std::log(1.0 / alpha);
            const double width = 2.0;
            double acc = 0.0;
            double prev = kInf;
            for (int j = 0; j < 400; ++j) {
                const double panel =
                    integrate_gl15(integrand, v0 + j * width, v0 + (j + 1) * width);
                if (!std::isfinite(panel)) return kInf;
                acc += panel;
                if (panel < 0.05 * tol && panel <= prev) return acc;
                if (j > 40 && panel >= prev) return kInf; // non-decaying tail: divergent
                prev = panel;
            }
            throw numerical_error("psi tail integral: panel cap reached without convergence");
        }
    }
    throw validation_error("unknown marginal kind");
}

LuxemburgResult invert_unit_level(const MarginalSpec& Z, double beta, double alpha, double tol) {
    if (!(tol > 0.0)) throw domain_error("tolerance must be > 0");
    const YoungFunctionBeta yf(beta);
    if (Z.is_zero() || alpha <= 0.0) return {0.0, LuxemburgStatus::Ok};
    if (psi_moment_divergent(Z, beta)) return {kInf, LuxemburgStatus::Divergent};

    auto level = [&](double c) { return psi_tail_integral(Z, yf, c, alpha, tol); };

    // Bracket: double until the level drops to 1.
    double hi = std::max(quantile_q(Z, std::min(1.0, 0.5 * alpha + 0.5)), 1.0);
    int doublings = 0;
    while (level(hi) > 1.0) {
        hi *= 2.0;
        if (++doublings > 200)
            return {kInf, LuxemburgStatus::Divergent};
    }
    double lo = 0.5 * hi;
    while (level(lo) <= 1.0) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300) return {0.0, LuxemburgStatus::Ok};
    }
    // Bisection; [lo, hi] always brackets the infimum, hi is returned so the
    // defining inequality E psi(|Z|/c) <= 1 holds at the result.
    const double width_target = std::max(1e-3 * tol, 1e-14);
    int iterations = 0;
    while (hi - lo > width_target * hi) {
        if (++iterations > 200) {
            std::ostringstream diag;
            diag << "luxemburg bisection cap: bracket [" << lo << ", " << hi << "], tol " << tol;
            throw numerical_error(diag.str());
        }
        const double mid = 0.5 * (lo + hi);
        if (level(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return {hi, LuxemburgStatus::Ok};
}

} // namespace

LuxemburgResult luxemburg_norm(const MarginalSpec& Z, double beta, double tol) {
    Z.validate();
    return invert_unit_level(Z, beta, 1.0, tol);
}

LuxemburgResult c_k_coefficient(const MarginalSpec& Z, double alpha, double beta, double tol) {
    Z.validate();
    if (alpha < 0.0 || alpha > 1.0) throw domain_error("alpha must lie in [0,1]");
    return invert_unit_level(Z, beta, alpha, tol);
}

double d_k_coefficient(const MarginalSpec& Z, double alpha, double p) {
    Z.validate();
    if (!(p > 2.0)) throw domain_error("d_k needs p > 2");
    if (alpha < 0.0 || alpha > 1.0) throw domain_error("alpha must lie in [0,1]");
    if (alpha == 0.0 || Z.is_zero()) return 0.0;
    switch (Z.kind) {
        case MarginalKind::PointMass:
            return Z.param * std::pow(alpha, 1.0 / p);
        case MarginalKind::Empirical: {
            const auto n = static_cast<double>(Z.sample.size());
            const auto full = static_cast<std::size_t>(std::floor(alpha * n));
            double acc = 0.0;
            for (std::size_t k = 0; k < full && k < Z.sample.size(); ++k)
                acc += std::pow(Z.sample[k], p) / n;
            if (full < Z.sample.size()) {
                const double remainder = alpha - static_cast<double>(full) / n;
                if (remainder > 0.0) acc += remainder * std::pow(Z.sample[full], p);
            }
            return std::pow(acc, 1.0 / p);
        }
        case MarginalKind::Uniform: {
            const double a = Z.param;
            const double integral = integrate_adaptive(
                [&](double u) { return std::pow(a * (1.0 - u), p); }, 0.0, alpha, 1e-13);
            return std::pow(integral, 1.0 / p);
        }
        case MarginalKind::Gaussian: {
            auto integrand = [&](double v) {
                const double u = std::exp(-v);
                return std::pow(quantile_q(Z, u), p) * u;
            };
            const double v0 = std::log(1.0 / alpha);
            const double width = 2.0;
            double acc = 0.0;
            for (int j = 0; j < 400; ++j) {
                const double panel =
                    integrate_gl15(integrand, v0 + j * width, v0 + (j + 1) * width);
                acc += panel;
                if (panel < 1e-15 * std::max(acc, 1e-300)) return std::pow(acc, 1.0 / p);
            }
            throw numerical_error("d_k integral: panel cap reached without convergence");
        }
    }
    throw validation_error("unknown marginal kind");
}

std::vector<double> default_p_grid() {
    std::vector<double> grid;
    const int count = 25;
    const double lo = 2.01, hi = 64.0;
    for (int j = 0; j < count; ++j)
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(j) / (count - 1)));
    return grid;
}

NormEquivalenceDiag norm_equivalence_diag(const MarginalSpec& Z, double beta,
                                          std::span<const double> p_grid) {
    Z.validate();
    if (p_grid.empty()) throw domain_error("norm equivalence needs a nonempty p grid");
    NormEquivalenceDiag diag;
    diag.p_grid.assign(p_grid.begin(), p_grid.end());
    diag.luxemburg = luxemburg_norm(Z, beta, 1e-10);
    double sup = 0.0;
    for (const double p : p_grid) {
        if (!(p > 2.0)) throw domain_error("norm equivalence grid needs p > 2");
        sup = std::max(sup, lp_norm(Z, p) / std::pow(p, 1.0 / beta));
    }
    diag.sup_scaled_lp = sup;
    return diag;
}

NormEquivalenceDiag norm_equivalence_diag(const MarginalSpec& Z, double beta) {
    const auto grid = default_p_grid();
    return norm_equivalence_diag(Z, beta, grid);
}

} // namespace latsm
