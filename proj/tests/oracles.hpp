#pragma once

// Independent oracles for the unit and acceptance suites: exhaustive
// enumeration, direct convolution, closed-form covariances and quadrature.
// Deliberately naive; never reuses the library's windowed/prefix paths.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "lattice_smooth/estimator.hpp"
#include "lattice_smooth/field_gen.hpp"
#include "lattice_smooth/lattice.hpp"

namespace oracles {

using latsm::Box;
using latsm::Index;

// Full-lattice summation of a_i(x) (and optionally a_i(x) f(i)).
inline double brute_weight_sum(const latsm::EstimationProblem& problem,
                               std::span<const double> x) {
    double total = 0.0;
    latsm::lattice_box(problem.shape).for_each([&](const Index& i, std::int64_t) {
        total += latsm::weight(problem, x, i);
    });
    return total;
}

inline double brute_estimate(const latsm::EstimationProblem& problem, std::span<const double> Y,
                             std::span<const double> x) {
    double num = 0.0, den = 0.0;
    latsm::lattice_box(problem.shape).for_each([&](const Index& i, std::int64_t flat) {
        const double w = latsm::weight(problem, x, i);
        num += w * Y[static_cast<std::size_t>(flat)];
        den += w;
    });
    return num / den;
}

inline double brute_expected_estimate(const latsm::EstimationProblem& problem,
                                      std::span<const double> x) {
    double num = 0.0, den = 0.0;
    const double n = static_cast<double>(problem.shape.n);
    latsm::lattice_box(problem.shape).for_each([&](const Index& i, std::int64_t) {
        const double w = latsm::weight(problem, x, i);
        std::vector<double> c(i.size());
        for (std::size_t a = 0; a < i.size(); ++a) c[a] = static_cast<double>(i[a]) / n;
        num += w * problem.regression->eval(c);
        den += w;
    });
    return num / den;
}

// eps_i = sum_j a_j xi_{i-j} assembled directly from the documented padded
// innovation stream.
inline std::vector<double> direct_convolution(const latsm::GeneratorSpec& spec,
                                              const latsm::LatticeShape& shape,
                                              std::uint64_t seed) {
    const Box pad = spec.innovation_box(shape);
    std::vector<double> field;
    latsm::lattice_box(shape).for_each([&](const Index& i, std::int64_t) {
        double acc = 0.0;
        for (const auto& c : spec.coefficients) {
            Index shifted(i.size());
            for (std::size_t a = 0; a < i.size(); ++a) shifted[a] = i[a] - c.offset[a];
            acc += c.value * spec.innovation.draw(seed, static_cast<std::uint64_t>(pad.flatten(shifted)));
        }
        field.push_back(acc);
    });
    return field;
}

// Closed-form moving-average covariance sum sigma^2 sum_j a_j a_{j+lag}.
inline double ma_covariance(const latsm::GeneratorSpec& spec, const Index& lag) {
    std::map<Index, double> table;
    for (const auto& c : spec.coefficients) table[c.offset] = c.value;
    double sum = 0.0;
    for (const auto& [offset, value] : table) {
        Index target = offset;
        for (std::size_t a = 0; a < lag.size(); ++a) target[a] += lag[a];
        auto hit = table.find(target);
        if (hit != table.end()) sum += value * hit->second;
    }
    return spec.innovation.variance() * sum;
}

// E S_n(x)^2 by the full double sum over all lattice site pairs.
inline double brute_squared_sum_moment(const latsm::EstimationProblem& problem,
                                       const latsm::GeneratorSpec& generator,
                                       std::span<const double> x) {
    std::vector<std::pair<Index, double>> sites;
    latsm::lattice_box(problem.shape).for_each([&](const Index& i, std::int64_t) {
        sites.emplace_back(i, latsm::weight(problem, x, i));
    });
    double total = 0.0;
    Index lag(static_cast<std::size_t>(problem.shape.d));
    for (const auto& [i, wi] : sites) {
        if (wi == 0.0) continue;
        for (const auto& [j, wj] : sites) {
            if (wj == 0.0) continue;
            for (std::size_t a = 0; a < lag.size(); ++a) lag[a] = j[a] - i[a];
            total += wi * wj * latsm::theoretical_covariance(generator, lag);
        }
    }
    return total;
}

// Plain composite Simpson; the tests' own quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int k = 1; k < panels; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
    return acc * h / 3.0;
}

inline double mean(const std::vector<double>& values) {
    double acc = 0.0;
    for (const double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

inline double sample_sd(const std::vector<double>& values) {
    const double m = mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
}

} // namespace oracles
