#include "lattice_smooth/field_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lattice_smooth/parallel.hpp"
#include "lattice_smooth/quadrature.hpp"
#include "lattice_smooth/rng.hpp"

namespace latsm {

void InnovationLaw::validate() const {
    switch (kind) {
        case InnovationLawKind::Gaussian:
            if (!(param >= 0.0) || !std::isfinite(param))
                throw validation_error("gaussian innovation needs sigma >= 0");
            return;
        case InnovationLawKind::Uniform:
            if (!(param > 0.0) || !std::isfinite(param))
                throw validation_error("uniform innovation needs half-width a > 0");
            return;
        case InnovationLawKind::Rademacher:
            return;
    }
    throw validation_error("unknown innovation law");
}

double InnovationLaw::variance() const {
    switch (kind) {
        case InnovationLawKind::Gaussian: return param * param;
        case InnovationLawKind::Uniform: return param * param / 3.0;
        case InnovationLawKind::Rademacher: return 1.0;
    }
    return 0.0;
}

bool InnovationLaw::bounded() const {
    return kind != InnovationLawKind::Gaussian || param == 0.0;
}

double InnovationLaw::bound() const {
    switch (kind) {
        case InnovationLawKind::Gaussian:
            if (param == 0.0) return 0.0;
            throw domain_error("gaussian innovations are unbounded");
        case InnovationLawKind::Uniform: return param;
        case InnovationLawKind::Rademacher: return 1.0;
    }
    return 0.0;
}

double InnovationLaw::draw(std::uint64_t seed, std::uint64_t counter) const {
    const double u = uniform01(seed, counter);
    switch (kind) {
        case InnovationLawKind::Gaussian: return param * normal_quantile(u);
        case InnovationLawKind::Uniform: return param * (2.0 * u - 1.0);
        case InnovationLawKind::Rademacher: return u < 0.5 ? -1.0 : 1.0;
    }
    return 0.0;
}

double link_eval(LinkFn link, double x) {
    switch (link) {
        case LinkFn::Sign: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case LinkFn::Tanh: return std::tanh(x);
    }
    return 0.0;
}

double link_bound(LinkFn) { return 1.0; }

double link_second_moment(LinkFn link, const InnovationLaw& law) {
    if (link == LinkFn::Sign) {
        // sign(xi)^2 = 1 a.s. for every shipped law with P(xi = 0) = 0.
        if (law.kind == InnovationLawKind::Gaussian && law.param == 0.0) return 0.0;
        return 1.0;
    }
    switch (law.kind) {
        case InnovationLawKind::Rademacher: {
            const double t = std::tanh(1.0);
            return t * t;
        }
        case InnovationLawKind::Uniform: {
            const double a = law.param;
            const double integral = integrate_adaptive(
                [](double t) { const double v = std::tanh(t); return v * v; }, 0.0, a, 1e-13);
            return integral / a;
        }
        case InnovationLawKind::Gaussian: {
            const double sigma = law.param;
            if (sigma == 0.0) return 0.0;
            const double integral = integrate_adaptive(
                [sigma](double t) {
                    const double v = std::tanh(sigma * t);
                    return v * v * std::exp(-0.5 * t * t);
                },
                0.0, 12.0, 1e-14);
            return 2.0 * integral / std::sqrt(2.0 * 3.14159265358979323846);
        }
    }
    return 0.0;
}

void GeneratorSpec::validate(int d) const {
    innovation.validate();
    if (kind == GeneratorKind::Linear) {
        if (coefficients.empty())
            throw validation_error("linear generator needs a nonempty coefficient table");
        std::map<Index, double> seen;
        for (const auto& c : coefficients) {
            if (static_cast<int>(c.offset.size()) != d)
                throw validation_error("coefficient offset dimension mismatch");
            if (!std::isfinite(c.value))
                throw validation_error("coefficient values must be finite");
            if (!seen.emplace(c.offset, c.value).second)
                throw validation_error("duplicate coefficient offset");
        }
    }
}

std::int64_t GeneratorSpec::dependence_radius(int d) const {
    switch (kind) {
        case GeneratorKind::IID: return 0;
        case GeneratorKind::MdNeighbor: return 1;
        case GeneratorKind::Linear: {
            std::int64_t diameter = 0;
            for (int a = 0; a < d; ++a) {
                std::int64_t lo = coefficients.front().offset[a];
                std::int64_t hi = lo;
                for (const auto& c : coefficients) {
                    lo = std::min(lo, c.offset[a]);
                    hi = std::max(hi, c.offset[a]);
                }
                diameter = std::max(diameter, hi - lo);
            }
            return diameter;
        }
    }
    return 0;
}

Box GeneratorSpec::innovation_box(const LatticeShape& shape) const {
    Box box = lattice_box(shape);
    if (kind == GeneratorKind::Linear) {
        for (int a = 0; a < shape.d; ++a) {
            std::int64_t lo = 0, hi = 0;
            for (const auto& c : coefficients) {
                lo = std::min(lo, c.offset[a]);
                hi = std::max(hi, c.offset[a]);
            }
            // eps_i needs xi_{i-j}: axis range [1 - max_j, n - min_j].
            box.lo[a] = 1 - hi;
            box.hi[a] = shape.n - lo;
        }
    } else if (kind == GeneratorKind::MdNeighbor) {
        box.lo[0] = 0; // xi_{i - e1} for i_1 = 1
    }
    return box;
}

bool GeneratorSpec::field_bounded() const { return innovation.bounded(); }

double GeneratorSpec::field_bound() const {
    switch (kind) {
        case GeneratorKind::IID: return innovation.bound();
        case GeneratorKind::MdNeighbor: return innovation.bound() * link_bound(link);
        case GeneratorKind::Linear: {
            double l1 = 0.0;
            for (const auto& c : coefficients) l1 += std::abs(c.value);
            return l1 * innovation.bound();
        }
    }
    return 0.0;
}

std::string GeneratorSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
        case GeneratorKind::IID: out << "IID"; break;
        case GeneratorKind::Linear: out << "LINEAR[" << coefficients.size() << "]"; break;
        case GeneratorKind::MdNeighbor:
            out << "MD_NEIGHBOR[" << (link == LinkFn::Sign ? "sign" : "tanh") << "]";
            break;
    }
    switch (innovation.kind) {
        case InnovationLawKind::Gaussian: out << "/gaussian(" << innovation.param << ")"; break;
        case InnovationLawKind::Uniform: out << "/uniform(" << innovation.param << ")"; break;
        case InnovationLawKind::Rademacher: out << "/rademacher"; break;
    }
    return out.str();
}

FieldSample generate(const GeneratorSpec& spec, const LatticeShape& shape, std::uint64_t seed) {
    shape.validate();
    spec.validate(shape.d);

    const Box sites = lattice_box(shape);
    const Box pad = spec.innovation_box(shape);
    const std::int64_t site_total = sites.volume();

    // Innovations are indexed by their flat offset inside the padded box, so
    // the value at a padded site is a pure function of (seed, spec, shape).
    std::vector<double> xi(static_cast<std::size_t>(pad.volume()));
    pad.for_each([&](const Index&, std::int64_t flat) {
        xi[static_cast<std::size_t>(flat)] = spec.innovation.draw(seed, static_cast<std::uint64_t>(flat));
    });

    FieldSample sample;
    sample.shape = shape;
    sample.spec = spec;
    sample.seed = seed;
    sample.values.assign(static_cast<std::size_t>(site_total), 0.0);
    for (const double v : xi)
        if (!std::isfinite(v)) throw numerical_error("non-finite innovation draw");

    switch (spec.kind) {
        case GeneratorKind::IID:
            sites.for_each([&](const Index& i, std::int64_t flat) {
                sample.values[static_cast<std::size_t>(flat)] =
                    xi[static_cast<std::size_t>(pad.flatten(i))];
            });
            break;
        case GeneratorKind::MdNeighbor:
            sites.for_each([&](const Index& i, std::int64_t flat) {
                Index prev = i;
                prev[0] -= 1;
                const double own = xi[static_cast<std::size_t>(pad.flatten(i))];
                const double neighbor = xi[static_cast<std::size_t>(pad.flatten(prev))];
                sample.values[static_cast<std::size_t>(flat)] =
                    own * link_eval(spec.link, neighbor);
            });
            break;
        case GeneratorKind::Linear:
            sites.for_each([&](const Index& i, std::int64_t flat) {
                double acc = 0.0;
                Index shifted(i.size());
                for (const auto& c : spec.coefficients) {
                    for (std::size_t a = 0; a < i.size(); ++a) shifted[a] = i[a] - c.offset[a];
                    acc += c.value * xi[static_cast<std::size_t>(pad.flatten(shifted))];
                }
                sample.values[static_cast<std::size_t>(flat)] = acc;
            });
            break;
    }
    return sample;
}

double theoretical_covariance(const GeneratorSpec& spec, const Index& lag) {
    const int d = static_cast<int>(lag.size());
    spec.validate(d);
    const bool zero_lag = std::all_of(lag.begin(), lag.end(), [](std::int64_t v) { return v == 0; });
    switch (spec.kind) {
        case GeneratorKind::IID:
            return zero_lag ? spec.innovation.variance() : 0.0;
        case GeneratorKind::MdNeighbor:
            // Distinct sites are uncorrelated: E(eps_0 eps_k) = E(eps_k E(eps_0 | past)) = 0.
            return zero_lag
                       ? spec.innovation.variance() * link_second_moment(spec.link, spec.innovation)
                       : 0.0;
        case GeneratorKind::Linear: {
            double sum = 0.0;
            Index target(lag.size());
            for (const auto& cj : spec.coefficients) {
                for (std::size_t a = 0; a < lag.size(); ++a) target[a] = cj.offset[a] + lag[a];
                for (const auto& ck : spec.coefficients)
                    if (ck.offset == target) sum += cj.value * ck.value;
            }
            return spec.innovation.variance() * sum;
        }
    }
    throw unsupported_model_error("theoretical_covariance: unsupported generator");
}

double field_variance(const GeneratorSpec& spec) {
    // Dimension of the zero lag only matters for Linear offset arithmetic.
    const int d = spec.kind == GeneratorKind::Linear
                      ? static_cast<int>(spec.coefficients.front().offset.size())
                      : 1;
    return theoretical_covariance(spec, Index(d, 0));
}

double covariance_absolute_sum(const GeneratorSpec& spec, int d) {
    const std::int64_t radius = spec.dependence_radius(d);
    Box lags{Index(d, -radius), Index(d, radius)};
    double total = 0.0;
    lags.for_each([&](const Index& lag, std::int64_t) {
        total += std::abs(theoretical_covariance(spec, lag));
    });
    return total;
}

} // namespace latsm
