#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lattice_smooth/lattice.hpp"

namespace latsm {

// Error-field generators. All three families are finite-range functionals of
// iid innovations, hence strictly stationary AND ergodic; the uniform-rate
// proofs lean on ergodicity even though it is not among their stated
// hypotheses, so we only ship ergodic generators.

enum class InnovationLawKind { Gaussian, Uniform, Rademacher };

/// Centered innovation law; the mean is zero by construction for every member.
struct InnovationLaw {
    InnovationLawKind kind = InnovationLawKind::Gaussian;
    /// sigma for Gaussian (>= 0; 0 gives the degenerate zero field),
    /// half-width a for Uniform(-a, a) (> 0); unused for Rademacher.
    double param = 1.0;

    void validate() const;
    double variance() const;
    bool bounded() const;
    /// sup |xi| for bounded laws; throws for Gaussian with sigma > 0.
    double bound() const;
    /// Deterministic draw from the (seed, counter) stream.
    double draw(std::uint64_t seed, std::uint64_t counter) const;
};

/// Bounded link for the martingale-difference family (|f| <= 1 for both).
enum class LinkFn { Sign, Tanh };

double link_eval(LinkFn link, double x);
double link_bound(LinkFn link);
/// E f(xi)^2 under the given innovation law (closed form or quadrature).
double link_second_moment(LinkFn link, const InnovationLaw& law);

enum class GeneratorKind { IID, Linear, MdNeighbor };

struct LinearCoefficient {
    Index offset; // j with ||j||_inf <= m
    double value; // a_j
};

/// A stationary zero-mean error-field model on Z^d.
///
///   IID          eps_i = xi_i
///   Linear       eps_i = sum_j a_j xi_{i-j}        (finite coefficient table)
///   MdNeighbor   eps_i = xi_i * f(xi_{i-e1})       (martingale difference)
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::IID;
    InnovationLaw innovation;
    std::vector<LinearCoefficient> coefficients; // Linear only
    LinkFn link = LinkFn::Sign;                  // MdNeighbor only

    void validate(int d) const;

    /// l_inf diameter of the innovation footprint: sites farther apart than
    /// this are functions of disjoint innovations. 0 for IID, 1 for
    /// MdNeighbor, max_{j,j' in support} ||j - j'||_inf for Linear.
    /// (For a two-sided table of radius m this is 2m, not m.)
    std::int64_t dependence_radius(int d) const;

    /// Padded innovation box for a given lattice: every site of {1..n}^d sees
    /// its full neighborhood, so the restriction to the lattice is exactly
    /// stationary.
    Box innovation_box(const LatticeShape& shape) const;

    bool field_bounded() const;
    double field_bound() const; // sup |eps_0| for bounded fields
    std::string describe() const;
};

/// A realized error field on {1..n}^d, reproducible from (spec, shape, seed).
struct FieldSample {
    LatticeShape shape;
    std::vector<double> values; // row-major over lattice_box(shape)
    GeneratorSpec spec;
    std::uint64_t seed = 0;

    double at_flat(std::int64_t flat) const { return values[static_cast<std::size_t>(flat)]; }
    double at(const Index& i) const { return values[static_cast<std::size_t>(lattice_box(shape).flatten(i))]; }
};

/// Generates the error field. Pure in (spec, shape, seed): identical inputs
/// reproduce identical values bit-for-bit, regardless of thread count.
FieldSample generate(const GeneratorSpec& spec, const LatticeShape& shape, std::uint64_t seed);

/// Exact covariance E(eps_0 eps_lag) for the shipped families.
double theoretical_covariance(const GeneratorSpec& spec, const Index& lag);

/// Var(eps_0) = theoretical_covariance at lag 0.
double field_variance(const GeneratorSpec& spec);

/// Sum over all lags of |E(eps_0 eps_k)| (finite by construction).
double covariance_absolute_sum(const GeneratorSpec& spec, int d);

} // namespace latsm
