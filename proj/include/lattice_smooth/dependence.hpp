#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "lattice_smooth/field_gen.hpp"
#include "lattice_smooth/orlicz.hpp"

namespace latsm {

/// Lexicographic order on Z^d with coordinate 1 most significant: i < j iff
/// i_1 < j_1, or i_p < j_p with i_q = j_q for all q < p.
std::strong_ordering lex_compare(const Index& i, const Index& j);

/// Membership in V_i^k: j lex-precedes i and ||i - j||_inf >= k (the distance
/// clause is automatic for k = 1 since distinct sites are >= 1 apart).
bool v_set_contains(const Index& i, std::int64_t k, const Index& j);

/// Mixing coefficients of a shipped field model. Beyond the dependence radius
/// sites are functions of disjoint iid innovations, so both coefficients are
/// exactly zero; within the radius only the trivial bounds alpha <= 1/4,
/// phi <= 1 are certified.
struct MixingProfile {
    std::string model;
    std::int64_t radius = 0;

    double alpha_1_inf(std::int64_t r) const;
    double phi_inf_1(std::int64_t r) const;
    /// True when the coefficient at distance r is an exact value (zero beyond
    /// the radius) rather than a bound.
    bool exact_at(std::int64_t r) const { return r > radius; }
};

MixingProfile mixing_profile(const GeneratorSpec& spec, int d);

/// Marginal law of |eps_0| (exact where available, else a stochastic upper
/// envelope |eps_0| <= Z usable in monotone bounds).
struct MarginalEnvelope {
    MarginalSpec marginal;
    bool exact = false;
};

MarginalEnvelope field_marginal_envelope(const GeneratorSpec& spec, int d);

/// Serfling: ||eps_k E_{|k|}(eps_0)||_inf <= 2 ||eps_0||_inf^2 phi_{inf,1}(|k|).
double serfling_bound(double sup_norm, double phi);

/// Rio: ||eps_k E_{|k|}(eps_0)||_{p/2} <= 4 (int_0^alpha Q^p)^{2/p} = 4 d_k(p)^2.
double rio_bound(const MarginalSpec& Z, double alpha, double p);

enum class ConditionId { C1, C2, C3, C4, Cp1, Cp2, Cp3 };

ConditionId condition_from_string(const std::string& name);
std::string condition_name(ConditionId id);

enum class ConditionVerdict { HoldsExact, HoldsBound, Undetermined };

std::string verdict_name(ConditionVerdict v);

struct ConditionTerm {
    Index lag;
    double value = 0.0;  // exact term or certified upper bound
    bool exact = false;
    std::string method;
};

struct ConditionReport {
    ConditionId id = ConditionId::C1;
    ConditionVerdict verdict = ConditionVerdict::Undetermined;
    double sum = 0.0;
    std::int64_t truncation_radius = 0; // terms beyond it vanish by model structure
    double q = 0.0, p = 0.0;            // parameters used (when applicable)
    std::vector<ConditionTerm> terms;
    std::string reason;
};

struct ConditionParams {
    double q = 1.0;   // C2 / C'2 (0 < q < 2)
    double p = 4.0;   // C3 / C'3 (p > 2)
    double tol = 1e-10;
};

/// Certifies a dependence condition for a shipped model with explicit finite
/// sums. HOLDS_EXACT only when every term is exactly zero or an exact value by
/// model structure; bounds give HOLDS_BOUND; a failed moment clause gives
/// UNDETERMINED with the reason.
ConditionReport check_condition(ConditionId id, const GeneratorSpec& spec, int d,
                                const ConditionParams& params);

} // namespace latsm
