#include "lattice_smooth/dependence.hpp"

#include <algorithm>
#include <cmath>

namespace latsm {

std::strong_ordering lex_compare(const Index& i, const Index& j) {
    if (i.size() != j.size()) throw domain_error("lex_compare: dimension mismatch");
    for (std::size_t a = 0; a < i.size(); ++a) {
        if (i[a] < j[a]) return std::strong_ordering::less;
        if (i[a] > j[a]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

bool v_set_contains(const Index& i, std::int64_t k, const Index& j) {
    if (k < 1) throw domain_error("v_set_contains needs k >= 1");
    if (lex_compare(j, i) != std::strong_ordering::less) return false;
    std::int64_t dist = 0;
    for (std::size_t a = 0; a < i.size(); ++a) dist = std::max(dist, std::abs(i[a] - j[a]));
    return dist >= k;
}

double MixingProfile::alpha_1_inf(std::int64_t r) const {
    if (r < 1) throw domain_error("mixing coefficients are defined for r >= 1");
    return r > radius ? 0.0 : 0.25;
}

double MixingProfile::phi_inf_1(std::int64_t r) const {
    if (r < 1) throw domain_error("mixing coefficients are defined for r >= 1");
    return r > radius ? 0.0 : 1.0;
}

MixingProfile mixing_profile(const GeneratorSpec& spec, int d) {
    spec.validate(d);
    MixingProfile profile;
    profile.model = spec.describe();
    profile.radius = spec.dependence_radius(d);
    return profile;
}

MarginalEnvelope field_marginal_envelope(const GeneratorSpec& spec, int d) {
    spec.validate(d);
    const InnovationLaw& law = spec.innovation;
    switch (spec.kind) {
        case GeneratorKind::IID:
            switch (law.kind) {
                case InnovationLawKind::Gaussian: return {MarginalSpec::gaussian(law.param), true};
                case InnovationLawKind::Uniform: return {MarginalSpec::uniform(law.param), true};
                case InnovationLawKind::Rademacher: return {MarginalSpec::point_mass(1.0), true};
            }
            break;
        case GeneratorKind::Linear: {
            if (law.kind == InnovationLawKind::Gaussian) {
                double ss = 0.0;
                for (const auto& c : spec.coefficients) ss += c.value * c.value;
                if (ss == 0.0) return {MarginalSpec::point_mass(0.0), true};
                return {MarginalSpec::gaussian(law.param * std::sqrt(ss)), true};
            }
            if (spec.coefficients.size() == 1) {
                const double scale = std::abs(spec.coefficients.front().value);
                if (scale == 0.0) return {MarginalSpec::point_mass(0.0), true};
                if (law.kind == InnovationLawKind::Uniform)
                    return {MarginalSpec::uniform(scale * law.param), true};
                return {MarginalSpec::point_mass(scale), true};
            }
            return {MarginalSpec::point_mass(spec.field_bound()), false};
        }
        case GeneratorKind::MdNeighbor: {
            if (law.kind == InnovationLawKind::Gaussian)
                // |eps| <= |xi| since |f| <= 1.
                return {MarginalSpec::gaussian(law.param), false};
            if (law.kind == InnovationLawKind::Rademacher && spec.link == LinkFn::Sign)
                return {MarginalSpec::point_mass(1.0), true};
            return {MarginalSpec::point_mass(spec.field_bound()), false};
        }
    }
    throw unsupported_model_error("no marginal envelope for this generator");
}

double serfling_bound(double sup_norm, double phi) {
    if (!(sup_norm >= 0.0)) throw domain_error("serfling_bound needs ||eps||_inf >= 0");
    if (!(phi >= 0.0) || !(phi <= 1.0)) throw domain_error("serfling_bound needs phi in [0,1]");
    return 2.0 * sup_norm * sup_norm * phi;
}

double rio_bound(const MarginalSpec& Z, double alpha, double p) {
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw domain_error("rio_bound needs alpha in [0,1]");
    if (!(p > 2.0)) throw domain_error("rio_bound needs p > 2");
    const double dk = d_k_coefficient(Z, alpha, p);
    return 4.0 * dk * dk;
}

ConditionId condition_from_string(const std::string& name) {
    if (name == "C1") return ConditionId::C1;
    if (name == "C2") return ConditionId::C2;
    if (name == "C3") return ConditionId::C3;
    if (name == "C4") return ConditionId::C4;
    if (name == "C'1" || name == "Cp1") return ConditionId::Cp1;
    if (name == "C'2" || name == "Cp2") return ConditionId::Cp2;
    if (name == "C'3" || name == "Cp3") return ConditionId::Cp3;
    throw validation_error("unknown condition id: " + name);
}

std::string condition_name(ConditionId id) {
    switch (id) {
        case ConditionId::C1: return "C1";
        case ConditionId::C2: return "C2";
        case ConditionId::C3: return "C3";
        case ConditionId::C4: return "C4";
        case ConditionId::Cp1: return "C'1";
        case ConditionId::Cp2: return "C'2";
        case ConditionId::Cp3: return "C'3";
    }
    return "?";
}

std::string verdict_name(ConditionVerdict v) {
    switch (v) {
        case ConditionVerdict::HoldsExact: return "HOLDS_EXACT";
        case ConditionVerdict::HoldsBound: return "HOLDS_BOUND";
        case ConditionVerdict::Undetermined: return "UNDETERMINED";
    }
    return "?";
}

namespace {

bool moment_clause_ok(ConditionId id, const GeneratorSpec& spec, int d, double beta,
                      std::string& reason) {
    const bool needs_sup = id == ConditionId::C1 || id == ConditionId::Cp1;
    if (needs_sup && !spec.field_bounded()) {
        reason = "eps_0 is not in L_inf (unbounded innovations)";
        return false;
    }
    const bool needs_psi = id == ConditionId::C2 || id == ConditionId::Cp2;
    if (needs_psi) {
        const MarginalEnvelope env = field_marginal_envelope(spec, d);
        if (env.marginal.kind == MarginalKind::Gaussian && beta > 2.0) {
            reason = "eps_0 is not in L_psi_beta(q): gaussian tails need beta(q) <= 2";
            return false;
        }
    }
    return true;
}

// Enumerates lags within the dependence radius; prime == true restricts to
// the lexicographic past V_0^1 (C1-C3 sums), otherwise all of Z^d (C4, C').
std::vector<Index> term_lags(int d, std::int64_t radius, bool past_only) {
    std::vector<Index> lags;
    const Index origin(static_cast<std::size_t>(d), 0);
    Box box{Index(static_cast<std::size_t>(d), -radius), Index(static_cast<std::size_t>(d), radius)};
    box.for_each([&](const Index& k, std::int64_t) {
        if (past_only) {
            if (lex_compare(k, origin) == std::strong_ordering::less) lags.push_back(k);
        } else {
            lags.push_back(k);
        }
    });
    return lags;
}

} // namespace

ConditionReport check_condition(ConditionId id, const GeneratorSpec& spec, int d,
                                const ConditionParams& params) {
    spec.validate(d);
    ConditionReport report;
    report.id = id;
    report.truncation_radius = spec.dependence_radius(d);

    double beta = 0.0;
    if (id == ConditionId::C2 || id == ConditionId::Cp2) {
        report.q = params.q;
        beta = beta_of_q(params.q); // throws outside (0,2)
    }
    if (id == ConditionId::C3 || id == ConditionId::Cp3) {
        if (!(params.p > 2.0)) throw domain_error(condition_name(id) + " needs p > 2");
        report.p = params.p;
    }

    std::string reason;
    if (!moment_clause_ok(id, spec, d, beta, reason)) {
        report.verdict = ConditionVerdict::Undetermined;
        report.reason = reason;
        return report;
    }

    const std::int64_t radius = report.truncation_radius;
    const MixingProfile profile = mixing_profile(spec, d);
    const MarginalEnvelope env = field_marginal_envelope(spec, d);
    const bool projective_zero =
        spec.kind == GeneratorKind::IID || spec.kind == GeneratorKind::MdNeighbor;

    auto lag_distance = [](const Index& k) {
        std::int64_t m = 0;
        for (const std::int64_t v : k) m = std::max(m, std::abs(v));
        return m;
    };

    bool all_exact = true;
    double sum = 0.0;

    switch (id) {
        case ConditionId::C1:
        case ConditionId::C2:
        case ConditionId::C3: {
            for (const Index& k : term_lags(d, radius, true)) {
                ConditionTerm term;
                term.lag = k;
                if (projective_zero) {
                    // E_{|k|}(eps_0) = 0: independence for IID, the tower
                    // property through F_{V_0^{|k|}} subset F_{V_0^1} for the
                    // martingale-difference family.
                    term.value = 0.0;
                    term.exact = true;
                    term.method = spec.kind == GeneratorKind::IID ? "independence-zero" : "tower-zero";
                } else if (id == ConditionId::C1) {
                    const double m_inf = spec.field_bound();
                    term.value = std::min(m_inf * m_inf,
                                          serfling_bound(m_inf, profile.phi_inf_1(
                                                                    std::max<std::int64_t>(lag_distance(k), 1))));
                    term.exact = false;
                    term.method = "holder-sup";
                } else if (id == ConditionId::C2) {
                    // ||sqrt|XY|||^2 <= max(||X||,||Y||)^2 and conditional
                    // Jensen contract E_{|k|} in the Orlicz norm.
                    const LuxemburgResult lux = luxemburg_norm(env.marginal, beta, params.tol);
                    if (!lux.ok()) {
                        report.verdict = ConditionVerdict::Undetermined;
                        report.reason = "Luxemburg norm of the marginal envelope diverges";
                        return report;
                    }
                    term.value = lux.value * lux.value;
                    term.exact = false;
                    term.method = "orlicz-jensen";
                } else {
                    const double holder = lp_norm(env.marginal, params.p) * lp_norm(env.marginal, params.p);
                    const double rio = rio_bound(env.marginal, 0.25, params.p);
                    term.value = std::min(holder, rio);
                    term.exact = false;
                    term.method = holder <= rio ? "holder" : "rio-trivial-alpha";
                }
                sum += term.value;
                all_exact = all_exact && term.exact;
                report.terms.push_back(std::move(term));
            }
            break;
        }
        case ConditionId::C4: {
            for (const Index& k : term_lags(d, radius, false)) {
                ConditionTerm term;
                term.lag = k;
                term.value = std::abs(theoretical_covariance(spec, k));
                term.exact = true;
                term.method = "covariance";
                sum += term.value;
                report.terms.push_back(std::move(term));
            }
            break;
        }
        case ConditionId::Cp1: {
            for (const Index& k : term_lags(d, radius, false)) {
                ConditionTerm term;
                term.lag = k;
                const std::int64_t r = lag_distance(k);
                term.value = r >= 1 ? profile.phi_inf_1(r) : 1.0;
                term.exact = false; // trivial bound within the radius
                term.method = "phi-trivial-bound";
                sum += term.value;
                all_exact = false;
                report.terms.push_back(std::move(term));
            }
            break;
        }
        case ConditionId::Cp2: {
            for (const Index& k : term_lags(d, radius, false)) {
                ConditionTerm term;
                term.lag = k;
                const std::int64_t r = lag_distance(k);
                const double alpha = r >= 1 ? profile.alpha_1_inf(r) : 0.25;
                const LuxemburgResult ck = c_k_coefficient(env.marginal, alpha, beta, params.tol);
                if (!ck.ok()) {
                    report.verdict = ConditionVerdict::Undetermined;
                    report.reason = "c_k coefficient diverges for the marginal envelope";
                    return report;
                }
                term.value = ck.value * ck.value;
                term.exact = false;
                term.method = "ck-trivial-alpha";
                sum += term.value;
                all_exact = false;
                report.terms.push_back(std::move(term));
            }
            break;
        }
        case ConditionId::Cp3: {
            for (const Index& k : term_lags(d, radius, false)) {
                ConditionTerm term;
                term.lag = k;
                const std::int64_t r = lag_distance(k);
                const double alpha = r >= 1 ? profile.alpha_1_inf(r) : 0.25;
                const double dk = d_k_coefficient(env.marginal, alpha, params.p);
                term.value = dk * dk;
                term.exact = false;
                term.method = "dk-trivial-alpha";
                sum += term.value;
                all_exact = false;
                report.terms.push_back(std::move(term));
            }
            break;
        }
    }

    report.sum = sum;
    report.verdict = all_exact ? ConditionVerdict::HoldsExact : ConditionVerdict::HoldsBound;
    return report;
}

} // namespace latsm
