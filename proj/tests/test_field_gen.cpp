#include <doctest.h>

#include <cmath>

#include "lattice_smooth/field_gen.hpp"
#include "oracles.hpp"

using namespace latsm;

namespace {

GeneratorSpec linear_1d(std::vector<std::pair<std::int64_t, double>> table,
                        InnovationLaw law = {InnovationLawKind::Gaussian, 1.0}) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::Linear;
    spec.innovation = law;
    for (const auto& [offset, value] : table)
        spec.coefficients.push_back({Index{offset}, value});
    return spec;
}

GeneratorSpec md_rademacher_sign() {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::MdNeighbor;
    spec.innovation = {InnovationLawKind::Rademacher, 0.0};
    spec.link = LinkFn::Sign;
    return spec;
}

} // namespace

TEST_CASE("identity coefficient table is an innovation pass-through") {
    const GeneratorSpec spec = linear_1d({{0, 1.0}});
    const LatticeShape shape{1, 64};
    const FieldSample field = generate(spec, shape, 2024);
    const Box pad = spec.innovation_box(shape);
    CHECK(pad.lo == Index{1});
    CHECK(pad.hi == Index{64});
    lattice_box(shape).for_each([&](const Index& i, std::int64_t flat) {
        const double xi =
            spec.innovation.draw(2024, static_cast<std::uint64_t>(pad.flatten(i)));
        CHECK(field.values[static_cast<std::size_t>(flat)] == xi);
    });
}

TEST_CASE("linear field equals the direct convolution oracle site by site") {
    for (const auto law :
         {InnovationLaw{InnovationLawKind::Gaussian, 1.0}, InnovationLaw{InnovationLawKind::Uniform, 2.0}}) {
        const GeneratorSpec spec = linear_1d({{0, 1.0}, {1, 0.5}}, law);
        const LatticeShape shape{1, 257};
        const FieldSample field = generate(spec, shape, 99);
        const std::vector<double> oracle = oracles::direct_convolution(spec, shape, 99);
        REQUIRE(field.values.size() == oracle.size());
        for (std::size_t k = 0; k < oracle.size(); ++k)
            CHECK(field.values[k] == doctest::Approx(oracle[k]).epsilon(1e-15));
    }
    // Two-sided table in d = 2.
    GeneratorSpec spec2;
    spec2.kind = GeneratorKind::Linear;
    spec2.innovation = {InnovationLawKind::Gaussian, 0.7};
    spec2.coefficients = {{Index{0, 0}, 1.0}, {Index{-1, 1}, -0.25}, {Index{1, 0}, 0.5}};
    const LatticeShape shape2{2, 17};
    const FieldSample field2 = generate(spec2, shape2, 7);
    const std::vector<double> oracle2 = oracles::direct_convolution(spec2, shape2, 7);
    for (std::size_t k = 0; k < oracle2.size(); ++k)
        CHECK(field2.values[k] == doctest::Approx(oracle2[k]).epsilon(1e-15));
}

TEST_CASE("martingale-difference field has mean near zero and unit variance") {
    const GeneratorSpec spec = md_rademacher_sign();
    const LatticeShape shape{1, 100000};
    const FieldSample field = generate(spec, shape, 31337);
    const double mean = oracles::mean(field.values);
    // Marginal variance exactly 1, so 4 standard errors of the site mean:
    const double se = 1.0 / std::sqrt(static_cast<double>(field.values.size()));
    CHECK(std::abs(mean) <= 4.0 * se);
    for (const double v : field.values) CHECK(std::abs(v) == 1.0);
}

TEST_CASE("regeneration is bit-for-bit reproducible") {
    const GeneratorSpec spec = linear_1d({{0, 1.0}, {1, 0.5}});
    const LatticeShape shape{1, 512};
    const FieldSample a = generate(spec, shape, 555);
    const FieldSample b = generate(spec, shape, 555);
    CHECK(a.values == b.values);
    const FieldSample c = generate(spec, shape, 556);
    CHECK(a.values != c.values);
}

TEST_CASE("theoretical covariance closed forms") {
    GeneratorSpec iid;
    iid.kind = GeneratorKind::IID;
    iid.innovation = {InnovationLawKind::Gaussian, 1.0};
    CHECK(theoretical_covariance(iid, Index{0}) == doctest::Approx(1.0));
    CHECK(theoretical_covariance(iid, Index{3}) == 0.0);

    const GeneratorSpec ma = linear_1d({{0, 1.0}, {1, 0.5}});
    CHECK(theoretical_covariance(ma, Index{0}) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(theoretical_covariance(ma, Index{1}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(theoretical_covariance(ma, Index{-1}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(theoretical_covariance(ma, Index{2}) == 0.0);
    // Against the independent closed-form oracle on a second table.
    const GeneratorSpec ma2 = linear_1d({{-1, 0.3}, {0, 1.0}, {1, -0.6}},
                                        {InnovationLawKind::Uniform, 1.5});
    for (std::int64_t lag = -3; lag <= 3; ++lag)
        CHECK(theoretical_covariance(ma2, Index{lag}) ==
              doctest::Approx(oracles::ma_covariance(ma2, Index{lag})).epsilon(1e-14));

    const GeneratorSpec md = md_rademacher_sign();
    CHECK(theoretical_covariance(md, Index{1}) == 0.0);
    CHECK(theoretical_covariance(md, Index{0}) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(covariance_absolute_sum(ma, 1) == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("empirical covariance tracks the theory within 5 standard errors") {
    const GeneratorSpec spec = linear_1d({{0, 1.0}, {1, 0.5}});
    const LatticeShape shape{1, 200000};
    const FieldSample field = generate(spec, shape, 17);
    const std::int64_t n = shape.n;
    for (std::int64_t lag = 0; lag <= 2; ++lag) {
        std::vector<double> products;
        products.reserve(static_cast<std::size_t>(n - lag));
        for (std::int64_t i = 0; i < n - lag; ++i)
            products.push_back(field.values[static_cast<std::size_t>(i)] *
                               field.values[static_cast<std::size_t>(i + lag)]);
        const double emp = oracles::mean(products);
        // Products lag-correlate within the dependence diameter; inflate the
        // iid standard error by the block size.
        const double se = oracles::sample_sd(products) *
                          std::sqrt(3.0 / static_cast<double>(products.size()));
        const double theory = theoretical_covariance(spec, Index{lag});
        CHECK(std::abs(emp - theory) <= 5.0 * se);
    }
}

TEST_CASE("linear fields have independent blocks beyond the dependence diameter") {
    // Symmetric two-sided table: coefficient radius 1, dependence diameter 2.
    const GeneratorSpec spec = linear_1d({{-1, 0.5}, {0, 1.0}, {1, 0.5}});
    CHECK(spec.dependence_radius(1) == 2);
    const LatticeShape shape{1, 120000};
    const FieldSample field = generate(spec, shape, 4242);

    // Lag-2 sites share an innovation: correlated by construction.
    CHECK(theoretical_covariance(spec, Index{2}) != 0.0);

    // Block functionals at gap 3 (> diameter) across disjoint windows.
    const std::int64_t gap = 3, width = 2, stride = 2 * width + gap + 4;
    std::vector<double> us, vs, products;
    for (std::int64_t s = 0; s + width + gap + width < shape.n; s += stride) {
        double u = 0.0, v = 0.0;
        for (std::int64_t k = 0; k < width; ++k) {
            u += field.values[static_cast<std::size_t>(s + k)];
            v += field.values[static_cast<std::size_t>(s + width + gap + k)];
        }
        us.push_back(u);
        vs.push_back(v);
        products.push_back(u * v);
    }
    const double mu = oracles::mean(us), mv = oracles::mean(vs);
    const double cov = oracles::mean(products) - mu * mv;
    std::vector<double> centered;
    for (std::size_t k = 0; k < us.size(); ++k) centered.push_back((us[k] - mu) * (vs[k] - mv));
    const double se = oracles::sample_sd(centered) / std::sqrt(static_cast<double>(us.size()));
    CHECK(std::abs(cov) <= 4.0 * se);
}

TEST_CASE("martingale property: mean of eps_i times past functionals is 0") {
    const GeneratorSpec spec = md_rademacher_sign();
    const LatticeShape shape{1, 100000};
    const FieldSample field = generate(spec, shape, 90210);
    const auto clip = [](double v) { return std::max(-1.0, std::min(1.0, v)); };
    const std::vector<std::function<double(double, double)>> battery = {
        [](double w1, double) { return w1 > 0 ? 1.0 : (w1 < 0 ? -1.0 : 0.0); },
        [](double w1, double) { return std::tanh(w1); },
        [clip](double w1, double w2) { return clip(w1 * w2); },
        [](double, double w2) { return std::cos(w2); },
    };
    for (const auto& phi : battery) {
        std::vector<double> terms;
        for (std::int64_t i = 2; i < shape.n; ++i)
            terms.push_back(field.values[static_cast<std::size_t>(i)] *
                            phi(field.values[static_cast<std::size_t>(i - 1)],
                                field.values[static_cast<std::size_t>(i - 2)]));
        const double m = oracles::mean(terms);
        const double se = oracles::sample_sd(terms) *
                          std::sqrt(3.0 / static_cast<double>(terms.size()));
        CHECK(std::abs(m) <= 4.0 * se);
    }
}

TEST_CASE("generator validation errors") {
    GeneratorSpec empty;
    empty.kind = GeneratorKind::Linear;
    empty.innovation = {InnovationLawKind::Gaussian, 1.0};
    CHECK_THROWS_AS(empty.validate(1), validation_error);

    GeneratorSpec bad_law;
    bad_law.kind = GeneratorKind::IID;
    bad_law.innovation = {InnovationLawKind::Uniform, -1.0};
    CHECK_THROWS_AS(bad_law.validate(1), validation_error);

    GeneratorSpec dup = linear_1d({{0, 1.0}, {0, 2.0}});
    CHECK_THROWS_AS(dup.validate(1), validation_error);

    GeneratorSpec mismatched;
    mismatched.kind = GeneratorKind::Linear;
    mismatched.innovation = {InnovationLawKind::Gaussian, 1.0};
    mismatched.coefficients = {{Index{0, 0}, 1.0}};
    CHECK_THROWS_AS(mismatched.validate(1), validation_error);
}

TEST_CASE("degenerate sigma-zero generator yields the zero field") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::IID;
    spec.innovation = {InnovationLawKind::Gaussian, 0.0};
    const FieldSample field = generate(spec, LatticeShape{1, 32}, 1);
    for (const double v : field.values) CHECK(v == 0.0);
    CHECK(field_variance(spec) == 0.0);
}

TEST_CASE("dependence radius is the coefficient-support diameter") {
    CHECK(linear_1d({{0, 1.0}, {1, 0.5}}).dependence_radius(1) == 1);
    CHECK(linear_1d({{-1, 1.0}, {1, 0.5}}).dependence_radius(1) == 2);
    CHECK(linear_1d({{0, 1.0}}).dependence_radius(1) == 0);
    CHECK(md_rademacher_sign().dependence_radius(1) == 1);
    GeneratorSpec iid;
    iid.kind = GeneratorKind::IID;
    CHECK(iid.dependence_radius(3) == 0);
}

TEST_CASE("md variance uses the link second moment") {
    GeneratorSpec tanh_md;
    tanh_md.kind = GeneratorKind::MdNeighbor;
    tanh_md.innovation = {InnovationLawKind::Rademacher, 0.0};
    tanh_md.link = LinkFn::Tanh;
    const double t = std::tanh(1.0);
    CHECK(field_variance(tanh_md) == doctest::Approx(t * t).epsilon(1e-12));

    // Monte Carlo cross-check of the quadrature for gaussian innovations.
    GeneratorSpec gm;
    gm.kind = GeneratorKind::MdNeighbor;
    gm.innovation = {InnovationLawKind::Gaussian, 1.0};
    gm.link = LinkFn::Tanh;
    const FieldSample field = generate(gm, LatticeShape{1, 200000}, 8);
    std::vector<double> squares;
    for (const double v : field.values) squares.push_back(v * v);
    const double se = oracles::sample_sd(squares) *
                      std::sqrt(3.0 / static_cast<double>(squares.size()));
    CHECK(std::abs(oracles::mean(squares) - field_variance(gm)) <= 5.0 * se);
}
