#include <doctest.h>

#include <set>

#include "lattice_smooth/lattice.hpp"
#include "lattice_smooth/rng.hpp"

using namespace latsm;

TEST_CASE("lattice shape validation") {
    CHECK_NOTHROW((LatticeShape{1, 2}.validate()));
    CHECK_NOTHROW((LatticeShape{3, 64}.validate()));
    CHECK_THROWS_AS((LatticeShape{0, 4}.validate()), validation_error);
    CHECK_THROWS_AS((LatticeShape{2, 1}.validate()), validation_error);
    // 10^5 sites per axis in d = 5 overflows the signed 64-bit site count.
    CHECK_THROWS_AS((LatticeShape{5, 100000}.validate()), capacity_error);
    CHECK((LatticeShape{2, 16}.site_count() == 256));
}

TEST_CASE("box flatten round trip and visiting order") {
    const Box box{{-1, 2}, {1, 4}};
    CHECK(box.volume() == 9);
    std::int64_t expected = 0;
    Index previous;
    box.for_each([&](const Index& i, std::int64_t flat) {
        CHECK(flat == expected);
        CHECK(box.flatten(i) == flat);
        CHECK(box.contains(i));
        if (!previous.empty()) CHECK(previous < i); // row-major == lexicographic ascending
        previous = i;
        ++expected;
    });
    CHECK(expected == 9);
    CHECK_FALSE(box.contains(Index{2, 2}));
}

TEST_CASE("counter rng is a pure function of seed and counter") {
    CHECK(mix_u64(42, 7) == mix_u64(42, 7));
    CHECK(mix_u64(42, 7) != mix_u64(42, 8));
    CHECK(mix_u64(42, 7) != mix_u64(43, 7));
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 4096; ++k) seen.insert(mix_u64(1234, k));
    CHECK(seen.size() == 4096);

    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double u = uniform01(99, k);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal quantile against reference values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.0013498980316300945) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(normal_quantile(1.0 - 0.0013498980316300945) == doctest::Approx(3.0).epsilon(1e-12));

    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    }
    // Monotone and symmetric.
    CHECK(normal_quantile(0.2) < normal_quantile(0.3));
    CHECK(normal_quantile(0.2) == doctest::Approx(-normal_quantile(0.8)).epsilon(1e-13));
}
