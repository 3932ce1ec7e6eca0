#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lattice_smooth/errors.hpp"

namespace latsm {

using Index = std::vector<std::int64_t>;

/// The design lattice: sites {1,...,n}^d, covariates i/n in (0,1]^d.
struct LatticeShape {
    int d = 1;
    std::int64_t n = 2;

    void validate() const;
    /// n^d, guaranteed not to overflow a signed 64-bit count.
    std::int64_t site_count() const;
};

/// An axis-aligned integer box [lo_1,hi_1] x ... x [lo_d,hi_d].
struct Box {
    Index lo;
    Index hi; // inclusive

    int dim() const { return static_cast<int>(lo.size()); }
    std::int64_t volume() const;
    bool contains(const Index& i) const;
    /// Row-major flat offset of a contained index (axis 1 most significant).
    std::int64_t flatten(const Index& i) const;
    /// Visits all indices in row-major (lexicographic ascending) order.
    void for_each(const std::function<void(const Index&, std::int64_t)>& body) const;
};

inline Box lattice_box(const LatticeShape& shape) {
    return Box{Index(shape.d, 1), Index(shape.d, shape.n)};
}

} // namespace latsm
