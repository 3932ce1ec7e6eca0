#include "lattice_smooth/lattice.hpp"

#include <limits>
#include <string>

namespace latsm {

namespace {

// Multiplies site-count factors with an explicit overflow guard.
std::int64_t checked_volume(const Index& lo, const Index& hi) {
    std::int64_t total = 1;
    const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (hi[a] < lo[a]) return 0;
        const std::int64_t len = hi[a] - lo[a] + 1;
        if (total > cap / len)
            throw capacity_error("lattice box volume overflows 64-bit site count");
        total *= len;
    }
    return total;
}

} // namespace

void LatticeShape::validate() const {
    if (d < 1) throw validation_error("lattice dimension must satisfy d >= 1");
    if (n < 2) throw validation_error("per-axis size must satisfy n >= 2");
    site_count(); // throws capacity_error on overflow
}

std::int64_t LatticeShape::site_count() const {
    Index lo(d, 1), hi(d, n);
    return checked_volume(lo, hi);
}

std::int64_t Box::volume() const { return checked_volume(lo, hi); }

bool Box::contains(const Index& i) const {
    for (int a = 0; a < dim(); ++a)
        if (i[a] < lo[a] || i[a] > hi[a]) return false;
    return true;
}

std::int64_t Box::flatten(const Index& i) const {
    std::int64_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * (hi[a] - lo[a] + 1) + (i[a] - lo[a]);
    return flat;
}

void Box::for_each(const std::function<void(const Index&, std::int64_t)>& body) const {
    const std::int64_t total = volume();
    if (total == 0) return;
    Index cur = lo;
    for (std::int64_t flat = 0; flat < total; ++flat) {
        body(cur, flat);
        for (int a = dim() - 1; a >= 0; --a) {
            if (++cur[a] <= hi[a]) break;
            cur[a] = lo[a];
        }
    }
}

} // namespace latsm
