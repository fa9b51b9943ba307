#pragma once
// Orbits of error-position subsets under mode relabelings that preserve the
// ideal set: affine maps of Z_n for Fourier, AGL(r,2) for Hadamard, digit
// translations for tensor Fourier.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "unitary.hpp"

namespace phodist {

struct ErrorConfig {
    std::vector<int> error_positions;
    std::uint64_t multiplicity = 1;
};

inline std::vector<std::vector<int>> subset_generators(const UnitarySpec& spec) {
    const int n = spec.size();
    std::vector<std::vector<int>> gens;
    switch (spec.kind) {
        case SpecKind::Fourier: {
            std::vector<int> shift(n);
            for (int x = 0; x < n; ++x) shift[x] = (x + 1) % n;
            gens.push_back(shift);
            for (int a = 2; a < n; ++a) {
                if (std::gcd(a, n) != 1) continue;
                std::vector<int> mul(n);
                for (int x = 0; x < n; ++x) mul[x] = static_cast<int>((static_cast<long long>(a) * x) % n);
                gens.push_back(mul);
            }
            break;
        }
        case SpecKind::Hadamard: {
            const int r = spec.dims[0];
            for (int b = 0; b < r; ++b) {
                std::vector<int> flip(n);
                for (int x = 0; x < n; ++x) flip[x] = x ^ (1 << b);
                gens.push_back(flip);
            }
            // transvections: add bit i into bit j; together they generate GL(r,2)
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    if (i == j) continue;
                    std::vector<int> t(n);
                    for (int x = 0; x < n; ++x) t[x] = x ^ (((x >> i) & 1) << j);
                    gens.push_back(t);
                }
            break;
        }
        case SpecKind::FourierTuple:
            for (const auto& g : symmetry_generators(spec)) gens.push_back(g.perm);
            break;
        default: break;
    }
    return gens;
}

namespace detail {
inline int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

inline std::uint64_t map_mask(std::uint64_t mask, const std::vector<int>& perm) {
    std::uint64_t out = 0;
    while (mask) {
        int b = std::countr_zero(mask);
        out |= std::uint64_t(1) << perm[b];
        mask &= mask - 1;
    }
    return out;
}
}  // namespace detail

struct MaskOrbit {
    std::uint64_t representative = 0;  // smallest mask in the orbit
    std::uint64_t size = 0;
};

// Orbits of k-subsets (all subsets when k < 0), representatives ascending.
inline std::vector<MaskOrbit> subset_orbits(int n, const std::vector<std::vector<int>>& gens, int k) {
    if (n > 24) throw std::invalid_argument("subset_orbits: n too large");
    const std::uint64_t total = std::uint64_t(1) << n;
    std::vector<int> index(total, -1);
    std::vector<std::uint64_t> masks;
    for (std::uint64_t m = 0; m < total; ++m)
        if (k < 0 || std::popcount(m) == k) {
            index[m] = static_cast<int>(masks.size());
            masks.push_back(m);
        }
    std::vector<int> parent(masks.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < masks.size(); ++i)
        for (const auto& g : gens) {
            int a = detail::find_root(parent, static_cast<int>(i));
            int b = detail::find_root(parent, index[detail::map_mask(masks[i], g)]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<MaskOrbit> out;
    std::vector<int> slot(masks.size(), -1);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        int root = detail::find_root(parent, static_cast<int>(i));
        if (slot[root] < 0) {
            slot[root] = static_cast<int>(out.size());
            out.push_back({masks[root], 0});  // roots are the smallest member
        }
        ++out[slot[root]].size;
    }
    return out;
}

inline std::vector<int> mask_positions(std::uint64_t mask) {
    std::vector<int> pos;
    for (int b = 0; mask; ++b, mask >>= 1)
        if (mask & 1) pos.push_back(b);
    return pos;
}

// Error configurations with k errors; orbit representatives when use_symmetry is on.
inline std::vector<ErrorConfig> error_orbits(const UnitarySpec& spec, int k, bool use_symmetry) {
    const int n = spec.size();
    if (k < 0 || k > n) throw std::invalid_argument("error_orbits: need 0 <= k <= n");
    std::vector<std::vector<int>> gens;
    if (use_symmetry) gens = subset_generators(spec);
    std::vector<ErrorConfig> out;
    for (const auto& o : subset_orbits(n, gens, k)) out.push_back({mask_positions(o.representative), o.size});
    return out;
}

// Number of orbit classes over all subsets of the n modes.
inline std::size_t count_orbit_classes(const UnitarySpec& spec) {
    return subset_orbits(spec.size(), subset_generators(spec), -1).size();
}

}  // namespace phodist
