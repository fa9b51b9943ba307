#pragma once
// Sparse photon-at-a-time evolution under a linear-optical unitary.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "fock.hpp"
#include "permanent.hpp"
#include "unitary.hpp"

namespace phodist {

inline constexpr double kPruneMagnitude = 1e-14;

template <typename V>
using KeyMap = absl::flat_hash_map<Key, V, KeyHash>;

template <typename V>
std::vector<std::pair<Key, V>> sorted_entries(const KeyMap<V>& m, int modes) {
    std::vector<std::pair<Key, V>> out(m.begin(), m.end());
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return lex_less(a.first, b.first, modes); });
    return out;
}

struct AmplitudeMap {
    int photons = 0;
    int modes = 0;
    bool truncated = false;
    KeyMap<cplx> entries;

    cplx at(const Pattern& s) const {
        auto it = entries.find(pack(s));
        return it == entries.end() ? cplx(0) : it->second;
    }
    double total_probability() const {
        // canonical order keeps the sum bit-stable
        double t = 0;
        for (const auto& [k, a] : sorted_entries(entries, modes)) t += std::norm(a);
        return t;
    }
    std::vector<std::pair<Pattern, cplx>> sorted() const {
        std::vector<std::pair<Pattern, cplx>> out;
        for (const auto& [k, a] : sorted_entries(entries, modes)) out.emplace_back(unpack(k, modes), a);
        return out;
    }
};

using ProbMap = KeyMap<double>;

// Hash-table iteration order may vary per table; accumulate only in key order.
template <typename V>
std::vector<std::pair<Key, V>> by_key(const KeyMap<V>& m) {
    std::vector<std::pair<Key, V>> out(m.begin(), m.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

namespace detail {
inline double sqrt_int(int k) {
    static const std::vector<double> table = [] {
        std::vector<double> t(257);
        for (int i = 0; i < 257; ++i) t[i] = std::sqrt(static_cast<double>(i));
        return t;
    }();
    return table[k];
}

inline void check_inputs(int m, const ModeList& inputs) {
    if (m > kMaxPackedModes) throw std::invalid_argument("evolve: more than 16 modes");
    for (int g : inputs)
        if (g < 0 || g >= m) throw std::out_of_range("evolve: input mode out of range");
}

inline double input_norm(const ModeList& inputs, int m) {
    // product state of repeated creation operators carries sqrt(prod mult!)
    double f = 1;
    for (int c : to_pattern(inputs, m))
        for (int j = 2; j <= c; ++j) f *= j;
    return 1.0 / std::sqrt(f);
}
}  // namespace detail

// Output amplitudes of prod_j (sum_i U(i, g_j) a_i^dag)|0>, normalized on the input.
// With truncation, configurations are dropped once mode 0 holds two or more photons.
inline AmplitudeMap evolve_modes(const Matrix& U, const ModeList& inputs, bool truncate_mode0) {
    const int m = static_cast<int>(U.rows());
    detail::check_inputs(m, inputs);
    AmplitudeMap out;
    out.photons = static_cast<int>(inputs.size());
    out.modes = m;
    out.truncated = truncate_mode0;
    out.entries.emplace(Key(0), cplx(detail::input_norm(inputs, m)));
    std::vector<cplx> col(m);
    for (int g : inputs) {
        for (int i = 0; i < m; ++i) col[i] = U(i, g);
        KeyMap<cplx> next;
        next.reserve(out.entries.size() * 2);
        for (const auto& [key, amp] : by_key(out.entries)) {
            for (int i = 0; i < m; ++i) {
                if (col[i] == cplx(0)) continue;
                int occ = key_count(key, i) + 1;
                if (truncate_mode0 && i == 0 && occ >= 2) continue;
                next[key + unit_key(i)] += amp * col[i] * detail::sqrt_int(occ);
            }
        }
        absl::erase_if(next, [](const auto& kv) { return std::abs(kv.second) < kPruneMagnitude; });
        out.entries = std::move(next);
    }
    return out;
}

inline ProbMap probabilities(const AmplitudeMap& a) {
    ProbMap p;
    p.reserve(a.entries.size());
    for (const auto& [k, v] : a.entries) p.emplace(k, std::norm(v));
    return p;
}

// Classical (fully distinguishable) photons: independent single-photon output distributions.
inline ProbMap classical_modes(const Matrix& U, const ModeList& inputs, bool truncate_mode0) {
    const int m = static_cast<int>(U.rows());
    detail::check_inputs(m, inputs);
    ProbMap cur;
    cur.emplace(Key(0), 1.0);
    for (int g : inputs) {
        ProbMap next;
        for (const auto& [key, p] : by_key(cur)) {
            for (int i = 0; i < m; ++i) {
                double w = std::norm(U(i, g));
                if (w == 0) continue;
                if (truncate_mode0 && i == 0 && key_count(key, 0) >= 1) continue;
                next[key + unit_key(i)] += p * w;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// Distribution of the sum of two independent patterns.
inline ProbMap convolve(const ProbMap& a, const ProbMap& b, bool truncate_mode0) {
    ProbMap out;
    const auto sb = by_key(b);
    for (const auto& [ka, pa] : by_key(a))
        for (const auto& [kb, pb] : sb) {
            Key k = ka + kb;
            if (truncate_mode0 && key_count(k, 0) >= 2) continue;
            out[k] += pa * pb;
        }
    return out;
}

// <s| U-hat |1,...,1> = perm(U_s) / sqrt(prod s_i!), U_s repeating row i s_i times.
inline cplx amplitude_all_ones(const Pattern& s, const Matrix& U) {
    const int n = static_cast<int>(U.rows());
    if (static_cast<int>(s.size()) != n || photon_count(s) != n)
        throw std::invalid_argument("amplitude_all_ones: pattern must have n modes and n photons");
    Matrix Us(n, n);
    int r = 0;
    double fact = 1;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < s[i]; ++c) Us.row(r++) = U.row(i);
        for (int j = 2; j <= s[i]; ++j) fact *= j;
    }
    return permanent(Us) / std::sqrt(fact);
}

}  // namespace phodist
