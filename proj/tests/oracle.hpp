#pragma once
// Brute-force reference rates built only from naive permanents and explicit
// enumeration of every photon grouping. Slow; small n only.

#include <map>
#include <set>
#include <vector>

#include <phodist/fock.hpp>
#include <phodist/permanent.hpp>
#include <phodist/unitary.hpp>

namespace oracle {

using phodist::Matrix;
using phodist::ModeList;
using phodist::Pattern;

inline double fact_prod(const Pattern& s) {
    double f = 1;
    for (int c : s) f *= std::tgamma(c + 1);
    return f;
}

// Output distribution of indistinguishable photons entering `in`.
inline std::map<Pattern, double> group_distribution(const Matrix& U, const ModeList& in) {
    const int m = static_cast<int>(U.rows());
    const int k = static_cast<int>(in.size());
    std::map<Pattern, double> out;
    const double fin = fact_prod(phodist::to_pattern(in, m));
    for (const auto& s : phodist::all_patterns(k, m)) {
        ModeList rows = phodist::to_mode_list(s);
        Matrix A(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) A(i, j) = U(rows[i], in[j]);
        double p = std::norm(phodist::permanent_naive(A)) / (fact_prod(s) * fin);
        if (p > 0) out[s] = p;
    }
    return out;
}

inline std::set<Pattern> ideal_set(const Matrix& U) {
    const int n = static_cast<int>(U.rows());
    ModeList all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    std::set<Pattern> out;
    for (const auto& [s, p] : group_distribution(U, all))
        if (s[0] == 1 && p >= 1e-12) out.insert(s);
    return out;
}

struct Rates {
    double P01 = 0, P10 = 0, c = 0;
};

// groups[0] is the ideal group; all others are error groups.
inline Rates joint(const Matrix& U, const std::vector<ModeList>& groups, const std::set<Pattern>& ideal) {
    const int n = static_cast<int>(U.rows());
    // distribution over (total pattern, photons of ideal group in mode 0)
    std::map<std::pair<Pattern, int>, double> cur{{{Pattern(n, 0), 0}, 1.0}};
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto dist = group_distribution(U, groups[g]);
        std::map<std::pair<Pattern, int>, double> next;
        for (const auto& [key, p] : cur)
            for (const auto& [s, q] : dist) {
                Pattern t = key.first;
                for (int i = 0; i < n; ++i) t[i] += s[i];
                next[{t, key.second + (g == 0 ? s[0] : 0)}] += p * q;
            }
        cur = std::move(next);
    }
    Rates r;
    for (const auto& [key, p] : cur) {
        const auto& [t, ideal0] = key;
        if (t[0] == 1 && ideal.count(t)) (ideal0 == 1 ? r.P10 : r.P01) += p;
        if (t[0] == 0) {
            double w = 0;
            for (int j = 1; j < n; ++j) {
                if (t[j] == 0) continue;
                Pattern u = t;
                --u[j];
                ++u[0];
                if (ideal.count(u)) w += static_cast<double>(t[j]) / n;
            }
            r.c += p * w;
        }
    }
    return r;
}

enum class Model { OBB, SBB, URS };

struct Poly {
    std::vector<double> h, ebar, c;
};

inline Poly rates(const Matrix& U, Model model, int R = 1) {
    const int n = static_cast<int>(U.rows());
    auto ideal = ideal_set(U);
    Poly out;
    out.h.assign(n + 1, 0);
    out.ebar.assign(n + 1, 0);
    out.c.assign(n + 1, 0);
    std::vector<int> count(n + 1, 0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        ModeList good, bad;
        for (int i = 0; i < n; ++i) (mask >> i & 1 ? bad : good).push_back(i);
        const int k = static_cast<int>(bad.size());
        Rates acc;
        if (model == Model::OBB) {
            std::vector<ModeList> groups{good};
            for (int b : bad) groups.push_back({b});
            acc = joint(U, groups, ideal);
        } else {
            const int labels = model == Model::SBB ? 1 : R;
            // every assignment of a label to each error photon, equally likely
            std::vector<int> lab(k, 0);
            long total = 1;
            for (int i = 0; i < k; ++i) total *= labels;
            for (long a = 0; a < total; ++a) {
                long x = a;
                for (int i = 0; i < k; ++i) lab[i] = static_cast<int>(x % labels), x /= labels;
                std::vector<ModeList> groups{good};
                for (int l = 0; l < labels; ++l) {
                    ModeList grp;
                    for (int i = 0; i < k; ++i)
                        if (lab[i] == l) grp.push_back(bad[i]);
                    if (!grp.empty()) groups.push_back(grp);
                }
                Rates r = joint(U, groups, ideal);
                acc.P01 += r.P01 / total;
                acc.P10 += r.P10 / total;
                acc.c += r.c / total;
            }
        }
        out.h[k] += acc.P01 + acc.P10;
        out.ebar[k] += acc.P01;
        out.c[k] += acc.c;
        ++count[k];
    }
    for (int k = 0; k <= n; ++k) {
        out.h[k] /= count[k];
        out.ebar[k] /= count[k];
        out.c[k] /= count[k];
    }
    return out;
}

}  // namespace oracle
