#pragma once
// Suppression laws, ideal patterns, circulant coefficients and the
// non-prime-power counterexample construction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "evolve.hpp"
#include "fock.hpp"
#include "permanent.hpp"
#include "unitary.hpp"

namespace phodist {

// An amplitude counts as zero below this probability.
inline constexpr double kSuppressionThreshold = 1e-12;

struct RoundingUnsafe : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotApplicable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline bool ztl_check(const Pattern& s, int n) {
    long long t = 0;
    for (int i = 0; i < static_cast<int>(s.size()); ++i) t += static_cast<long long>(i) * s[i];
    return t % n == 0;
}

inline bool xor_check(const Pattern& s, int /*r*/) {
    int x = 0;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (s[i] % 2 == 1) x ^= i;
    return x == 0;
}

// Componentwise ZTL on mixed-radix mode labels.
inline bool generalized_ztl_check(const Pattern& s, const std::vector<int>& tuple) {
    std::vector<long long> sums(tuple.size(), 0);
    for (int g = 0; g < static_cast<int>(s.size()); ++g) {
        if (s[g] == 0) continue;
        auto d = mixed_digits(g, tuple);
        for (std::size_t i = 0; i < tuple.size(); ++i) sums[i] += static_cast<long long>(d[i]) * s[g];
    }
    for (std::size_t i = 0; i < tuple.size(); ++i)
        if (sums[i] % tuple[i] != 0) return false;
    return true;
}

// The mode that makes an (n-1)-photon mode list satisfy the generalized ZTL.
inline int complete_pattern(const ModeList& partial, const std::vector<int>& tuple) {
    std::vector<int> need(tuple.size(), 0);
    for (int g : partial) {
        auto d = mixed_digits(g, tuple);
        for (std::size_t i = 0; i < tuple.size(); ++i) need[i] = (need[i] + d[i]) % tuple[i];
    }
    for (std::size_t i = 0; i < tuple.size(); ++i) need[i] = (tuple[i] - need[i]) % tuple[i];
    return from_mixed_digits(need, tuple);
}

// Symmetry predicate of a spec; true for specs without a known symmetry.
inline bool symmetry_allowed(const UnitarySpec& spec, const Pattern& s) {
    switch (spec.kind) {
        case SpecKind::Fourier: return ztl_check(s, spec.dims[0]);
        case SpecKind::Hadamard: return xor_check(s, spec.dims[0]);
        case SpecKind::FourierTuple: return generalized_ztl_check(s, spec.dims);
        default: return true;
    }
}

// Group label of a pattern: componentwise digit sums, packed as a mode label.
// Ideal patterns of a symmetric spec all carry label 0.
class ChargeTable {
public:
    // trivial table: one label for everything
    ChargeTable() = default;
    explicit ChargeTable(const UnitarySpec& spec) : n_(spec.size()), factors_(spec.group_factors()) {
        if (factors_.empty()) factors_ = {1};
        order_ = 1;
        for (int f : factors_) order_ *= f;
        add_.assign(static_cast<std::size_t>(order_) * order_, 0);
        neg_.assign(order_, 0);
        for (int a = 0; a < order_; ++a) {
            auto da = mixed_digits(a, factors_);
            std::vector<int> dn(factors_.size());
            for (std::size_t i = 0; i < factors_.size(); ++i) dn[i] = (factors_[i] - da[i]) % factors_[i];
            neg_[a] = from_mixed_digits(dn, factors_);
            for (int b = 0; b < order_; ++b) {
                auto db = mixed_digits(b, factors_);
                for (std::size_t i = 0; i < factors_.size(); ++i) db[i] = (da[i] + db[i]) % factors_[i];
                add_[static_cast<std::size_t>(a) * order_ + b] = from_mixed_digits(db, factors_);
            }
        }
        mode_charge_.resize(n_);
        for (int g = 0; g < n_; ++g) mode_charge_[g] = order_ == 1 ? 0 : g;
    }
    int order() const { return order_; }
    int add(int a, int b) const { return add_[static_cast<std::size_t>(a) * order_ + b]; }
    int neg(int a) const { return neg_[a]; }
    int of_key(Key k) const {
        if (order_ == 1) return 0;
        int c = 0;
        for (int g = 0; g < n_; ++g) {
            int cnt = key_count(k, g);
            for (int t = 0; t < cnt; ++t) c = add(c, mode_charge_[g]);
        }
        return c;
    }

private:
    int n_ = 0;
    int order_ = 1;
    std::vector<int> factors_;
    std::vector<int> add_{0}, neg_{0}, mode_charge_;
};

using KeySet = absl::flat_hash_set<Key, KeyHash>;

struct IdealPatternSet {
    UnitarySpec spec;
    int n = 0;
    std::vector<std::pair<Pattern, cplx>> members;  // lexicographic order
    KeySet keys;

    bool contains(const Pattern& s) const { return keys.contains(pack(s)); }
    std::size_t size() const { return members.size(); }
    double total_probability() const {
        double t = 0;
        for (const auto& [s, a] : members) t += std::norm(a);
        return t;
    }
};

namespace detail {
inline void finalize(IdealPatternSet& set) {
    std::sort(set.members.begin(), set.members.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    set.keys.clear();
    for (const auto& [s, a] : set.members) set.keys.insert(pack(s));
}

// Patterns with s_0 = 1 allowed by the symmetry law, built by completing n-2 free photons.
inline std::vector<Pattern> symmetry_candidates(const UnitarySpec& spec) {
    const int n = spec.size();
    auto factors = spec.group_factors();
    KeySet seen;
    std::vector<Pattern> out;
    for (const Pattern& tail : all_patterns(n - 2, n - 1)) {
        ModeList g{0};
        for (int i = 0; i < n - 1; ++i)
            for (int c = 0; c < tail[i]; ++c) g.push_back(i + 1);
        int last = complete_pattern(g, factors);
        if (last == 0) continue;
        g.push_back(last);
        Pattern s = to_pattern(g, n);
        if (seen.insert(pack(s)).second) out.push_back(std::move(s));
    }
    return out;
}
}  // namespace detail

// Ideal patterns by permanent evaluation over symmetry-allowed candidates.
inline IdealPatternSet enumerate_ideal_patterns(const UnitaryMatrix& U) {
    IdealPatternSet set;
    set.spec = U.spec;
    set.n = U.size();
    const int n = set.n;
    if (n < 3) throw std::invalid_argument("enumerate_ideal_patterns: need n >= 3");
    std::vector<Pattern> cands;
    if (!U.spec.group_factors().empty()) {
        cands = detail::symmetry_candidates(U.spec);
    } else {
        for (Pattern tail : all_patterns(n - 1, n - 1)) {
            tail.insert(tail.begin(), 1);
            cands.push_back(std::move(tail));
        }
    }
    for (const auto& s : cands) {
        cplx a = amplitude_all_ones(s, U.U);
        if (std::norm(a) >= kSuppressionThreshold) set.members.emplace_back(s, a);
    }
    detail::finalize(set);
    return set;
}

inline IdealPatternSet enumerate_ideal_patterns(const UnitarySpec& spec) { return enumerate_ideal_patterns(build(spec)); }

// Same set from one truncated evolution of the all-ones input.
inline IdealPatternSet ideal_patterns_by_evolution(const UnitaryMatrix& U) {
    IdealPatternSet set;
    set.spec = U.spec;
    set.n = U.size();
    ModeList all(set.n);
    std::iota(all.begin(), all.end(), 0);
    AmplitudeMap amps = evolve_modes(U.U, all, true);
    for (const auto& [k, a] : amps.entries)
        if (key_count(k, 0) == 1 && std::norm(a) >= kSuppressionThreshold) set.members.emplace_back(unpack(k, set.n), a);
    detail::finalize(set);
    return set;
}

// perm(A) with A(i, j) = w^(g_i * j), rounded to the nearest integer.
inline long long circulant_coefficient(const ModeList& g, int n) {
    if (static_cast<int>(g.size()) != n) throw std::invalid_argument("circulant_coefficient: need n entries");
    Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        if (g[i] < 0 || g[i] >= n) throw std::out_of_range("circulant_coefficient: entry out of range");
        for (int j = 0; j < n; ++j) A(i, j) = detail::root_of_unity(static_cast<long long>(g[i]) * j, n);
    }
    cplx p = permanent(A);
    double r = std::round(p.real());
    double resid = std::max(std::abs(p.real() - r), std::abs(p.imag()));
    if (resid >= 0.25) throw RoundingUnsafe("circulant_coefficient: residual " + std::to_string(resid));
    return static_cast<long long>(r);
}

namespace detail {
__extension__ using i128 = __int128;

// Coefficients of the n-th cyclotomic polynomial, lowest degree first.
inline std::vector<long long> cyclotomic(int n) {
    std::vector<long long> p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;  // x^n - 1
    for (int d = 1; d < n; ++d) {
        if (n % d) continue;
        auto q = cyclotomic(d);
        // exact division of p by monic q
        int dp = static_cast<int>(p.size()) - 1, dq = static_cast<int>(q.size()) - 1;
        std::vector<long long> quot(dp - dq + 1, 0);
        for (int k = dp - dq; k >= 0; --k) {
            long long c = p[k + dq];
            quot[k] = c;
            for (int j = 0; j <= dq; ++j) p[k + j] -= c * q[j];
        }
        p = quot;
    }
    return p;
}
}  // namespace detail

// Exact perm(A) via Ryser in the group ring Z[x]/(x^n - 1), reduced modulo the
// cyclotomic polynomial. Slower than the numeric path but never loses precision.
inline long long circulant_coefficient_exact(const ModeList& g, int n) {
    using detail::i128;
    if (static_cast<int>(g.size()) != n) throw std::invalid_argument("circulant_coefficient_exact: need n entries");
    if (n > 20) throw std::invalid_argument("circulant_coefficient_exact: n too large");
    std::vector<std::vector<i128>> rowsum(n, std::vector<i128>(n, 0));
    std::vector<i128> total(n, 0), prod(n), tmp(n);
    std::uint64_t prev = 0;
    for (std::uint64_t k = 1; k < (std::uint64_t(1) << n); ++k) {
        std::uint64_t gray = k ^ (k >> 1), diff = gray ^ prev;
        int j = std::countr_zero(diff);
        int sign = (gray & diff) ? 1 : -1;
        for (int i = 0; i < n; ++i) rowsum[i][(static_cast<long long>(g[i]) * j) % n] += sign;
        prev = gray;
        prod = rowsum[0];
        for (int i = 1; i < n; ++i) {
            std::fill(tmp.begin(), tmp.end(), 0);
            for (int a = 0; a < n; ++a) {
                if (prod[a] == 0) continue;
                for (int b = 0; b < n; ++b) tmp[(a + b) % n] += prod[a] * rowsum[i][b];
            }
            std::swap(prod, tmp);
        }
        int sgn = (std::popcount(gray) % 2) ? -1 : 1;
        for (int a = 0; a < n; ++a) total[a] += sgn * prod[a];
    }
    if (n % 2 == 1)
        for (auto& t : total) t = -t;
    // reduce modulo the cyclotomic polynomial
    auto phi = detail::cyclotomic(n);
    int dphi = static_cast<int>(phi.size()) - 1;
    for (int k = n - 1; k >= dphi; --k) {
        i128 c = total[k];
        if (c == 0) continue;
        for (int j = 0; j <= dphi; ++j) total[k - dphi + j] -= c * phi[j];
    }
    for (int k = 1; k < dphi; ++k)
        if (total[k] != 0) throw std::logic_error("circulant_coefficient_exact: value is not a rational integer");
    return static_cast<long long>(total[0]);
}

inline bool is_prime_power(int n) {
    if (n < 2) return false;
    int p = 2;
    while (n % p) ++p;
    while (n % p == 0) n /= p;
    return n == 1;
}

struct Counterexample {
    Pattern pattern;   // shifted so that s_0 = 1
    Pattern unshifted;
    int q1 = 0, q2 = 0, c1 = 0, c2 = 0, shift = 0;
};

// Pattern obeying the ZTL whose amplitude vanishes, for n not a prime power.
// Among coprime splits n = q1*q2 and Bezout pairs c1*q1 = 1 + c2*q2 with
// 1 <= c1 < q2, 1 <= c2 < q1, the smallest c2 wins, then the smallest q2.
// The mode list is then shifted down by one until s_0 = 1.
inline Counterexample ztl_counterexample_report(int n) {
    if (n < 2 || is_prime_power(n)) throw NotApplicable("ztl_counterexample: n is a prime power");
    std::optional<Counterexample> best;
    for (int q2 = 2; q2 < n; ++q2) {
        if (n % q2) continue;
        int q1 = n / q2;
        if (q1 < 2 || std::gcd(q1, q2) != 1) continue;
        for (int c2 = 1; c2 < q1; ++c2) {
            if ((1 + c2 * q2) % q1) continue;
            int c1 = (1 + c2 * q2) / q1;
            if (c1 < 1 || c1 >= q2) continue;
            if (!best || c2 < best->c2 || (c2 == best->c2 && q2 < best->q2)) best = Counterexample{{}, {}, q1, q2, c1, c2, 0};
            break;
        }
    }
    if (!best) throw std::logic_error("ztl_counterexample: no Bezout pair found");
    auto& r = *best;
    const int M1 = r.c2 * r.q2 - 1, M0 = n - r.c2 * r.q2 - 2;
    const int A1 = r.c2 * r.q2 - r.c1 * r.c2 + 1, A2 = n - r.c2 * r.q2, A3 = n - r.c2 * r.q2 + r.c1 * r.c2;
    ModeList g(M0, 0);
    g.insert(g.end(), M1, 1);
    g.insert(g.end(), {A1, A2, A3});
    r.unshifted = to_pattern(g, n);
    Pattern s = r.unshifted;
    while (s[0] != 1) {
        std::rotate(s.begin(), s.begin() + 1, s.end());
        ++r.shift;
    }
    r.pattern = s;
    return r;
}

inline Pattern ztl_counterexample(int n) { return ztl_counterexample_report(n).pattern; }

struct PrimePowerReport {
    int n = 0;
    std::size_t total_ztl_s0_1 = 0;
    std::size_t ideal = 0;
    std::vector<Pattern> exceptions;
    double ratio_to_dimension = 0;  // ideal / d_{n-1,n-1}
};

inline PrimePowerReport verify_prime_power_law(int n) {
    if (n < 3) throw std::invalid_argument("verify_prime_power_law: need n >= 3");
    PrimePowerReport rep;
    rep.n = n;
    UnitaryMatrix U = build(UnitarySpec::fourier(n));
    for (const auto& s : detail::symmetry_candidates(U.spec)) {
        ++rep.total_ztl_s0_1;
        if (std::norm(amplitude_all_ones(s, U.U)) >= kSuppressionThreshold) ++rep.ideal;
        else rep.exceptions.push_back(s);
    }
    std::sort(rep.exceptions.begin(), rep.exceptions.end());
    rep.ratio_to_dimension = static_cast<double>(rep.ideal) / static_cast<double>(dimension_u64(n - 1, n - 1));
    return rep;
}

}  // namespace phodist
