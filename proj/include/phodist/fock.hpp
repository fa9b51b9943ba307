#pragma once
// Fock-basis bookkeeping: dimensions, lexicographic ranking, and
// conversion between occupation patterns and mode lists.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace phodist {

using Pattern = std::vector<int>;   // photons per mode
using ModeList = std::vector<int>;  // weakly increasing mode labels, one per photon

inline int photon_count(const Pattern& s) { return std::accumulate(s.begin(), s.end(), 0); }

// d_{n,m} = C(n+m-1, n), exact.
inline mpz_class dimension(int n_photons, int m_modes) {
    if (n_photons < 0 || m_modes < 1) throw std::invalid_argument("dimension: need n >= 0, m >= 1");
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n_photons + m_modes - 1),
                 static_cast<unsigned long>(n_photons));
    return r;
}

inline std::uint64_t dimension_u64(int n_photons, int m_modes) {
    mpz_class d = dimension(n_photons, m_modes);
    if (mpz_sizeinbase(d.get_mpz_t(), 2) > 63) throw std::overflow_error("dimension exceeds 63 bits");
    return static_cast<std::uint64_t>(mpz_get_ui(d.get_mpz_t()));
}

namespace detail {
inline std::uint64_t binom_u64(int a, int b) {
    if (b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    __extension__ unsigned __int128 r = 1;
    for (int i = 1; i <= b; ++i) {
        r = r * static_cast<unsigned>(a - b + i) / static_cast<unsigned>(i);
        if (r >> 63) throw std::overflow_error("binomial exceeds 63 bits");
    }
    return static_cast<std::uint64_t>(r);
}

// number of patterns with r photons in q modes
inline std::uint64_t completions(int r, int q) {
    if (r < 0) return 0;
    if (q == 0) return r == 0 ? 1 : 0;
    return binom_u64(r + q - 1, r);
}
}  // namespace detail

// Position of s among all patterns with the same n, m in lexicographic order of counts.
inline std::uint64_t rank(const Pattern& s) {
    const int m = static_cast<int>(s.size());
    if (m < 1) throw std::invalid_argument("rank: empty pattern");
    int r = photon_count(s);
    std::uint64_t idx = 0;
    for (int i = 0; i < m - 1; ++i) {
        if (s[i] < 0) throw std::invalid_argument("rank: negative count");
        for (int v = 0; v < s[i]; ++v) idx += detail::completions(r - v, m - i - 1);
        r -= s[i];
    }
    return idx;
}

inline Pattern unrank(std::uint64_t index, int n, int m) {
    if (index >= dimension_u64(n, m)) throw std::out_of_range("unrank: index out of range");
    Pattern s(m, 0);
    int r = n;
    for (int i = 0; i < m - 1; ++i) {
        int v = 0;
        for (;; ++v) {
            std::uint64_t c = detail::completions(r - v, m - i - 1);
            if (index < c) break;
            index -= c;
        }
        s[i] = v;
        r -= v;
    }
    s[m - 1] = r;
    return s;
}

inline ModeList to_mode_list(const Pattern& s) {
    ModeList g;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        for (int c = 0; c < s[i]; ++c) g.push_back(i);
    return g;
}

inline Pattern to_pattern(const ModeList& g, int m) {
    Pattern s(m, 0);
    for (int x : g) {
        if (x < 0 || x >= m) throw std::out_of_range("to_pattern: mode index out of range");
        ++s[x];
    }
    return s;
}

// Canonical byte encoding: one unsigned byte per mode.
inline std::string encode(const Pattern& s) {
    std::string out(s.size(), '\0');
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] > 255) throw std::invalid_argument("encode: count outside [0,255]");
        out[i] = static_cast<char>(static_cast<unsigned char>(s[i]));
    }
    return out;
}

inline Pattern decode(const std::string& bytes) {
    Pattern s(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) s[i] = static_cast<unsigned char>(bytes[i]);
    return s;
}

// All patterns of n photons in m modes, lexicographic order.
inline std::vector<Pattern> all_patterns(int n, int m) {
    std::vector<Pattern> out;
    Pattern s(m, 0);
    s[m - 1] = n;
    out.reserve(dimension_u64(n, m));
    while (true) {
        out.push_back(s);
        // lexicographic successor: bump the rightmost non-final slot whose tail is nonempty
        int tail = s[m - 1];
        int i = m - 2;
        while (i >= 0 && tail == 0) tail += s[i--];
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < m; ++j) s[j] = 0;
        s[m - 1] = tail - 1;
    }
    return out;
}

// Packed form used by the amplitude engine: byte i holds the count of mode i.
// Supports up to 16 modes. Adding two keys adds the patterns.
__extension__ using Key = unsigned __int128;
inline constexpr int kMaxPackedModes = 16;

inline Key unit_key(int mode) { return Key(1) << (8 * mode); }
inline int key_count(Key k, int mode) { return static_cast<int>((k >> (8 * mode)) & 0xff); }

inline Key pack(const Pattern& s) {
    if (s.size() > kMaxPackedModes) throw std::invalid_argument("pack: more than 16 modes");
    Key k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] > 255) throw std::invalid_argument("pack: count outside [0,255]");
        k |= Key(static_cast<unsigned>(s[i])) << (8 * i);
    }
    return k;
}

inline Pattern unpack(Key k, int m) {
    Pattern s(m);
    for (int i = 0; i < m; ++i) s[i] = key_count(k, i);
    return s;
}

// Packed keys order like the lexicographic order of their patterns.
inline bool lex_less(Key a, Key b, int m) {
    for (int i = 0; i < m; ++i) {
        int x = key_count(a, i), y = key_count(b, i);
        if (x != y) return x < y;
    }
    return false;
}

struct KeyHash {
    std::size_t operator()(Key k) const noexcept {
        auto lo = static_cast<std::uint64_t>(k);
        auto hi = static_cast<std::uint64_t>(k >> 64);
        std::uint64_t h = lo * 0x9E3779B97F4A7C15ULL ^ (hi + 0x632BE59BD9B4E019ULL + (lo << 6) + (lo >> 2));
        h ^= h >> 31;
        h *= 0xD6E8FEB86659FD93ULL;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

}  // namespace phodist
