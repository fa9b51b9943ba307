#pragma once
// Matrix permanents: Ryser with Gray-code updates, plus a naive oracle.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace phodist {

inline constexpr int kMaxPermanentSize = 20;

// perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} A(i, j)
template <typename Derived>
typename Derived::Scalar permanent(const Eigen::MatrixBase<Derived>& A) {
    using T = typename Derived::Scalar;
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw std::invalid_argument("permanent: matrix must be square");
    if (n > kMaxPermanentSize) throw std::invalid_argument("permanent: size exceeds limit");
    if (n == 0) return T(1);
    std::vector<T> rowsum(n, T(0));
    T total(0);
    const std::uint64_t limit = std::uint64_t(1) << n;
    std::uint64_t gray_prev = 0;
    for (std::uint64_t k = 1; k < limit; ++k) {
        std::uint64_t gray = k ^ (k >> 1);
        std::uint64_t diff = gray ^ gray_prev;
        int j = std::countr_zero(diff);
        bool added = (gray & diff) != 0;
        for (int i = 0; i < n; ++i) rowsum[i] += added ? A(i, j) : -A(i, j);
        gray_prev = gray;
        T prod(1);
        for (int i = 0; i < n; ++i) prod *= rowsum[i];
        if (std::popcount(gray) % 2 == 1) total -= prod;
        else total += prod;
    }
    return (n % 2 == 1) ? -total : total;
}

// O(n * n!) expansion; test oracle only.
template <typename Derived>
typename Derived::Scalar permanent_naive(const Eigen::MatrixBase<Derived>& A) {
    using T = typename Derived::Scalar;
    const int n = static_cast<int>(A.rows());
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    T total(0);
    do {
        T prod(1);
        for (int i = 0; i < n; ++i) prod *= A(i, sigma[i]);
        total += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

}  // namespace phodist
