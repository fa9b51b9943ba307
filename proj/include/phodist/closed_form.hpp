#pragma once
// Exact ideal heralding rate of the Fourier protocol:
// h_n(0) = (-1/n)^(n-1) (n-1)! sum_{t<n} (n-t) (-n)^t / t!.

#include <stdexcept>

#include <gmpxx.h>

namespace phodist {

struct ClosedForm {
    int n = 0;
    mpz_class numerator;    // n^(n-1) h_n(0), an integer
    mpz_class denominator;  // n^(n-1)
    double value = 0;
    double minus_quarter = 0;  // h_n(0) - 1/4, computed without cancellation

    mpq_class exact() const {
        mpq_class q(numerator, denominator);
        q.canonicalize();
        return q;
    }
};

namespace detail {
// Binary splitting of S = sum_{t in [l,r)} c_t x^(t-l) prod_{j=t+1}^{r-1} j with c_t = n - t.
// Returns T(l,r) together with P(l,r) = prod_{j=l}^{r-1} j and X(l,r) = x^(r-l).
struct Split {
    mpz_class T, P, X;
};

inline Split split_sum(long l, long r, long n) {
    if (r - l == 1) return {mpz_class(n - l), mpz_class(l), mpz_class(-n)};
    long m = l + (r - l) / 2;
    Split a = split_sum(l, m, n), b = split_sum(m, r, n);
    return {a.T * b.P + a.X * b.T, a.P * b.P, a.X * b.X};
}

inline double ratio_to_double(const mpz_class& num, const mpz_class& den) {
    mpf_class q(num, 256), d(den, 256);
    q /= d;
    return q.get_d();
}
}  // namespace detail

inline ClosedForm ideal_heralding_closed_form(long n) {
    if (n < 3) throw std::invalid_argument("ideal_heralding_closed_form: need n >= 3");
    ClosedForm cf;
    cf.n = static_cast<int>(n);
    mpz_class S = detail::split_sum(0, n, n).T;
    cf.numerator = ((n - 1) % 2 == 0) ? S : mpz_class(-S);
    mpz_pow_ui(cf.denominator.get_mpz_t(), mpz_class(n).get_mpz_t(), static_cast<unsigned long>(n - 1));
    cf.value = detail::ratio_to_double(cf.numerator, cf.denominator);
    cf.minus_quarter = detail::ratio_to_double(4 * cf.numerator - cf.denominator, 4 * cf.denominator);
    return cf;
}

}  // namespace phodist
