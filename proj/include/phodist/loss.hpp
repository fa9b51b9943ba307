#pragma once
// Per-mode photon loss after the interferometer.

#include <cmath>
#include <stdexcept>

#include "closed_form.hpp"
#include "distill.hpp"

namespace phodist {

struct LossParams {
    double lambda_bs = 0;  // loss probability per beamsplitter

    // per-mode loss 1 - (1 - lambda)^(log2 n)
    double Lambda(int n) const {
        if (lambda_bs < 0 || lambda_bs >= 1) throw std::invalid_argument("loss: lambda must lie in [0, 1)");
        return 1.0 - std::pow(1.0 - lambda_bs, std::log2(static_cast<double>(n)));
    }
};

// Rate polynomial that also carries the single-loss conversion coefficients.
inline RatePolynomial loss_polynomial(const RateEngine& eng, const ErrorModel& model, RateOptions opt = {}) {
    opt.with_loss_term = true;
    return rate_polynomials(eng, model, opt);
}

inline double c_n(const RatePolynomial& p, double eps) {
    if (p.c_k.empty()) throw std::invalid_argument("c_n: polynomial was built without the loss term");
    return bernstein(p.c_k, eps);
}

inline double lossy_heralding(const RatePolynomial& p, double eps, const LossParams& loss) {
    const double L = loss.Lambda(p.n);
    const double keep = std::pow(1.0 - L, p.n - 1);
    const double c = loss.lambda_bs == 0 ? 0.0 : c_n(p, eps);
    return keep * eval_heralding(p, eps) + p.n * L * keep * c;
}

// Lower bound (1 - Lambda)^(n-1) h(eps), tight at eps = 0.
inline double lossy_heralding_bound(const RatePolynomial& p, double eps, const LossParams& loss) {
    return std::pow(1.0 - loss.Lambda(p.n), p.n - 1) * eval_heralding(p, eps);
}

inline double output_fidelity(const RatePolynomial& p, double eps, const LossParams& loss) {
    const double L = loss.Lambda(p.n);
    const double h = eval_heralding(p, eps);
    const double c = loss.lambda_bs == 0 ? 0.0 : c_n(p, eps);
    return (1.0 - L) * (1.0 - eval_error(p, eps)) / (1.0 + p.n * L * c / h);
}

struct ResourceEstimate {
    double expected_runs = 0;
    double expected_photons = 0;
};

inline ResourceEstimate lossy_resource_estimate(const RatePolynomial& p, double eps, const LossParams& loss) {
    double h = lossy_heralding(p, eps, loss);
    if (!(h > 0)) throw std::domain_error("lossy_resource_estimate: heralding rate is zero");
    return {1.0 / h, p.n / h};
}

// eps -> 0 estimate from the exact ideal rate; needs no simulation, so any n works.
inline ResourceEstimate lossy_resource_estimate_ideal(int n, const LossParams& loss) {
    const double h0 = ideal_heralding_closed_form(n).value;
    const double h = std::pow(1.0 - loss.Lambda(n), n - 1) * h0;
    return {1.0 / h, n / h};
}

}  // namespace phodist
