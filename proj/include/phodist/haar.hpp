#pragma once
// Haar-random interferometers as a baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gmpxx.h>

#include "distill.hpp"
#include "evolve.hpp"
#include "fock.hpp"
#include "patterns.hpp"
#include "unitary.hpp"

namespace phodist {

struct ExactRate {
    mpq_class exact;
    double value = 0;
};

// d_{n-1,n-1} / d_{n,n}: a 1-design spreads the all-ones input evenly over patterns.
inline ExactRate haar_ideal_heralding(int n) {
    if (n < 3) throw std::invalid_argument("haar_ideal_heralding: need n >= 3");
    mpq_class q(dimension(n - 1, n - 1), dimension(n, n));
    q.canonicalize();
    return {q, q.get_d()};
}

struct HaarFirstOrder {
    double p_ideal = 0;
    double p_err = 0;
};

inline HaarFirstOrder haar_first_order(int n) {
    if (n < 3) throw std::invalid_argument("haar_first_order: need n >= 3");
    const double x = static_cast<double>(n);
    return {0.25 * (1 - 1 / x) * (1 - 1 / x) / (1 - 1.5 / x), 1 / (2 * x)};
}

struct TopKPoint {
    double fraction = 0;
    std::size_t selected = 0;
    double heralding = 0;        // zero-error heralding of the selected set
    double error_ratio = 0;      // lim e(eps)/eps for the selected set
    double analytic_heralding = 0;
    double weight_fraction = 0;  // share of the one-photon-out probability captured
};

// Count: r of the d_{n-1,n-1} patterns. Weight: fewest top patterns holding r of the total probability.
enum class FractionBasis { Count, Weight };

struct HaarReport {
    int n = 0;
    std::uint64_t seed = 0;
    double h0_analytic = 0;
    double h0_empirical = 0;
    double p_ideal = 0;
    double p_err = 0;
    double p_star = 0;  // order-statistics estimate of the largest probability
    double p_max = 0;   // observed largest one-photon-out probability
    std::vector<TopKPoint> top_k_curve;
};

// One-photon-out patterns of the all-ones input, most probable first.
inline std::vector<std::pair<Pattern, double>> one_photon_out(const UnitaryMatrix& U) {
    ModeList all(U.size());
    std::iota(all.begin(), all.end(), 0);
    AmplitudeMap amps = evolve_modes(U.U, all, true);
    std::vector<std::pair<Pattern, double>> out;
    for (const auto& [s, a] : amps.sorted())
        if (s[0] == 1 && std::norm(a) >= kSuppressionThreshold) out.emplace_back(s, std::norm(a));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

// Heralding and first-order error ratio n * ebar_1 / h_0 when post-selecting on `chosen`.
inline std::pair<double, double> postselect_first_order(const UnitaryMatrix& U, const IdealPatternSet& chosen) {
    RateEngine eng(U, chosen);
    RateOptions opt;
    opt.use_symmetry = false;
    PhiRates r0 = phi_rates(eng, ErrorModel::obb(), 0, opt);
    PhiRates r1 = phi_rates(eng, ErrorModel::obb(), 1, opt);
    return {r0.h_k, U.size() * r1.ebar_k / r0.h_k};
}

inline HaarReport top_k_distillation(int n, std::uint64_t seed, const std::vector<double>& fractions,
                                     FractionBasis basis = FractionBasis::Count) {
    if (n < 3 || n > 8) throw BudgetExceeded("top_k_distillation: supported for 3 <= n <= 8");
    UnitaryMatrix U = sample_haar(n, seed);
    auto ranked = one_photon_out(U);
    HaarReport rep;
    rep.n = n;
    rep.seed = seed;
    rep.h0_analytic = haar_ideal_heralding(n).value;
    auto fo = haar_first_order(n);
    rep.p_ideal = fo.p_ideal;
    rep.p_err = fo.p_err;
    for (const auto& [s, p] : ranked) rep.h0_empirical += p;
    const double D = static_cast<double>(dimension_u64(n - 1, n - 1));
    rep.p_star = std::log(D) / static_cast<double>(dimension_u64(n, n));
    rep.p_max = ranked.empty() ? 0 : ranked.front().second;
    for (double r : fractions) {
        if (!(r > 0 && r <= 1)) throw std::invalid_argument("top_k_distillation: fractions must lie in (0, 1]");
        std::size_t count = 0;
        if (basis == FractionBasis::Count) {
            count = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(std::ceil(r * D - 1e-9)));
        } else {
            double acc = 0;
            while (count < ranked.size() && acc < r * rep.h0_empirical * (1 - 1e-12)) acc += ranked[count++].second;
        }
        double captured = 0;
        for (std::size_t i = 0; i < count; ++i) captured += ranked[i].second;
        IdealPatternSet chosen;
        chosen.spec = U.spec;
        chosen.n = n;
        for (std::size_t i = 0; i < count; ++i) chosen.members.emplace_back(ranked[i].first, cplx(std::sqrt(ranked[i].second)));
        TopKPoint pt;
        pt.fraction = r;
        pt.selected = count;
        pt.weight_fraction = captured / rep.h0_empirical;
        std::tie(pt.heralding, pt.error_ratio) = postselect_first_order(U, chosen);
        pt.analytic_heralding = r * rep.h0_analytic * (1 - std::log(r));
        rep.top_k_curve.push_back(pt);
    }
    return rep;
}

struct PorterThomasReport {
    int n = 0;
    std::size_t patterns = 0;
    int bins = 100;
    double statistic = 0;
    int dof = 0;
    double p_value = 0;
    double mean_times_d = 0;     // mean probability relative to 1/d
    double fraction_above_mean = 0;
};

// Chi-square of d*p against Exp(1) over the bulk (top 1% of values dropped).
inline PorterThomasReport porter_thomas_check(int n, std::uint64_t seed, int bins = 100) {
    if (n < 2 || n > 7) throw BudgetExceeded("porter_thomas_check: supported for 2 <= n <= 7");
    UnitaryMatrix U = sample_haar(n, seed);
    ModeList all(n);
    std::iota(all.begin(), all.end(), 0);
    AmplitudeMap amps = evolve_modes(U.U, all, false);
    const auto d = static_cast<double>(dimension_u64(n, n));
    std::vector<double> x;
    for (const auto& [s, a] : amps.sorted()) x.push_back(std::norm(a) * d);
    // patterns pruned as exact zeros still count toward d
    x.resize(static_cast<std::size_t>(d), 0.0);
    std::sort(x.begin(), x.end());
    PorterThomasReport rep;
    rep.n = n;
    rep.patterns = x.size();
    rep.bins = bins;
    rep.mean_times_d = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    rep.fraction_above_mean = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return v > 1.0; })) / x.size();
    const std::size_t keep = x.size() - x.size() / 100;
    const double cut = x[keep - 1];
    const double mass = 1 - std::exp(-cut);
    std::vector<double> obs(bins, 0);
    for (std::size_t i = 0; i < keep; ++i) {
        int b = std::min(bins - 1, static_cast<int>(x[i] / cut * bins));
        obs[b] += 1;
    }
    double chi = 0;
    for (int b = 0; b < bins; ++b) {
        double lo = cut * b / bins, hi = cut * (b + 1) / bins;
        double expct = keep * (std::exp(-lo) - std::exp(-hi)) / mass;
        if (expct > 0) chi += (obs[b] - expct) * (obs[b] - expct) / expct;
    }
    rep.statistic = chi;
    rep.dof = bins - 1;
    rep.p_value = boost::math::gamma_q(rep.dof / 2.0, chi / 2.0);
    return rep;
}

}  // namespace phodist
