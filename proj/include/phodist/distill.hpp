#pragma once
// Error models, per-configuration heralding probabilities, rate polynomials,
// thresholds and derived protocol metrics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "closed_form.hpp"
#include "evolve.hpp"
#include "orbits.hpp"
#include "patterns.hpp"
#include "unitary.hpp"

namespace phodist {

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoThreshold : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ErrorModel {
    enum class Kind { URS, SBB, OBB };
    Kind kind = Kind::OBB;
    int R = 0;  // URS only

    static ErrorModel obb() { return {Kind::OBB, 0}; }
    static ErrorModel sbb() { return {Kind::SBB, 1}; }
    static ErrorModel urs(int R) {
        if (R < 1) throw std::invalid_argument("urs: need R >= 1");
        return {Kind::URS, R};
    }
    std::string to_string() const {
        switch (kind) {
            case Kind::OBB: return "obb";
            case Kind::SBB: return "sbb";
            case Kind::URS: return "urs:" + std::to_string(R);
        }
        return {};
    }
};

inline ErrorModel parse_model(const std::string& s) {
    if (s == "obb") return ErrorModel::obb();
    if (s == "sbb") return ErrorModel::sbb();
    if (s.rfind("urs:", 0) == 0) {
        std::size_t pos = 0;
        int R = 0;
        try {
            R = std::stoi(s.substr(4), &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("model: bad URS label count in '" + s + "'");
        }
        if (pos != s.size() - 4) throw std::invalid_argument("model: bad URS label count in '" + s + "'");
        return ErrorModel::urs(R);
    }
    throw std::invalid_argument("model: expected obb, sbb or urs:R, got '" + s + "'");
}

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0, comp_ = 0;
};

struct ConfigProbabilities {
    double P01 = 0;  // an error photon exits mode 0, pattern ideal
    double P10 = 0;  // an ideal photon exits mode 0, pattern ideal
    double c = 0;    // single-loss conversion of a t_0 = 0 pattern into an apparent herald
};

struct RateOptions {
    bool use_symmetry = true;
    int threads = 1;
    int max_n = 12;            // desk limit for full polynomials
    bool with_loss_term = false;
};

inline std::uint64_t binomial(int n, int k) { return detail::binom_u64(n, k); }

// Bernstein-basis evaluation sum_k C(n,k) x^k (1-x)^(n-k) c_k via de Casteljau.
template <typename Real>
Real bernstein(const std::vector<Real>& c, Real x) {
    if (c.empty()) return Real(0);
    std::vector<Real> b(c);
    const std::size_t n = b.size() - 1;
    for (std::size_t r = 1; r <= n; ++r)
        for (std::size_t k = 0; k + r <= n; ++k) b[k] = (Real(1) - x) * b[k] + x * b[k + 1];
    return b[0];
}

struct RatePolynomial {
    int n = 0;
    std::vector<double> h_k;
    std::vector<double> ebar_k;
    std::vector<double> c_k;  // loss term coefficients, empty unless requested
    ErrorModel model;
    UnitarySpec spec;
};

inline double eval_heralding(const RatePolynomial& p, double eps) { return bernstein(p.h_k, eps); }
inline double eval_error_bar(const RatePolynomial& p, double eps) { return bernstein(p.ebar_k, eps); }
inline double eval_error(const RatePolynomial& p, double eps) {
    double h = eval_heralding(p, eps);
    if (!(h > 0)) throw std::domain_error("eval_error: heralding rate is zero");
    return eval_error_bar(p, eps) / h;
}

// Holds the unitary, its ideal set and the bucketing needed to combine
// independent photon groups quickly.
class RateEngine {
public:
    explicit RateEngine(UnitaryMatrix U) : RateEngine(U, ideal_patterns_by_evolution(U)) {}

    RateEngine(UnitaryMatrix U, const IdealPatternSet& ideal) : U_(std::move(U)), n_(U_.size()), charges_(U_.spec) {
        if (n_ > kMaxPackedModes) throw std::invalid_argument("RateEngine: at most 16 modes");
        for (const auto& [s, a] : ideal.members) {
            if (s.size() != static_cast<std::size_t>(n_) || s[0] != 1 || photon_count(s) != n_)
                throw std::invalid_argument("RateEngine: ideal patterns need n modes, n photons and s_0 = 1");
            keys_.insert(pack(s));
        }
        // bucketing by group label is only valid when every ideal pattern has label 0
        for (Key k : keys_)
            if (charges_.of_key(k) != 0) {
                charges_ = ChargeTable();
                break;
            }
    }

    int n() const { return n_; }
    const UnitaryMatrix& unitary() const { return U_; }
    const KeySet& ideal_keys() const { return keys_; }
    bool is_ideal(Key k) const { return keys_.contains(k); }

    // Output distribution of the error photons, truncated at two photons in mode 0.
    ProbMap error_distribution(const std::vector<int>& errors, const ErrorModel& model) const {
        if (errors.empty()) return ProbMap{{Key(0), 1.0}};
        switch (model.kind) {
            case ErrorModel::Kind::SBB: return probabilities(evolve_modes(U_.U, errors, true));
            case ErrorModel::Kind::OBB: return classical_modes(U_.U, errors, true);
            case ErrorModel::Kind::URS: return urs_distribution(errors, model.R);
        }
        return {};
    }

    ConfigProbabilities config_probabilities(const std::vector<int>& errors, const ErrorModel& model,
                                             bool with_loss_term = false) const {
        std::vector<char> is_err(n_, 0);
        for (int e : errors) {
            if (e < 0 || e >= n_) throw std::out_of_range("config_probabilities: error position out of range");
            if (is_err[e]) throw std::invalid_argument("config_probabilities: repeated error position");
            is_err[e] = 1;
        }
        ModeList good;
        for (int i = 0; i < n_; ++i)
            if (!is_err[i]) good.push_back(i);
        ProbMap pe = error_distribution(errors, model);
        ProbMap pi = good.empty() ? ProbMap{{Key(0), 1.0}} : probabilities(evolve_modes(U_.U, good, true));
        return combine(pe, pi, with_loss_term);
    }

    // Brings together two independent groups; pa plays the error role.
    ConfigProbabilities combine(const ProbMap& pa, const ProbMap& pb, bool with_loss_term) const {
        const int G = charges_.order();
        // buckets[(label * 2 + s0)] of the second group, canonical order inside
        std::vector<std::vector<std::pair<Key, double>>> buckets(static_cast<std::size_t>(G) * 2);
        for (const auto& [k, p] : sorted_entries(pb, n_)) {
            int s0 = key_count(k, 0);
            if (s0 > 1) continue;
            buckets[static_cast<std::size_t>(charges_.of_key(k)) * 2 + s0].emplace_back(k, p);
        }
        CompensatedSum p01, p10;
        KeyMap<double> zero_sector;
        for (const auto& [ka, qa] : sorted_entries(pa, n_)) {
            int a0 = key_count(ka, 0);
            if (a0 > 1) continue;
            int ca = charges_.of_key(ka);
            const auto& bucket = buckets[static_cast<std::size_t>(charges_.neg(ca)) * 2 + (1 - a0)];
            double acc = 0;
            for (const auto& [kb, qb] : bucket)
                if (keys_.contains(ka + kb)) acc += qb;
            (a0 == 1 ? p01 : p10).add(qa * acc);
            if (with_loss_term && a0 == 0) {
                // every label may contribute here, so walk all zero-photon buckets
                for (int c = 0; c < G; ++c)
                    for (const auto& [kb, qb] : buckets[static_cast<std::size_t>(c) * 2]) zero_sector[ka + kb] += qa * qb;
            }
        }
        ConfigProbabilities out{p01.value(), p10.value(), 0};
        if (with_loss_term) out.c = loss_term(zero_sector);
        return out;
    }

    // sum_t P(t) sum_{j>=1} (t_j/n) [t - e_j + e_0 ideal], over patterns with t_0 = 0.
    double loss_term(const KeyMap<double>& zero_sector) const {
        CompensatedSum c;
        for (const auto& [t, p] : sorted_entries(zero_sector, n_)) {
            double w = 0;
            for (int j = 1; j < n_; ++j) {
                int tj = key_count(t, j);
                if (tj == 0) continue;
                if (keys_.contains(t - unit_key(j) + unit_key(0))) w += static_cast<double>(tj) / n_;
            }
            if (w > 0) c.add(p * w);
        }
        return c.value();
    }

private:
    ProbMap urs_distribution(const std::vector<int>& errors, int R) const {
        const int k = static_cast<int>(errors.size());
        if (k > 10) throw BudgetExceeded("urs: more than 10 error photons");
        // set partitions via restricted growth strings; weight R(R-1)...(R-b+1)/R^k
        ProbMap total;
        std::vector<int> a(k, 0);
        const double Rk = std::pow(static_cast<double>(R), k);
        while (true) {
            int blocks = *std::max_element(a.begin(), a.end()) + 1;
            if (blocks <= R) {
                double w = 1;
                for (int b = 0; b < blocks; ++b) w *= (R - b);
                w /= Rk;
                ProbMap dist{{Key(0), 1.0}};
                for (int b = 0; b < blocks; ++b) {
                    ModeList grp;
                    for (int i = 0; i < k; ++i)
                        if (a[i] == b) grp.push_back(errors[i]);
                    dist = convolve(dist, probabilities(evolve_modes(U_.U, grp, true)), true);
                }
                for (const auto& [key, p] : by_key(dist)) total[key] += w * p;
            }
            // next restricted growth string
            int i = k - 1;
            while (i > 0) {
                int mx = *std::max_element(a.begin(), a.begin() + i);
                if (a[i] <= mx) break;
                --i;
            }
            if (i <= 0) break;
            ++a[i];
            std::fill(a.begin() + i + 1, a.end(), 0);
        }
        return total;
    }

    UnitaryMatrix U_;
    int n_;
    ChargeTable charges_;
    KeySet keys_;
};

struct PhiRates {
    double h_k = 0;
    double ebar_k = 0;
    double c_k = 0;
};

namespace detail {
// Runs f(i) for i in [0, count) on up to `threads` workers; results land by index.
template <typename F>
void parallel_indexed(std::size_t count, int threads, F&& f) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}
}  // namespace detail

inline PhiRates phi_rates(const RateEngine& eng, const ErrorModel& model, int k, const RateOptions& opt = {}) {
    const int n = eng.n();
    auto configs = error_orbits(eng.unitary().spec, k, opt.use_symmetry);
    std::vector<ConfigProbabilities> res(configs.size());
    detail::parallel_indexed(configs.size(), opt.threads, [&](std::size_t i) {
        res[i] = eng.config_probabilities(configs[i].error_positions, model, opt.with_loss_term);
    });
    CompensatedSum h, e, c;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        double m = static_cast<double>(configs[i].multiplicity);
        h.add(m * (res[i].P01 + res[i].P10));
        e.add(m * res[i].P01);
        c.add(m * res[i].c);
    }
    const double norm = static_cast<double>(binomial(n, k));
    return {h.value() / norm, e.value() / norm, c.value() / norm};
}

inline RatePolynomial rate_polynomials(const RateEngine& eng, const ErrorModel& model, const RateOptions& opt = {}) {
    const int n = eng.n();
    if (n > opt.max_n)
        throw BudgetExceeded("rate_polynomials: n = " + std::to_string(n) + " exceeds the desk limit " +
                             std::to_string(opt.max_n));
    RatePolynomial p;
    p.n = n;
    p.model = model;
    p.spec = eng.unitary().spec;
    for (int k = 0; k <= n; ++k) {
        PhiRates r = phi_rates(eng, model, k, opt);
        p.h_k.push_back(r.h_k);
        p.ebar_k.push_back(r.ebar_k);
        if (opt.with_loss_term) p.c_k.push_back(r.c_k);
    }
    return p;
}

struct FirstOrderReport {
    int n = 0;
    double eps = 1e-6;
    double error_ratio = 0;      // e(eps)/eps
    double expected_ratio = 0;   // 1/n
    double error_rel_dev = 0;
    double herald_slope = 0;     // (h(eps) - h_0)/eps
    double expected_slope = 0;   // -(n-1) h_0
    double slope_rel_dev = 0;
};

inline FirstOrderReport first_order_check(const RatePolynomial& p, double eps = 1e-6) {
    FirstOrderReport r;
    r.n = p.n;
    r.eps = eps;
    r.error_ratio = eval_error(p, eps) / eps;
    r.expected_ratio = 1.0 / p.n;
    r.error_rel_dev = std::abs(r.error_ratio - r.expected_ratio) / r.expected_ratio;
    r.herald_slope = (eval_heralding(p, eps) - p.h_k.at(0)) / eps;
    r.expected_slope = -(p.n - 1) * p.h_k.at(0);
    r.slope_rel_dev = std::abs(r.herald_slope - r.expected_slope) / std::abs(r.expected_slope);
    return r;
}

// Smallest eps in (0,1) with e(eps) = eps: grid scan of ebar - eps*h, then bisection.
inline double distillation_threshold(const RatePolynomial& p, int grid = 10000, double tol = 1e-9) {
    auto g = [&](double x) { return eval_error_bar(p, x) - x * eval_heralding(p, x); };
    double prev_x = 0, prev_g = g(0);
    for (int i = 1; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double gx = g(x);
        if (i > 1 && ((prev_g < 0) != (gx < 0))) {
            double lo = prev_x, hi = x;
            bool lo_neg = prev_g < 0;
            while (hi - lo > tol) {
                double mid = 0.5 * (lo + hi);
                if ((g(mid) < 0) == lo_neg) lo = mid;
                else hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_x = x;
        prev_g = gx;
    }
    throw NoThreshold("distillation_threshold: no sign change in (0, 1)");
}

// Index of the candidate with the smallest output error; ties go to the smaller n.
inline std::size_t optimal_n(double eps, const std::vector<RatePolynomial>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("optimal_n: no candidates");
    std::size_t best = 0;
    double best_e = eval_error(candidates[0], eps);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double e = eval_error(candidates[i], eps);
        bool tie = std::abs(e - best_e) <= 1e-15 * std::max(std::abs(e), std::abs(best_e));
        if ((!tie && e < best_e) || (tie && candidates[i].n < candidates[best].n)) {
            best = i;
            best_e = e;
        }
    }
    return best;
}

inline double resource_cost(const RatePolynomial& p, double eps) {
    double h = eval_heralding(p, eps);
    if (!(h > 0)) throw std::domain_error("resource_cost: heralding rate is zero");
    return p.n / h;
}

struct ConjectureReport {
    struct Item {
        std::string name;
        bool holds = true;
        double worst_margin = 0;  // min over the grid of (rhs - lhs) style slack, negative means violated
        std::string detail;
    };
    std::vector<Item> items;
};

// Numeric probes; nothing here asserts.
inline ConjectureReport conjecture_probe(const RatePolynomial& p, int grid = 1000) {
    ConjectureReport rep;
    const int n = p.n;
    const double h0 = p.h_k.at(0);
    {
        // lower bound h_k >= h_0/n for every k
        ConjectureReport::Item it{"term_lower_bound", true, 1e300, {}};
        std::ostringstream os;
        for (int k = 0; k <= n; ++k) {
            double margin = p.h_k[k] - h0 / n;
            if (margin < it.worst_margin) it.worst_margin = margin;
            if (margin < -1e-12) {
                it.holds = false;
                os << "k=" << k << " ratio h_k/h_0=" << p.h_k[k] / h0 << " < 1/n; ";
            }
        }
        it.detail = os.str();
        rep.items.push_back(it);
    }
    {
        // h(eps) >= h_0 ((1-eps)^n (1-1/n) + 1/n)
        ConjectureReport::Item it{"heralding_lower_bound", true, 1e300, {}};
        for (int i = 0; i <= grid; ++i) {
            double x = static_cast<double>(i) / grid;
            double rhs = h0 * (std::pow(1 - x, n) * (1 - 1.0 / n) + 1.0 / n);
            double margin = eval_heralding(p, x) - rhs;
            if (margin < it.worst_margin) it.worst_margin = margin;
            if (margin < -1e-12 && it.holds) {
                it.holds = false;
                it.detail = "first violation at eps=" + std::to_string(x);
            }
        }
        rep.items.push_back(it);
    }
    return rep;
}

// h_n(0) over a range of n from the closed form: is it strictly decreasing?
inline ConjectureReport::Item ideal_heralding_monotone(int n_from, int n_to) {
    ConjectureReport::Item it{"ideal_heralding_decreasing", true, 1e300, {}};
    double prev = ideal_heralding_closed_form(n_from).value;
    for (int n = n_from + 1; n <= n_to; ++n) {
        double cur = ideal_heralding_closed_form(n).value;
        it.worst_margin = std::min(it.worst_margin, prev - cur);
        if (!(cur < prev) && it.holds) {
            it.holds = false;
            it.detail = "not decreasing at n=" + std::to_string(n);
        }
        prev = cur;
    }
    return it;
}

}  // namespace phodist
