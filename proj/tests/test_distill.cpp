#include <gtest/gtest.h>

#include <random>

#include <phodist/distill.hpp>

#include "oracle.hpp"

using namespace phodist;

namespace {
RatePolynomial poly(const UnitarySpec& spec, const ErrorModel& model, RateOptions opt = {}) {
    RateEngine eng(build(spec));
    return rate_polynomials(eng, model, opt);
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol, const std::string& what) {
    ASSERT_EQ(a.size(), b.size()) << what;
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], tol) << what << " k=" << k;
}
}  // namespace

TEST(Distill, BernsteinMatchesPowerBasis) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int n = 0; n <= 12; ++n) {
        std::vector<double> c(n + 1);
        for (auto& x : c) x = u(rng);
        for (int t = 0; t < 20; ++t) {
            double x = u(rng), want = 0;
            for (int k = 0; k <= n; ++k) want += binomial(n, k) * std::pow(x, k) * std::pow(1 - x, n - k) * c[k];
            EXPECT_NEAR(bernstein(c, x), want, 1e-12);
        }
    }
}

TEST(Distill, BernsteinOfConstantIsConstant) {
    std::vector<double> c(9, 0.3);
    for (double x : {0.0, 0.2, 0.7, 1.0}) EXPECT_NEAR(bernstein(c, x), 0.3, 1e-15);
}

TEST(Distill, MatchesBruteForceOracle) {
    struct Case {
        UnitarySpec spec;
        ErrorModel model;
        oracle::Model om;
        int R;
    };
    std::vector<Case> cases{
        {UnitarySpec::fourier(3), ErrorModel::obb(), oracle::Model::OBB, 0},
        {UnitarySpec::fourier(4), ErrorModel::obb(), oracle::Model::OBB, 0},
        {UnitarySpec::fourier(4), ErrorModel::sbb(), oracle::Model::SBB, 0},
        {UnitarySpec::hadamard(2), ErrorModel::sbb(), oracle::Model::SBB, 0},
        {UnitarySpec::fourier(5), ErrorModel::obb(), oracle::Model::OBB, 0},
        {UnitarySpec::fourier(4), ErrorModel::urs(2), oracle::Model::URS, 2},
        {UnitarySpec::fourier(3), ErrorModel::urs(3), oracle::Model::URS, 3},
        {UnitarySpec::haar(4, 5), ErrorModel::obb(), oracle::Model::OBB, 0},
        {UnitarySpec::haar(4, 5), ErrorModel::urs(2), oracle::Model::URS, 2},
    };
    for (const auto& c : cases) {
        RateOptions opt;
        opt.with_loss_term = true;
        auto p = poly(c.spec, c.model, opt);
        auto o = oracle::rates(build(c.spec).U, c.om, c.R);
        std::string what = c.spec.to_string() + " " + c.model.to_string();
        expect_close(p.h_k, o.h, 1e-12, what + " h");
        expect_close(p.ebar_k, o.ebar, 1e-12, what + " ebar");
        expect_close(p.c_k, o.c, 1e-12, what + " c");
    }
}

TEST(Distill, UrsLimits) {
    auto spec = UnitarySpec::fourier(5);
    auto sbb = poly(spec, ErrorModel::sbb()), u1 = poly(spec, ErrorModel::urs(1));
    expect_close(u1.h_k, sbb.h_k, 1e-13, "urs1 h");
    expect_close(u1.ebar_k, sbb.ebar_k, 1e-13, "urs1 ebar");
    // labels rarely collide for large R: distance to OBB shrinks like k^2 / R
    auto obb = poly(spec, ErrorModel::obb());
    auto big = poly(spec, ErrorModel::urs(100000));
    expect_close(big.h_k, obb.h_k, 1e-3, "urs big h");
    expect_close(big.ebar_k, obb.ebar_k, 1e-3, "urs big ebar");
}

TEST(Distill, FirstOrderLaws) {
    for (auto spec : {UnitarySpec::fourier(3), UnitarySpec::fourier(5), UnitarySpec::fourier(6), UnitarySpec::hadamard(2),
                      UnitarySpec::fourier_tuple({3, 2})})
        for (auto model : {ErrorModel::obb(), ErrorModel::sbb(), ErrorModel::urs(3)}) {
            auto p = poly(spec, model);
            const double n = p.n, h0 = p.h_k[0];
            EXPECT_EQ(p.ebar_k[0], 0.0);
            EXPECT_NEAR(p.h_k[1], h0 / n, 1e-12) << spec.to_string();
            EXPECT_NEAR(p.ebar_k[1], h0 / (n * n), 1e-12) << spec.to_string();
            auto fo = first_order_check(p);
            EXPECT_LT(fo.error_rel_dev, 1e-4);
        }
}

TEST(Distill, SymmetryReductionIsExact) {
    for (auto spec : {UnitarySpec::fourier(6), UnitarySpec::hadamard(3), UnitarySpec::fourier_tuple({3, 2}), UnitarySpec::fourier(7)})
        for (auto model : {ErrorModel::obb(), ErrorModel::sbb(), ErrorModel::urs(2)}) {
            RateOptions on, off;
            off.use_symmetry = false;
            on.with_loss_term = off.with_loss_term = true;
            auto a = poly(spec, model, on), b = poly(spec, model, off);
            std::string what = spec.to_string() + " " + model.to_string();
            expect_close(a.h_k, b.h_k, 1e-10, what);
            expect_close(a.ebar_k, b.ebar_k, 1e-10, what);
            expect_close(a.c_k, b.c_k, 1e-10, what);
        }
}

TEST(Distill, ThreadCountDoesNotChangeBits) {
    RateOptions one, four;
    four.threads = 4;
    auto a = poly(UnitarySpec::fourier(7), ErrorModel::obb(), one);
    auto b = poly(UnitarySpec::fourier(7), ErrorModel::obb(), four);
    EXPECT_EQ(a.h_k, b.h_k);
    EXPECT_EQ(a.ebar_k, b.ebar_k);
}

TEST(Distill, RatesAreProbabilitiesOnRandomEps) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto spec : {UnitarySpec::fourier(4), UnitarySpec::fourier(6), UnitarySpec::hadamard(3), UnitarySpec::haar(5, 2)})
        for (auto model : {ErrorModel::obb(), ErrorModel::sbb()}) {
            auto p = poly(spec, model);
            for (int t = 0; t < 200; ++t) {
                double x = u(rng);
                double h = eval_heralding(p, x), e = eval_error_bar(p, x);
                EXPECT_GE(e, -1e-15);
                EXPECT_LE(e, h + 1e-15);
                EXPECT_LE(h, 1 + 1e-15);
            }
        }
}

TEST(Distill, ThresholdIsAFixedPoint) {
    auto p = poly(UnitarySpec::fourier(6), ErrorModel::obb());
    double t = distillation_threshold(p);
    EXPECT_NEAR(eval_error(p, t), t, 1e-8);
    for (double x = 0.01; x < t - 1e-3; x += 0.01) EXPECT_LT(eval_error(p, x), x);
    EXPECT_GT(t, 1.0 / 6);
}

TEST(Distill, NoThresholdWhenErrorNeverCatchesUp) {
    RatePolynomial p;
    p.n = 2;
    p.h_k = {1, 1, 1};
    p.ebar_k = {0, 0, 0};
    EXPECT_THROW(distillation_threshold(p), NoThreshold);
}

TEST(Distill, OptimalNPicksSmallestError) {
    std::vector<RatePolynomial> c;
    for (int n : {3, 4, 5, 6}) c.push_back(poly(UnitarySpec::fourier(n), ErrorModel::obb()));
    for (double eps : {0.001, 0.05, 0.2}) {
        auto best = optimal_n(eps, c);
        for (const auto& p : c) EXPECT_LE(eval_error(c[best], eps), eval_error(p, eps) + 1e-15);
    }
}

TEST(Distill, ModelParsing) {
    EXPECT_EQ(parse_model("obb").kind, ErrorModel::Kind::OBB);
    EXPECT_EQ(parse_model("urs:4").R, 4);
    EXPECT_THROW(parse_model("urs:0"), std::invalid_argument);
    EXPECT_THROW(parse_model("urs:x"), std::invalid_argument);
    EXPECT_THROW(parse_model("xyz"), std::invalid_argument);
}

TEST(Distill, DeskLimit) {
    RateEngine eng(build(UnitarySpec::fourier(9)));
    RateOptions opt;
    opt.max_n = 8;
    EXPECT_THROW(rate_polynomials(eng, ErrorModel::obb(), opt), BudgetExceeded);
}

TEST(Distill, ConfigurationChecks) {
    RateEngine eng(build(UnitarySpec::fourier(4)));
    EXPECT_THROW(eng.config_probabilities({0, 0}, ErrorModel::obb()), std::invalid_argument);
    EXPECT_THROW(eng.config_probabilities({4}, ErrorModel::obb()), std::out_of_range);
    // all photons bad under SBB behave like the ideal input, with the error photon always the herald
    auto all = eng.config_probabilities({0, 1, 2, 3}, ErrorModel::sbb());
    EXPECT_EQ(all.P10, 0.0);
    EXPECT_NEAR(all.P01, 0.25, 1e-14);
}

TEST(Distill, ConjectureProbesHoldOnSmallFourier) {
    auto p = poly(UnitarySpec::fourier(5), ErrorModel::obb());
    auto rep = conjecture_probe(p);
    for (const auto& it : rep.items) EXPECT_TRUE(it.holds) << it.name << " " << it.detail;
    EXPECT_TRUE(ideal_heralding_monotone(5, 60).holds);
}
