#include <gtest/gtest.h>

#include <phodist/closed_form.hpp>
#include <phodist/haar.hpp>

using namespace phodist;

TEST(Haar, IdealHeraldingExact) {
    EXPECT_EQ(haar_ideal_heralding(3).exact, mpq_class(3, 10));
    for (int n = 3; n <= 30; ++n) {
        double closed = 0.25 / (1 - 1.0 / (2 * n));
        EXPECT_NEAR(haar_ideal_heralding(n).value, closed, 1e-14) << n;
        EXPECT_LT(haar_ideal_heralding(n + 1).value, haar_ideal_heralding(n).value);
    }
    EXPECT_NEAR(haar_ideal_heralding(5000).value, 0.25, 1e-4);
}

TEST(Haar, ExceedsFourierForSmallN) {
    for (int n = 4; n <= 9; ++n) EXPECT_GT(haar_ideal_heralding(n).value, ideal_heralding_closed_form(n).value) << n;
}

TEST(Haar, FirstOrderFormulas) {
    auto f = haar_first_order(8);
    EXPECT_DOUBLE_EQ(f.p_err, 1.0 / 16);
    EXPECT_NEAR(f.p_ideal, 0.25 * (49.0 / 64) / (1 - 3.0 / 16), 1e-15);
    // P_ideal and P_err as Haar-averaged dimension ratios
    for (int n = 3; n <= 12; ++n) {
        mpq_class pi(dimension(n - 2, n - 1) * dimension(1, n - 1), dimension(n - 1, n) * dimension(1, n));
        mpq_class pe(dimension(n - 1, n - 1) * dimension(0, n - 1), dimension(n - 1, n) * dimension(1, n));
        EXPECT_NEAR(haar_first_order(n).p_ideal, pi.get_d(), 1e-14);
        EXPECT_NEAR(haar_first_order(n).p_err, pe.get_d(), 1e-14);
    }
}

TEST(Haar, FullPostselectionReproducesEmpiricalHeralding) {
    auto rep = top_k_distillation(5, 3, {1.0});
    ASSERT_EQ(rep.top_k_curve.size(), 1u);
    EXPECT_NEAR(rep.top_k_curve[0].heralding, rep.h0_empirical, 1e-12);
    EXPECT_EQ(rep.top_k_curve[0].selected, dimension_u64(4, 4));
    EXPECT_NEAR(rep.top_k_curve[0].weight_fraction, 1.0, 1e-12);
}

TEST(Haar, TopKCurveIsMonotone) {
    auto rep = top_k_distillation(6, 1, {0.05, 0.1, 0.3, 0.6, 1.0});
    for (std::size_t i = 1; i < rep.top_k_curve.size(); ++i) {
        EXPECT_GE(rep.top_k_curve[i].heralding, rep.top_k_curve[i - 1].heralding);
        EXPECT_GE(rep.top_k_curve[i].selected, rep.top_k_curve[i - 1].selected);
    }
    auto w = top_k_distillation(6, 1, {0.3}, FractionBasis::Weight);
    EXPECT_GE(w.top_k_curve[0].weight_fraction, 0.3 - 1e-12);
    EXPECT_THROW(top_k_distillation(9, 1, {0.5}), BudgetExceeded);
    EXPECT_THROW(top_k_distillation(5, 1, {0.0}), std::invalid_argument);
}

TEST(Haar, PorterThomasDiagnostics) {
    auto pt = porter_thomas_check(6, 7);
    EXPECT_NEAR(pt.mean_times_d, 1.0, 0.02);
    EXPECT_NEAR(pt.fraction_above_mean, std::exp(-1.0), 0.05);
    EXPECT_EQ(pt.dof, 99);
    EXPECT_GE(pt.p_value, 0.0);
    EXPECT_LE(pt.p_value, 1.0);
}

TEST(Haar, OnePhotonOutIsSortedAndComplete) {
    auto U = sample_haar(5, 2);
    auto r = one_photon_out(U);
    EXPECT_EQ(r.size(), dimension_u64(4, 4));
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GE(r[i - 1].second, r[i].second);
}
