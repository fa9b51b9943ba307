#include <gtest/gtest.h>

#include <phodist/evolve.hpp>
#include <phodist/permanent.hpp>
#include <phodist/unitary.hpp>

using namespace phodist;

namespace {
double factorial_product(const Pattern& s) {
    double f = 1;
    for (int c : s) f *= std::tgamma(c + 1);
    return f;
}

// <s|U-hat|t> = perm(U[rows of s, cols of t]) / sqrt(prod s! prod t!)
cplx permanent_amplitude(const Matrix& U, const Pattern& out, const ModeList& in) {
    ModeList rows = to_mode_list(out);
    const int k = static_cast<int>(in.size());
    Matrix A(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = U(rows[i], in[j]);
    const int m = static_cast<int>(U.rows());
    return permanent_naive(A) / std::sqrt(factorial_product(out) * factorial_product(to_pattern(in, m)));
}
}  // namespace

TEST(Evolve, HongOuMandel) {
    Matrix B(2, 2);
    const double r = 1 / std::sqrt(2.0);
    B << r, r, r, -r;
    auto a = evolve_modes(B, {0, 1}, false);
    EXPECT_NEAR(std::norm(a.at({2, 0})), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(a.at({0, 2})), 0.5, 1e-15);
    EXPECT_EQ(a.at({1, 1}), cplx(0));
}

TEST(Evolve, MatchesPermanentsForArbitraryInputs) {
    for (auto spec : {UnitarySpec::fourier(4), UnitarySpec::haar(4, 2), UnitarySpec::hadamard(2)}) {
        auto U = build(spec).U;
        for (ModeList in : {ModeList{0, 1, 2, 3}, ModeList{0, 0, 3}, ModeList{1, 1, 1, 2}, ModeList{2}}) {
            auto amps = evolve_modes(U, in, false);
            for (const auto& s : all_patterns(static_cast<int>(in.size()), 4))
                EXPECT_LT(std::abs(amps.at(s) - permanent_amplitude(U, s, in)), 1e-12) << spec.to_string();
            EXPECT_NEAR(amps.total_probability(), 1.0, 1e-12);
        }
    }
}

TEST(Evolve, TruncationKeepsOnlyLowModeZeroOccupancy) {
    auto U = build(UnitarySpec::haar(5, 4)).U;
    ModeList all{0, 1, 2, 3, 4};
    auto full = evolve_modes(U, all, false);
    auto cut = evolve_modes(U, all, true);
    for (const auto& [k, a] : cut.entries) {
        EXPECT_LT(key_count(k, 0), 2);
        EXPECT_LT(std::abs(a - full.entries.at(k)), 1e-13);
    }
    for (const auto& [k, a] : full.entries)
        if (key_count(k, 0) < 2 && std::abs(a) > 1e-13) {
            EXPECT_TRUE(cut.entries.contains(k));
        }
}

TEST(Evolve, AllOnesAmplitudeMatchesEvolution) {
    auto U = build(UnitarySpec::fourier(5)).U;
    auto amps = evolve_modes(U, {0, 1, 2, 3, 4}, false);
    for (const auto& s : all_patterns(5, 5)) EXPECT_LT(std::abs(amplitude_all_ones(s, U) - amps.at(s)), 1e-12);
}

TEST(Evolve, ClassicalIsMultinomialOverColumns) {
    auto U = build(UnitarySpec::haar(3, 9)).U;
    ModeList in{0, 2, 2};
    auto p = classical_modes(U, in, false);
    // oracle: sum over assignments of each photon to an output mode
    KeyMap<double> want;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                want[unit_key(a) + unit_key(b) + unit_key(c)] +=
                    std::norm(U(a, 0)) * std::norm(U(b, 2)) * std::norm(U(c, 2));
    ASSERT_EQ(p.size(), want.size());
    for (const auto& [k, v] : want) EXPECT_NEAR(p.at(k), v, 1e-15);
}

TEST(Evolve, ConvolveAddsPatterns) {
    ProbMap a{{pack({1, 0}), 0.25}, {pack({0, 1}), 0.75}};
    ProbMap b{{pack({1, 0}), 0.5}, {pack({0, 1}), 0.5}};
    auto full = convolve(a, b, false);
    EXPECT_DOUBLE_EQ(full.at(pack({2, 0})), 0.125);
    EXPECT_DOUBLE_EQ(full.at(pack({1, 1})), 0.5);
    auto cut = convolve(a, b, true);
    EXPECT_FALSE(cut.contains(pack({2, 0})));
}

TEST(Evolve, RejectsBadInputs) {
    auto U = build(UnitarySpec::fourier(3)).U;
    EXPECT_THROW(evolve_modes(U, {0, 3}, false), std::out_of_range);
    EXPECT_THROW(amplitude_all_ones({1, 1}, U), std::invalid_argument);
}
