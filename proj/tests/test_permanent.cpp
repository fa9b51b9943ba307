#include <gtest/gtest.h>

#include <random>

#include <phodist/permanent.hpp>
#include <phodist/unitary.hpp>

using namespace phodist;

TEST(Permanent, MatchesNaiveOnRandomMatrices) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 7; ++n)
        for (int t = 0; t < 5; ++t) {
            Eigen::MatrixXcd A(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
            cplx a = permanent(A), b = permanent_naive(A);
            EXPECT_LT(std::abs(a - b), 1e-9 * (1 + std::abs(b))) << n;
        }
}

TEST(Permanent, KnownValues) {
    for (int n = 1; n <= 8; ++n) {
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Ones(n, n);
        EXPECT_NEAR(permanent(J).real(), std::tgamma(n + 1), 1e-6);
    }
    EXPECT_EQ(permanent(Eigen::MatrixXcd(0, 0)), cplx(1));
    // six terms: three equal w and three equal w^2, so 3(w + w^2) = -3
    Eigen::MatrixXcd F = build(UnitarySpec::fourier(3)).U * std::sqrt(3.0);
    EXPECT_LT(std::abs(permanent(F) - cplx(-3)), 1e-12);
    Eigen::MatrixXd R(2, 2);
    R << 1, 2, 3, 4;
    EXPECT_DOUBLE_EQ(permanent(R), 10.0);
}

TEST(Permanent, RejectsNonSquare) {
    EXPECT_THROW(permanent(Eigen::MatrixXcd(2, 3)), std::invalid_argument);
}
