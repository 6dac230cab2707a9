#include "kltapprox/markov_klt.hpp"
#include "kltapprox/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace kltapprox;

namespace {

const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

double max_off_diagonal(const Matrix& m)
{
    double w = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) {
                w = std::max(w, std::abs(m(i, j)));
            }
        }
    }
    return w;
}

} // namespace

TEST(Autocorrelation, TwoByTwo)
{
    const auto m = autocorrelation_matrix(0.5, 2);
    EXPECT_DOUBLE_EQ(m.r_matrix(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.r_matrix(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(m.r_matrix(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(m.r_matrix(1, 1), 1.0);
}

TEST(Autocorrelation, CornerEntry)
{
    const auto m = autocorrelation_matrix(0.8, 8);
    EXPECT_NEAR(m.r_matrix(0, 7), 0.2097152, 1e-12);
}

TEST(Autocorrelation, RejectsBadArguments)
{
    EXPECT_THROW(autocorrelation_matrix(0.0, 8), DomainError);
    EXPECT_THROW(autocorrelation_matrix(1.0, 8), DomainError);
    EXPECT_THROW(autocorrelation_matrix(-0.3, 8), DomainError);
    EXPECT_THROW(autocorrelation_matrix(1.2, 8), DomainError);
    EXPECT_THROW(autocorrelation_matrix(0.5, 1), DomainError);
}

TEST(Autocorrelation, SymmetricToeplitzPositiveDefinite)
{
    for (double rho : grid) {
        const auto m = autocorrelation_matrix(rho, 8);
        EXPECT_TRUE(m.r_matrix.isApprox(m.r_matrix.transpose()));
        for (int i = 0; i + 1 < 8; ++i) {
            for (int j = 0; j + 1 < 8; ++j) {
                EXPECT_DOUBLE_EQ(m.r_matrix(i, j), m.r_matrix(i + 1, j + 1));
            }
        }
        Eigen::LLT<Matrix> llt(m.r_matrix);
        EXPECT_EQ(llt.info(), Eigen::Success) << rho;
    }
}

TEST(Frequencies, LambdasMatchEigenvaluesAt08)
{
    const auto m = autocorrelation_matrix(0.8, 8);
    const auto f = solve_frequencies(m);
    std::vector<double> lam = f.lambdas;
    std::sort(lam.begin(), lam.end(), std::greater<>());
    const auto eig = eigenvalues_descending(m);
    ASSERT_EQ(lam.size(), eig.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        EXPECT_NEAR(lam[i], eig[i], 1e-8);
    }
}

TEST(Frequencies, TraceConservation)
{
    const auto f = solve_frequencies(autocorrelation_matrix(0.5, 8));
    EXPECT_NEAR(std::accumulate(f.lambdas.begin(), f.lambdas.end(), 0.0), 8.0, 1e-8);
}

TEST(Frequencies, StrictlyIncreasingInsideOpenInterval)
{
    const auto f = solve_frequencies(autocorrelation_matrix(0.9, 8));
    ASSERT_EQ(f.omegas.size(), 8u);
    EXPECT_GT(f.omegas.front(), 0.0);
    EXPECT_LT(f.omegas.back(), std::numbers::pi);
    for (std::size_t i = 1; i < f.omegas.size(); ++i) {
        EXPECT_LT(f.omegas[i - 1], f.omegas[i]);
    }
}

TEST(Frequencies, ResidualSmallOnWholeGrid)
{
    for (double rho : grid) {
        const auto f = solve_frequencies(autocorrelation_matrix(rho, 8));
        EXPECT_LT(f.max_residual, 1e-10) << rho;
        // the tangent form holds as well wherever it is finite
        for (double w : f.omegas) {
            const double den = (1 + rho * rho) * std::cos(w) - 2 * rho;
            if (std::abs(den) > 1e-3 && std::abs(std::cos(8 * w)) > 1e-3) {
                const double rhs = -(1 - rho * rho) * std::sin(w) / den;
                EXPECT_NEAR(std::tan(8 * w), rhs, 1e-8 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST(Frequencies, OtherBlockLengths)
{
    for (int n : {2, 4, 16}) {
        const auto m = autocorrelation_matrix(0.7, n);
        const auto f = solve_frequencies(m);
        EXPECT_EQ(static_cast<int>(f.omegas.size()), n);
        std::vector<double> lam = f.lambdas;
        std::sort(lam.begin(), lam.end(), std::greater<>());
        const auto eig = eigenvalues_descending(m);
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(lam[i], eig[i], 1e-8) << n;
        }
    }
}

TEST(ClosedForm, OrthonormalRows)
{
    for (double rho : {0.05, 0.2, 0.5, 0.8, 0.95, 0.99}) {
        const auto k = exact_klt_closed_form(autocorrelation_matrix(rho, 8));
        EXPECT_LT((k.matrix * k.matrix.transpose() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10) << rho;
    }
}

TEST(ClosedForm, AgreesWithEigenOracleAt08)
{
    const auto m = autocorrelation_matrix(0.8, 8);
    const auto c = exact_klt_closed_form(m);
    const auto e = exact_klt_eigen(m);
    EXPECT_LT(max_row_deviation_up_to_sign(c.matrix, e.matrix), 1e-6);
    // same sign convention, so no flip is needed either
    EXPECT_LT((c.matrix - e.matrix).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ClosedForm, ConventionalPlacementIsTheOneKept)
{
    for (double rho : grid) {
        const auto m = autocorrelation_matrix(rho, 8);
        const auto c = exact_klt_closed_form(m);
        ASSERT_TRUE(c.placement.has_value());
        EXPECT_EQ(*c.placement, IndexPlacement::sample_in_sine);
        const auto f = solve_frequencies(m);
        const Matrix swapped = closed_form_matrix(f, IndexPlacement::row_in_sine);
        EXPECT_GT(max_row_deviation_up_to_sign(swapped, exact_klt_eigen(m).matrix), 1e-2) << rho;
    }
}

TEST(ClosedForm, DiagonalisesCovarianceAt02)
{
    const auto m = autocorrelation_matrix(0.2, 8);
    const auto k = exact_klt_closed_form(m);
    EXPECT_LT(max_off_diagonal(k.matrix * m.r_matrix * k.matrix.transpose()), 1e-8);
}

TEST(ClosedForm, DescendingVarianceAndSignConvention)
{
    for (double rho : grid) {
        const auto m = autocorrelation_matrix(rho, 8);
        const auto k = exact_klt_closed_form(m);
        const Vector d = (k.matrix * m.r_matrix * k.matrix.transpose()).diagonal();
        for (int i = 1; i < 8; ++i) {
            EXPECT_GE(d(i - 1), d(i) - 1e-12);
        }
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                if (std::abs(k.matrix(i, j)) > 1e-9) {
                    EXPECT_GT(k.matrix(i, j), 0.0);
                    break;
                }
            }
        }
    }
}

TEST(EigenOracle, EigenvaluesDescendingPositive)
{
    const auto eig = eigenvalues_descending(autocorrelation_matrix(0.8, 8));
    for (std::size_t i = 0; i < eig.size(); ++i) {
        EXPECT_GT(eig[i], 0.0);
        if (i > 0) {
            EXPECT_GE(eig[i - 1], eig[i]);
        }
    }
}

TEST(EigenOracle, DeterminantIdentity)
{
    const double rho = 0.5;
    const auto eig = eigenvalues_descending(autocorrelation_matrix(rho, 8));
    const double prod = std::accumulate(eig.begin(), eig.end(), 1.0, std::multiplies<>());
    EXPECT_NEAR(prod, std::pow(1 - rho * rho, 7), 1e-12);
}

TEST(EigenOracle, CodingGainUnchangedByRowPermutation)
{
    // n = 4, every permutation of the rows
    const auto m = autocorrelation_matrix(0.95, 4);
    const Matrix k = exact_klt_eigen(m).matrix;
    const double base = coding_gain(k, m);
    std::array<int, 4> p{0, 1, 2, 3};
    int count = 0;
    do {
        Matrix q(4, 4);
        for (int i = 0; i < 4; ++i) {
            q.row(i) = k.row(p[i]);
        }
        EXPECT_GE(base, coding_gain(q, m) - 1e-12);
        EXPECT_NEAR(base, coding_gain(q, m), 1e-12);
        ++count;
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(count, 24);
}

TEST(CrossValidation, WholeGrid)
{
    for (double rho : grid) {
        const auto m = autocorrelation_matrix(rho, 8);
        const auto c = exact_klt_closed_form(m);
        const auto e = exact_klt_eigen(m);
        EXPECT_LT(max_row_deviation_up_to_sign(c.matrix, e.matrix), 1e-6) << rho;
        EXPECT_LT((e.matrix * e.matrix.transpose() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Dct, DcRowAndOrthogonality)
{
    const auto d = dct_reference(8);
    for (int j = 0; j < 8; ++j) {
        EXPECT_NEAR(d.matrix(0, j), 1.0 / std::sqrt(8.0), 1e-12);
    }
    EXPECT_NEAR(d.matrix(0, 0), 0.353553, 1e-6);
    EXPECT_LT((d.matrix * d.matrix.transpose() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_FALSE(d.rho.has_value());
}

TEST(Dct, CodingGainCloseToKltAt095)
{
    const auto m = autocorrelation_matrix(0.95, 8);
    const double cg_dct = coding_gain(dct_reference(8).matrix, m);
    const double cg_klt = coding_gain(exact_klt_closed_form(m).matrix, m);
    EXPECT_LE(cg_dct, cg_klt + 1e-12);
    EXPECT_LT(cg_klt - cg_dct, 0.05);
}

TEST(Dct, RejectsTinyBlocks) { EXPECT_THROW(dct_reference(1), DomainError); }
