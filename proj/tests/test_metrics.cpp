#include "kltapprox/approx.hpp"
#include "kltapprox/fast_transforms.hpp"
#include "kltapprox/markov_klt.hpp"
#include "kltapprox/metrics.hpp"

#include "reference_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kltapprox;
using kltapprox::testing::printed_tolerance;

namespace {

Matrix k_hat(TransformId id) { return normalize(named_transform(id).t).k_hat; }

Matrix klt(double rho) { return exact_klt_closed_form(autocorrelation_matrix(rho, 8)).matrix; }

} // namespace

TEST(CodingGain, IdentityIsZero)
{
    for (double rho : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(coding_gain(Matrix::Identity(8, 8), autocorrelation_matrix(rho, 8)), 0.0, 1e-12);
    }
}

TEST(CodingGain, PrintedValues)
{
    EXPECT_NEAR(coding_gain(k_hat(TransformId::T16), autocorrelation_matrix(0.8, 8)), 3.8484, printed_tolerance);
    EXPECT_NEAR(coding_gain(klt(0.2), autocorrelation_matrix(0.2, 8)), 0.1551, printed_tolerance);
    EXPECT_NEAR(coding_gain(klt(0.8), autocorrelation_matrix(0.8, 8)), 3.8824, printed_tolerance);
}

TEST(CodingGain, SynthesisNormRoutesAgreeForOrthogonal)
{
    const auto m = autocorrelation_matrix(0.6, 8);
    for (const Matrix& k : {klt(0.6), k_hat(TransformId::T1), dct_reference(8).matrix}) {
        EXPECT_NEAR(coding_gain(k, m, SynthesisNorm::transpose), coding_gain(k, m, SynthesisNorm::inverse), 1e-10);
    }
}

TEST(CodingGain, InverseRouteDiffersForNonOrthogonal)
{
    const auto m = autocorrelation_matrix(0.8, 8);
    const double lit = coding_gain(k_hat(TransformId::T16), m, SynthesisNorm::inverse);
    EXPECT_NEAR(lit, 3.7243, 1e-3);
    EXPECT_GT(std::abs(lit - 3.8484), 0.1);
}

TEST(CodingGain, RowPermutationInvariant)
{
    const auto m = autocorrelation_matrix(0.9, 8);
    const Matrix k = k_hat(TransformId::T13);
    std::vector<int> p{0, 1, 2, 3, 4, 5, 6, 7};
    std::mt19937 gen(3);
    for (int n = 0; n < 50; ++n) {
        std::shuffle(p.begin(), p.end(), gen);
        Matrix q(8, 8);
        for (int i = 0; i < 8; ++i) {
            q.row(i) = k.row(p[i]);
        }
        EXPECT_NEAR(coding_gain(q, m), coding_gain(k, m), 1e-10);
        EXPECT_NEAR(coding_gain(q, m, SynthesisNorm::inverse), coding_gain(k, m, SynthesisNorm::inverse), 1e-10);
    }
}

TEST(CodingGain, SingularRejected)
{
    Matrix k = Matrix::Identity(8, 8);
    k.row(5) = k.row(4);
    EXPECT_THROW(coding_gain(k, autocorrelation_matrix(0.5, 8)), SingularTransform);
}

TEST(Efficiency, ExactKltIsHundred)
{
    for (double rho : {0.1, 0.2, 0.5, 0.8, 0.95}) {
        EXPECT_NEAR(transform_efficiency(klt(rho), autocorrelation_matrix(rho, 8)), 100.0, 1e-6) << rho;
    }
}

TEST(Efficiency, OrthogonalT1At01)
{
    EXPECT_NEAR(transform_efficiency(k_hat(TransformId::T1), autocorrelation_matrix(0.1, 8)), 93.4298, printed_tolerance);
}

TEST(Efficiency, IdentityMatchesDirectSum)
{
    const double rho = 0.9;
    double diag = 0.0;
    double all = 0.0;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const double v = std::pow(rho, std::abs(i - j));
            all += v;
            diag += i == j ? v : 0.0;
        }
    }
    EXPECT_NEAR(transform_efficiency(Matrix::Identity(8, 8), autocorrelation_matrix(rho, 8)), 100.0 * diag / all, 1e-12);
}

TEST(Efficiency, NeverAboveHundred)
{
    std::mt19937_64 gen(11);
    std::normal_distribution<double> d;
    const auto m = autocorrelation_matrix(0.7, 8);
    for (int n = 0; n < 100; ++n) {
        Matrix k(8, 8);
        for (int i = 0; i < 64; ++i) {
            k(i / 8, i % 8) = d(gen);
        }
        EXPECT_LE(transform_efficiency(k, m), 100.0 + 1e-12);
    }
}

TEST(Mse, ZeroForIdenticalArguments)
{
    const auto m = autocorrelation_matrix(0.4, 8);
    EXPECT_EQ(mse(klt(0.4), klt(0.4), m), 0.0);
}

TEST(Mse, PrintedValues)
{
    EXPECT_NEAR(mse(klt(0.1), k_hat(TransformId::T1), autocorrelation_matrix(0.1, 8)), 0.0608, printed_tolerance);
    EXPECT_NEAR(mse(klt(0.8), k_hat(TransformId::T16), autocorrelation_matrix(0.8, 8)), 0.0043, printed_tolerance);
}

TEST(Mse, DimensionMismatch)
{
    EXPECT_THROW(mse(Matrix::Identity(4, 4), Matrix::Identity(8, 8), autocorrelation_matrix(0.4, 8)), DimensionMismatch);
}

TEST(TotalErrorEnergy, Examples)
{
    const Matrix k = klt(0.3);
    EXPECT_EQ(total_error_energy(k, k), 0.0);
    Matrix p = k;
    p(2, 6) += 1.0;
    EXPECT_NEAR(total_error_energy(k, p), std::numbers::pi, 1e-12);
    EXPECT_NEAR(total_error_energy(klt(0.1), k_hat(TransformId::T1)), 1.5331, printed_tolerance);
    EXPECT_THROW(total_error_energy(Matrix::Identity(4, 4), k), DimensionMismatch);
}

TEST(Invert, OrthogonalGivesTranspose)
{
    const Matrix k = k_hat(TransformId::T1);
    EXPECT_LT((invert(k) - k.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix e = klt(0.7);
    EXPECT_LT((invert(e) - e.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Invert, Diagonal)
{
    const Matrix d = 2.0 * Matrix::Identity(8, 8);
    EXPECT_LT((invert(d) - 0.5 * Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Invert, NonOrthogonalResidual)
{
    const Matrix k = k_hat(TransformId::T13);
    EXPECT_LT((k * invert(k) - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Invert, Singular)
{
    Matrix k = Matrix::Identity(8, 8);
    k(7, 7) = 0.0;
    EXPECT_THROW(invert(k), SingularTransform);
    Matrix near = Matrix::Identity(8, 8);
    near(7, 7) = 1e-14;
    EXPECT_THROW(invert(near), SingularTransform);
}

TEST(MeritReport, ZeroDistanceOnlyForTheReference)
{
    const MeritReport same = evaluate(klt(0.8), 0.8);
    EXPECT_EQ(same.mse, 0.0);
    EXPECT_EQ(same.epsilon, 0.0);
    EXPECT_NEAR(same.eta_pct, 100.0, 1e-9);
    const MeritReport other = evaluate(k_hat(TransformId::T16), 0.8);
    EXPECT_GT(other.mse, 0.0);
    EXPECT_GT(other.epsilon, 0.0);
}

// Cg, epsilon and MSE of every printed row, from the recipe matrix.
TEST(ReferenceRows, CgEpsilonMse)
{
    for (const auto& row : kltapprox::testing::reference_rows()) {
        const auto model = autocorrelation_matrix(row.rho, 8);
        const ExactTransform k = exact_klt_closed_form(model);
        const auto t = apply_int_function(row.func, row.alpha, k);
        if (row.published) {
            EXPECT_TRUE((t.entries.array() == named_transform(*row.published).t.entries.array()).all()) << row.name;
        }
        const MeritReport m = evaluate(normalize(t).k_hat, row.rho);
        EXPECT_NEAR(m.cg_db, row.cg, printed_tolerance) << row.name;
        EXPECT_NEAR(m.epsilon, row.epsilon, printed_tolerance) << row.name;
        EXPECT_NEAR(m.mse, row.mse, printed_tolerance) << row.name;
    }
}

TEST(ReferenceRows, T18CodingGainMatchesAtGridRho)
{
    const Matrix k = k_hat(TransformId::T18);
    EXPECT_NEAR(coding_gain(k, autocorrelation_matrix(0.9, 8)), 6.2462, printed_tolerance);
    EXPECT_GT(std::abs(coding_gain(k, autocorrelation_matrix(0.95, 8)) - 6.2462), 1.0);
}
