#pragma once

// Figures of merit of a transform against a Markov-1 correlation model.

#include "kltapprox/error.hpp"
#include "kltapprox/markov_klt.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace kltapprox {

/// Largest tolerated condition number (reciprocal estimate from the LU).
inline constexpr double max_condition_number = 1e12;

/// Dense inverse, residual checked.
inline Matrix invert(const Matrix& k)
{
    if (k.rows() != k.cols()) {
        throw DimensionMismatch("cannot invert a non-square matrix");
    }
    Eigen::PartialPivLU<Matrix> lu(k);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / max_condition_number)) {
        throw SingularTransform("transform is singular or ill-conditioned (rcond "
                                + std::to_string(rcond) + ")");
    }
    Matrix inv = lu.inverse();
    const Matrix id = Matrix::Identity(k.rows(), k.cols());
    const double residual = (k * inv - id).cwiseAbs().maxCoeff();
    if (!(residual < 1e-9)) {
        throw SingularTransform("inverse residual " + std::to_string(residual) + " exceeds 1e-9");
    }
    return inv;
}

/// Which vectors the synthesis-side norms B_k are taken from.
enum class SynthesisNorm {
    transpose, ///< B_k = ||column k of K_hat||^2
    inverse,   ///< B_k = ||row k of K_hat^{-1}||^2
};

/// A_k = h_k R h_k^T for every row h_k.
inline Vector analysis_variances(const Matrix& k_hat, const CorrelationModel& model)
{
    return (k_hat * model.r_matrix * k_hat.transpose()).diagonal();
}

/// Unified coding gain in dB. Identity gives 0.
inline double coding_gain(const Matrix& k_hat, const CorrelationModel& model,
                          SynthesisNorm norm = SynthesisNorm::transpose)
{
    const Eigen::Index n = k_hat.rows();
    if (k_hat.cols() != n || model.n != n) {
        throw DimensionMismatch("transform and correlation model differ in size");
    }
    // singular transforms are rejected on both routes
    const Matrix inv = invert(k_hat);
    const Vector a = analysis_variances(k_hat, model);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double b = norm == SynthesisNorm::transpose ? k_hat.col(k).squaredNorm()
                                                          : inv.row(k).squaredNorm();
        acc += std::log10(a(k) * b);
    }
    return -10.0 * acc / static_cast<double>(n);
}

/// Percentage of |K R K^T| mass on the diagonal.
inline double transform_efficiency(const Matrix& k_hat, const CorrelationModel& model)
{
    if (k_hat.cols() != model.n || k_hat.rows() != model.n) {
        throw DimensionMismatch("transform and correlation model differ in size");
    }
    const Matrix r = k_hat * model.r_matrix * k_hat.transpose();
    return 100.0 * r.diagonal().cwiseAbs().sum() / r.cwiseAbs().sum();
}

inline double mse(const Matrix& k_ref, const Matrix& k_hat, const CorrelationModel& model)
{
    if (k_ref.rows() != k_hat.rows() || k_ref.cols() != k_hat.cols() || k_ref.cols() != model.n) {
        throw DimensionMismatch("mse: operands differ in shape");
    }
    const Matrix d = k_ref - k_hat;
    return (d * model.r_matrix * d.transpose()).trace() / static_cast<double>(k_ref.rows());
}

/// pi * ||K - K_hat||_F^2
inline double total_error_energy(const Matrix& k_ref, const Matrix& k_hat)
{
    if (k_ref.rows() != k_hat.rows() || k_ref.cols() != k_hat.cols()) {
        throw DimensionMismatch("total error energy: operands differ in shape");
    }
    return std::numbers::pi * (k_ref - k_hat).squaredNorm();
}

struct MeritReport {
    double cg_db = 0.0;
    double eta_pct = 0.0;
    double mse = 0.0;
    double epsilon = 0.0;
    double rho_ref = 0.0;
};

/// Cg and eta against `model`, mse and epsilon against `k_ref` under `ref_model`.
inline MeritReport evaluate(const Matrix& k_hat, const CorrelationModel& model, const Matrix& k_ref,
                            const CorrelationModel& ref_model,
                            SynthesisNorm norm = SynthesisNorm::transpose)
{
    MeritReport m;
    m.cg_db = coding_gain(k_hat, model, norm);
    m.eta_pct = transform_efficiency(k_hat, model);
    m.mse = mse(k_ref, k_hat, ref_model);
    m.epsilon = total_error_energy(k_ref, k_hat);
    m.rho_ref = ref_model.rho;
    return m;
}

/// All four merits at one rho, reference = exact KLT at that rho.
inline MeritReport evaluate(const Matrix& k_hat, double rho, SynthesisNorm norm = SynthesisNorm::transpose)
{
    const CorrelationModel model = autocorrelation_matrix(rho, static_cast<int>(k_hat.rows()));
    const Matrix ref = exact_klt_closed_form(model).matrix;
    return evaluate(k_hat, model, ref, model, norm);
}

} // namespace kltapprox
