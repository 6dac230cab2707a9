#pragma once

// Exact KLT of a first-order Markov (AR(1)) source: closed form from the
// roots of the frequency equation, an eigendecomposition oracle, and the
// orthonormal DCT-II used as a dense comparison transform.

#include "kltapprox/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace kltapprox {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct CorrelationModel {
    double rho = 0.0;
    int n = 8;
    Matrix r_matrix; ///< entry (i,j) = rho^|i-j|
};

/// Covariance of a unit-variance Markov-1 source.
inline CorrelationModel autocorrelation_matrix(double rho, int n = 8)
{
    if (!(rho > 0.0 && rho < 1.0)) {
        throw DomainError("rho must lie in the open interval (0,1), got " + std::to_string(rho));
    }
    if (n < 2) {
        throw DomainError("block length must be at least 2, got " + std::to_string(n));
    }
    CorrelationModel model{rho, n, Matrix(n, n)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            model.r_matrix(i, j) = std::pow(rho, std::abs(i - j));
        }
    }
    return model;
}

struct FrequencySet {
    std::vector<double> omegas;  ///< strictly increasing in (0, pi)
    std::vector<double> lambdas; ///< eigenvalue belonging to each omega
    double max_residual = 0.0;
};

/// Pole-free form of tan(N w) = -(1-rho^2) sin w / ((1+rho^2) cos w - 2 rho),
/// obtained by clearing both denominators. Same roots in (0, pi).
inline double frequency_equation(double omega, double rho, int n)
{
    const double r2 = rho * rho;
    return std::sin(n * omega) * ((1.0 + r2) * std::cos(omega) - 2.0 * rho)
        + (1.0 - r2) * std::sin(omega) * std::cos(n * omega);
}

inline double eigenvalue_for_frequency(double omega, double rho)
{
    return (1.0 - rho * rho) / (1.0 + rho * rho - 2.0 * rho * std::cos(omega));
}

/// Brackets the n roots on a uniform scan of (0, pi) with 10n subintervals and
/// refines each by bisection until the bracket is two adjacent doubles.
inline FrequencySet solve_frequencies(const CorrelationModel& model)
{
    const int n = model.n;
    const double rho = model.rho;
    const int cells = 10 * n;
    const double h = std::numbers::pi / cells;
    // 0 and pi are trivial roots of the product form; step just inside them.
    const double edge = h * 1e-6;

    auto f = [&](double w) { return frequency_equation(w, rho, n); };

    FrequencySet out;
    std::vector<int> bracketing_cells;
    for (int c = 0; c < cells; ++c) {
        double lo = c == 0 ? edge : c * h;
        double hi = c == cells - 1 ? std::numbers::pi - edge : (c + 1) * h;
        double flo = f(lo);
        const double fhi = f(hi);
        if (flo == 0.0) {
            out.omegas.push_back(lo);
            bracketing_cells.push_back(c);
            continue;
        }
        if ((flo < 0.0) == (fhi < 0.0) || fhi == 0.0) {
            continue;
        }
        bracketing_cells.push_back(c);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            const double fm = f(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.omegas.push_back(0.5 * (lo + hi));
    }

    if (static_cast<int>(out.omegas.size()) != n) {
        std::ostringstream msg;
        msg << "frequency equation for rho=" << rho << ", n=" << n << ": expected " << n
            << " roots in (0,pi), bracketed " << out.omegas.size() << " in cells {";
        for (std::size_t i = 0; i < bracketing_cells.size(); ++i) {
            msg << (i ? "," : "") << bracketing_cells[i];
        }
        msg << "} of " << cells;
        throw RootFindingError(msg.str());
    }

    for (double w : out.omegas) {
        out.lambdas.push_back(eigenvalue_for_frequency(w, rho));
        out.max_residual = std::max(out.max_residual, std::abs(f(w)));
    }
    return out;
}

enum class TransformSource { closed_form, eigen_oracle, dct_reference };

/// Where the row index and the sample index enter the closed-form sine.
enum class IndexPlacement {
    sample_in_sine, ///< sin(w_i (j - (N-1)/2) + (i+1) pi/2)
    row_in_sine,    ///< sin(w_i (i - (N-1)/2) + (j+1) pi/2)
};

struct ExactTransform {
    Matrix matrix;
    TransformSource source = TransformSource::eigen_oracle;
    std::optional<double> rho;
    std::optional<IndexPlacement> placement; ///< closed form only
};

/// Flips each row so that its first entry with |x| > 1e-9 is positive.
inline void canonicalize_signs(Matrix& m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > 1e-9) {
                if (m(i, j) < 0.0) {
                    m.row(i) *= -1.0;
                }
                break;
            }
        }
    }
}

/// Largest |a_ij - s_i b_ij| with the best per-row sign s_i.
inline double max_row_deviation_up_to_sign(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("matrices differ in shape");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double same = (a.row(i) - b.row(i)).cwiseAbs().maxCoeff();
        const double flipped = (a.row(i) + b.row(i)).cwiseAbs().maxCoeff();
        worst = std::max(worst, std::min(same, flipped));
    }
    return worst;
}

/// Rows built from the closed form with the given index placement, ordered by
/// descending eigenvalue and sign-canonicalised.
inline Matrix closed_form_matrix(const FrequencySet& freqs, IndexPlacement placement)
{
    const int n = static_cast<int>(freqs.omegas.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return freqs.lambdas[a] > freqs.lambdas[b]; });

    const double centre = (n - 1) / 2.0;
    Matrix k(n, n);
    for (int row = 0; row < n; ++row) {
        const int i = order[row];
        const double w = freqs.omegas[i];
        const double scale = std::sqrt(2.0 / (n + freqs.lambdas[i]));
        for (int j = 0; j < n; ++j) {
            const double arg = placement == IndexPlacement::sample_in_sine
                ? w * (j - centre) + (i + 1) * std::numbers::pi / 2.0
                : w * (i - centre) + (j + 1) * std::numbers::pi / 2.0;
            k(row, j) = scale * std::sin(arg);
        }
    }
    canonicalize_signs(k);
    return k;
}

/// Rows are eigenvectors of R_x in descending eigenvalue order.
inline ExactTransform exact_klt_eigen(const CorrelationModel& model)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(model.r_matrix);
    if (solver.info() != Eigen::Success) {
        throw Error("symmetric eigendecomposition failed");
    }
    const int n = model.n;
    Matrix k(n, n);
    // Eigen returns ascending eigenvalues.
    for (int row = 0; row < n; ++row) {
        k.row(row) = solver.eigenvectors().col(n - 1 - row).transpose();
    }
    canonicalize_signs(k);
    return {k, TransformSource::eigen_oracle, model.rho, std::nullopt};
}

/// Eigenvalues of R_x, descending.
inline std::vector<double> eigenvalues_descending(const CorrelationModel& model)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(model.r_matrix, Eigen::EigenvaluesOnly);
    std::vector<double> out(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Closed-form KLT. Both index placements are built and the one agreeing with
/// the eigen oracle (up to row signs, 1e-6) is kept.
inline ExactTransform exact_klt_closed_form(const CorrelationModel& model)
{
    const FrequencySet freqs = solve_frequencies(model);
    const Matrix oracle = exact_klt_eigen(model).matrix;
    for (IndexPlacement p : {IndexPlacement::row_in_sine, IndexPlacement::sample_in_sine}) {
        Matrix k = closed_form_matrix(freqs, p);
        if (max_row_deviation_up_to_sign(k, oracle) < 1e-6) {
            return {std::move(k), TransformSource::closed_form, model.rho, p};
        }
    }
    throw Error("closed-form KLT disagrees with the eigen oracle under both index placements");
}

/// Orthonormal DCT-II.
inline ExactTransform dct_reference(int n = 8)
{
    if (n < 2) {
        throw DomainError("block length must be at least 2");
    }
    Matrix c(n, n);
    for (int k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int j = 0; j < n; ++j) {
            c(k, j) = scale * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n));
        }
    }
    return {c, TransformSource::dct_reference, std::nullopt, std::nullopt};
}

} // namespace kltapprox
