#pragma once

// Integer quantisation of a scaled transform and row normalisation.

#include "kltapprox/error.hpp"
#include "kltapprox/markov_klt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace kltapprox {

using IntMatrix = Eigen::MatrixXi;

enum class IntFunction {
    floor,
    ceil,
    trunc,     ///< sign(x) * floor(|x|)
    round_afz, ///< sign(x) * ceil(|x|)
    round,     ///< nearest integer, halves away from zero
};

inline constexpr std::array<IntFunction, 5> all_int_functions{
    IntFunction::floor, IntFunction::ceil, IntFunction::trunc, IntFunction::round_afz,
    IntFunction::round};

/// The four functions scanned by default.
inline constexpr std::array<IntFunction, 4> default_search_functions{
    IntFunction::floor, IntFunction::ceil, IntFunction::trunc, IntFunction::round};

inline std::string_view to_string(IntFunction f)
{
    switch (f) {
    case IntFunction::floor: return "floor";
    case IntFunction::ceil: return "ceil";
    case IntFunction::trunc: return "trunc";
    case IntFunction::round_afz: return "round_afz";
    case IntFunction::round: return "round";
    }
    return "?";
}

inline IntFunction parse_int_function(std::string_view s)
{
    for (IntFunction f : all_int_functions) {
        if (to_string(f) == s) {
            return f;
        }
    }
    throw DomainError("unknown integer function '" + std::string(s) + "'");
}

inline double sign_of(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

inline double int_value(IntFunction f, double x)
{
    switch (f) {
    case IntFunction::floor: return std::floor(x);
    case IntFunction::ceil: return std::ceil(x);
    case IntFunction::trunc: return sign_of(x) * std::floor(std::abs(x));
    case IntFunction::round_afz: return sign_of(x) * std::ceil(std::abs(x));
    case IntFunction::round: return std::round(x);
    }
    return x;
}

struct Provenance {
    IntFunction func;
    double alpha;
    double rho;
};

struct LowComplexityMatrix {
    IntMatrix entries;
    std::optional<Provenance> provenance;
};

/// Alphabet {0, +-1, +-2, +-3}, no all-zero rows. Throws on violation.
inline void check_alphabet(const IntMatrix& t)
{
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        bool any = false;
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            const int v = t(i, j);
            if (v < -3 || v > 3) {
                throw OutOfAlphabet("entry (" + std::to_string(i) + "," + std::to_string(j)
                                    + ") = " + std::to_string(v) + " is outside {0,+-1,+-2,+-3}");
            }
            any = any || v != 0;
        }
        if (!any) {
            throw AllZeroRow("row " + std::to_string(i) + " is all zero");
        }
    }
}

/// Entrywise int(alpha * x) without the alphabet check.
inline IntMatrix quantize(IntFunction f, double alpha, const Matrix& k)
{
    IntMatrix t(k.rows(), k.cols());
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double v = int_value(f, alpha * k(i, j));
            // anything this large is rejected by the alphabet check anyway
            t(i, j) = static_cast<int>(std::clamp(v, -1e6, 1e6));
        }
    }
    return t;
}

inline LowComplexityMatrix apply_int_function(IntFunction f, double alpha, const ExactTransform& k)
{
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    IntMatrix t = quantize(f, alpha, k.matrix);
    check_alphabet(t);
    return {std::move(t), Provenance{f, alpha, k.rho.value_or(0.0)}};
}

/// max |k_ij|
inline double gamma(const ExactTransform& k)
{
    const double g = k.matrix.cwiseAbs().maxCoeff();
    if (!(g > 0.0)) {
        throw DomainError("gamma of a zero matrix is undefined");
    }
    return g;
}

/// Open interval of useful expansion factors for the given function.
inline std::pair<double, double> alpha_range(IntFunction f, double gamma_value)
{
    if (!(gamma_value > 0.0)) {
        throw DomainError("gamma must be positive");
    }
    switch (f) {
    case IntFunction::floor:
    case IntFunction::trunc: return {1.0 / gamma_value, 4.0 / gamma_value};
    case IntFunction::ceil:
    case IntFunction::round_afz:
    case IntFunction::round: return {0.0, 3.0 / gamma_value};
    }
    return {0.0, 0.0};
}

/// Multiples of step strictly inside (lo, hi), returned as integer multipliers.
inline std::pair<long, long> alpha_grid(std::pair<double, double> range, double step)
{
    if (!(step > 0.0)) {
        throw DomainError("alpha step must be positive");
    }
    const long first = static_cast<long>(std::floor(range.first / step + 1e-9)) + 1;
    long last = static_cast<long>(std::ceil(range.second / step - 1e-9)) - 1;
    return {first, last};
}

struct ApproximateTransform {
    LowComplexityMatrix t;
    Vector s_diag;
    Matrix k_hat;
    bool orthogonal = false;
};

/// T * T^T has no nonzero off-diagonal entry (exact, integers).
inline bool rows_orthogonal(const IntMatrix& t)
{
    const IntMatrix g = t * t.transpose();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            if (i != j && g(i, j) != 0) {
                return false;
            }
        }
    }
    return true;
}

/// K_hat = diag(1/||t_i||) * T. Always the diagonal form; for orthogonal T it
/// is the same as (T T^T)^{-1/2} T.
inline ApproximateTransform normalize(const LowComplexityMatrix& t)
{
    const Eigen::Index n = t.entries.rows();
    ApproximateTransform out{t, Vector(n), Matrix(n, t.entries.cols()), rows_orthogonal(t.entries)};
    const Matrix td = t.entries.cast<double>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sq = td.row(i).squaredNorm();
        if (sq == 0.0) {
            throw AllZeroRow("row " + std::to_string(i) + " is all zero");
        }
        out.s_diag(i) = 1.0 / std::sqrt(sq);
        out.k_hat.row(i) = out.s_diag(i) * td.row(i);
    }
    return out;
}

inline ApproximateTransform normalize(const IntMatrix& t) { return normalize(LowComplexityMatrix{t, std::nullopt}); }

} // namespace kltapprox
