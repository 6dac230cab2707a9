#pragma once

// The six published low-complexity transforms, their butterfly
// factorisations T = P * M * [A2] * A1, and multiplierless integer execution.

#include "kltapprox/approx.hpp"
#include "kltapprox/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kltapprox {

enum class TransformId { T1, T3, T13, T16, T17, T18 };

inline constexpr std::array<TransformId, 6> all_transform_ids{
    TransformId::T1, TransformId::T3, TransformId::T13,
    TransformId::T16, TransformId::T17, TransformId::T18};

enum class Group { C1, C2 };

inline std::string_view to_string(TransformId id)
{
    switch (id) {
    case TransformId::T1: return "T1";
    case TransformId::T3: return "T3";
    case TransformId::T13: return "T13";
    case TransformId::T16: return "T16";
    case TransformId::T17: return "T17";
    case TransformId::T18: return "T18";
    }
    return "?";
}

inline std::optional<TransformId> parse_transform_id(std::string_view s)
{
    for (TransformId id : all_transform_ids) {
        if (to_string(id) == s) {
            return id;
        }
    }
    return std::nullopt;
}

inline Group group_of(TransformId id)
{
    switch (id) {
    case TransformId::T1:
    case TransformId::T3:
    case TransformId::T13: return Group::C1;
    default: return Group::C2;
    }
}

namespace detail {

using Rows8 = std::array<std::array<int, 8>, 8>;

inline IntMatrix from_rows(const Rows8& rows)
{
    IntMatrix m(8, 8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

inline const Rows8& table_rows(TransformId id)
{
    static const Rows8 t1{{{0, 1, 1, 1, 1, 1, 1, 0},
                           {1, 1, 1, 0, 0, -1, -1, -1},
                           {1, 1, 0, -1, -1, 0, 1, 1},
                           {1, 0, -1, -1, 1, 1, 0, -1},
                           {1, 0, -1, 1, 1, -1, 0, 1},
                           {1, -1, 0, 1, -1, 0, 1, -1},
                           {1, -1, 1, 0, 0, 1, -1, 1},
                           {0, -1, 1, -1, 1, -1, 1, 0}}};
    static const Rows8 t3{{{1, 2, 3, 3, 3, 3, 2, 1},
                           {2, 3, 3, 1, -1, -3, -3, -2},
                           {3, 3, 0, -3, -3, 0, 3, 3},
                           {3, 1, -3, -2, 2, 3, -1, -3},
                           {3, -1, -3, 2, 2, -3, -1, 3},
                           {3, -3, 0, 3, -3, 0, 3, -3},
                           {2, -3, 3, -1, -1, 3, -3, 2},
                           {1, -2, 3, -3, 3, -3, 2, -1}}};
    static const Rows8 t13{{{1, 1, 1, 2, 2, 1, 1, 1},
                            {2, 2, 1, 0, 0, -1, -2, -2},
                            {2, 1, 0, -2, -2, 0, 1, 2},
                            {2, 0, -2, -1, 1, 2, 0, -2},
                            {1, -1, -1, 1, 1, -1, -1, 1},
                            {1, -2, 0, 2, -2, 0, 2, -1},
                            {1, -2, 2, -1, -1, 2, -2, 1},
                            {0, -1, 2, -2, 2, -2, 1, 0}}};
    static const Rows8 t16{{{2, 2, 2, 2, 2, 2, 2, 2},
                            {3, 3, 2, 1, -1, -2, -3, -3},
                            {3, 2, -1, -3, -3, -1, 2, 3},
                            {3, 0, -3, -2, 2, 3, 0, -3},
                            {2, -2, -2, 2, 2, -2, -2, 2},
                            {2, -3, 1, 2, -2, -1, 3, -2},
                            {1, -3, 3, -1, -1, 3, -3, 1},
                            {1, -2, 3, -3, 3, -3, 2, -1}}};
    static const Rows8 t17{{{2, 2, 2, 2, 2, 2, 2, 2},
                            {3, 3, 2, 1, -1, -2, -3, -3},
                            {3, 2, -1, -3, -3, -1, 2, 3},
                            {3, 0, -3, -2, 2, 3, 0, -3},
                            {2, -2, -2, 2, 2, -2, -2, 2},
                            {2, -3, 1, 3, -3, -1, 3, -2},
                            {1, -3, 3, -1, -1, 3, -3, 1},
                            {1, -2, 3, -3, 3, -3, 2, -1}}};
    static const Rows8 t18{{{1, 1, 1, 2, 2, 1, 1, 1},
                            {2, 2, 1, 0, 0, -1, -2, -2},
                            {2, 1, -1, -2, -2, -1, 1, 2},
                            {2, 0, -2, -1, 1, 2, 0, -2},
                            {1, -1, -1, 1, 1, -1, -1, 1},
                            {1, -2, 0, 2, -2, 0, 2, -1},
                            {1, -2, 2, -1, -1, 2, -2, 1},
                            {0, -1, 2, -2, 2, -2, 1, 0}}};
    switch (id) {
    case TransformId::T1: return t1;
    case TransformId::T3: return t3;
    case TransformId::T13: return t13;
    case TransformId::T16: return t16;
    case TransformId::T17: return t17;
    case TransformId::T18: return t18;
    }
    return t1;
}

using Constants = std::array<int, 16>;

// kernel constants m0..m15, row-major 4x4, upper block then lower block
struct KernelConstants {
    Constants m1;
    Constants m2;
};

inline const KernelConstants& kernel_constants(TransformId id)
{
    static const KernelConstants k1{{0, 1, 1, 1, 1, 1, 0, -1, 1, 0, -1, 1, 1, -1, 1, 0},
                                    {0, 1, 1, 1, -1, -1, 0, 1, 1, 0, -1, 1, -1, 1, -1, 0}};
    static const KernelConstants k3{{1, 2, 3, 3, 3, 3, 0, -3, 3, -1, -3, 2, 2, -3, 3, -1},
                                    {1, 3, 3, 2, -2, -3, 1, 3, 3, 0, -3, 3, -3, 3, -2, 1}};
    static const KernelConstants k13{{1, 1, 1, 2, 2, 1, 0, -2, 1, -1, -1, 1, 1, -2, 2, -1},
                                     {0, 1, 2, 2, -1, -2, 0, 2, 2, 0, -2, 1, -2, 2, -1, 0}};
    static const KernelConstants k16{{2, 2, 2, 0, 0, 2, -1, 3, 2, -2, -2, 0, 0, -3, 3, 1},
                                     {1, 2, 3, 3, -2, -3, 0, 3, 2, 1, -3, 2, -3, 3, -2, 1}};
    static const KernelConstants k17{{2, 2, 2, 0, 0, 2, -1, 3, 2, -2, -2, 0, 0, -3, 3, 1},
                                     {1, 2, 3, 3, -2, -3, 0, 3, 3, 1, -3, 2, -3, 3, -2, 1}};
    static const KernelConstants k18{{1, 1, 0, 2, 2, 0, 1, -2, 1, -1, 0, 1, 1, 0, -2, -1},
                                     {0, 1, 2, 2, -1, -2, 0, 2, 2, 0, -2, 1, -2, 2, -1, 0}};
    switch (id) {
    case TransformId::T1: return k1;
    case TransformId::T3: return k3;
    case TransformId::T13: return k13;
    case TransformId::T16: return k16;
    case TransformId::T17: return k17;
    case TransformId::T18: return k18;
    }
    return k1;
}

} // namespace detail

struct NamedTransform {
    TransformId id;
    LowComplexityMatrix t;
    Group group;
};

inline NamedTransform named_transform(TransformId id)
{
    return {id, LowComplexityMatrix{detail::from_rows(detail::table_rows(id)), std::nullopt}, group_of(id)};
}

/// The published transform whose matrix equals t, if any.
inline std::optional<TransformId> published_id(const IntMatrix& t)
{
    for (TransformId id : all_transform_ids) {
        const IntMatrix& ref = named_transform(id).t.entries;
        if (ref.rows() == t.rows() && ref.cols() == t.cols() && (ref.array() == t.array()).all()) {
            return id;
        }
    }
    return std::nullopt;
}

inline std::string published_name(const IntMatrix& t)
{
    const auto id = published_id(t);
    return id ? std::string(to_string(*id)) : std::string();
}

enum class Factor { P, M, A1, A2_prime, A2_doubleprime };

inline std::string_view to_string(Factor f)
{
    switch (f) {
    case Factor::P: return "P";
    case Factor::M: return "M";
    case Factor::A1: return "A1";
    case Factor::A2_prime: return "A2'";
    case Factor::A2_doubleprime: return "A2''";
    }
    return "?";
}

/// Output permutation: row r of P picks entry perm[r].
inline constexpr std::array<int, 8> output_permutation{0, 4, 1, 5, 2, 6, 3, 7};

inline IntMatrix factor_matrix(Factor f, const detail::KernelConstants* k = nullptr)
{
    IntMatrix m = IntMatrix::Zero(8, 8);
    switch (f) {
    case Factor::P:
        for (int r = 0; r < 8; ++r) {
            m(r, output_permutation[r]) = 1;
        }
        break;
    case Factor::A1:
        // sums x_i + x_{7-i} on top, differences x_{3-i} - x_{4+i} below
        for (int i = 0; i < 4; ++i) {
            m(i, i) = 1;
            m(i, 7 - i) = 1;
            m(4 + i, 3 - i) = 1;
            m(4 + i, 4 + i) = -1;
        }
        break;
    case Factor::A2_prime:
        m = IntMatrix::Identity(8, 8);
        m(0, 3) = 1;
        m(3, 0) = 1;
        m(3, 3) = -1;
        break;
    case Factor::A2_doubleprime:
        m = IntMatrix::Identity(8, 8);
        m(1, 2) = 1;
        m(2, 1) = 1;
        m(2, 2) = -1;
        break;
    case Factor::M:
        if (k == nullptr) {
            throw Error("kernel factor needs its constants");
        }
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                m(r, c) = k->m1[4 * r + c];
                m(4 + r, 4 + c) = k->m2[4 * r + c];
            }
        }
        break;
    }
    return m;
}

struct Mismatch {
    int row;
    int col;
    int expected;
    int actual;
};

struct FastPlan {
    TransformId id;
    std::vector<Factor> factors; ///< leftmost factor first
    std::array<int, 16> m1_constants;
    std::array<int, 16> m2_constants;
    int add_count = 0;
    int shift_count = 0;
    int bit_growth = 0;

    /// Product of the factor matrices.
    IntMatrix product() const
    {
        const detail::KernelConstants k{m1_constants, m2_constants};
        IntMatrix acc = IntMatrix::Identity(8, 8);
        for (Factor f : factors) {
            acc = acc * factor_matrix(f, &k);
        }
        return acc;
    }
};

/// First entry where `actual` differs from `expected`, row-major.
inline std::optional<Mismatch> first_mismatch(const IntMatrix& expected, const IntMatrix& actual)
{
    if (expected.rows() != actual.rows() || expected.cols() != actual.cols()) {
        throw DimensionMismatch("matrices differ in shape");
    }
    for (int i = 0; i < expected.rows(); ++i) {
        for (int j = 0; j < expected.cols(); ++j) {
            if (expected(i, j) != actual(i, j)) {
                return Mismatch{i, j, expected(i, j), actual(i, j)};
            }
        }
    }
    return std::nullopt;
}

/// Adds and shifts of the flow graph. Kernel rows are counted separately,
/// without sharing subexpressions.
struct OpCount {
    int adds = 0;
    int shifts = 0;
    bool operator==(const OpCount&) const = default;
};

inline OpCount count_plan_ops(const std::vector<Factor>& factors, const detail::KernelConstants& k)
{
    OpCount c;
    for (Factor f : factors) {
        if (f == Factor::A1) {
            c.adds += 8;
        } else if (f == Factor::A2_prime || f == Factor::A2_doubleprime) {
            c.adds += 2;
        }
    }
    for (const auto* block : {&k.m1, &k.m2}) {
        for (int r = 0; r < 4; ++r) {
            int nonzero = 0;
            for (int col = 0; col < 4; ++col) {
                const int v = std::abs((*block)[4 * r + col]);
                nonzero += v != 0;
                if (v == 2) {
                    c.shifts += 1;
                } else if (v == 3) {
                    c.shifts += 1;
                    c.adds += 1;
                }
            }
            c.adds += std::max(0, nonzero - 1);
        }
    }
    return c;
}

/// ceil(log2(max row abs-sum)).
inline int bit_growth(const IntMatrix& t)
{
    int worst = 0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        worst = std::max(worst, t.row(i).cwiseAbs().sum());
    }
    int bits = 0;
    while ((1 << bits) < worst) {
        ++bits;
    }
    return bits;
}

inline FastPlan plan_for(TransformId id)
{
    FastPlan plan;
    plan.id = id;
    switch (id) {
    case TransformId::T1:
    case TransformId::T3:
    case TransformId::T13: plan.factors = {Factor::P, Factor::M, Factor::A1}; break;
    case TransformId::T16:
    case TransformId::T17: plan.factors = {Factor::P, Factor::M, Factor::A2_prime, Factor::A1}; break;
    case TransformId::T18: plan.factors = {Factor::P, Factor::M, Factor::A2_doubleprime, Factor::A1}; break;
    }
    const detail::KernelConstants& k = detail::kernel_constants(id);
    plan.m1_constants = k.m1;
    plan.m2_constants = k.m2;
    const OpCount ops = count_plan_ops(plan.factors, k);
    plan.add_count = ops.adds;
    plan.shift_count = ops.shifts;
    const IntMatrix expected = named_transform(id).t.entries;
    plan.bit_growth = bit_growth(expected);
    if (auto bad = first_mismatch(expected, plan.product())) {
        throw Error("factorisation of " + std::string(to_string(id)) + " is inconsistent at ("
                    + std::to_string(bad->row) + "," + std::to_string(bad->col) + ")");
    }
    return plan;
}

inline OpCount count_ops(TransformId id)
{
    const FastPlan p = plan_for(id);
    return {p.add_count, p.shift_count};
}

inline int bit_growth(TransformId id) { return bit_growth(named_transform(id).t.entries); }

// ---- integer arithmetic ------------------------------------------------------

/// Signed integer confined to a word of `bits` bits; leaving the range throws.
class CheckedInt {
public:
    CheckedInt() = default;
    CheckedInt(std::int64_t v, int bits = 16) : v_(v), bits_(bits) { check(); }

    std::int64_t value() const { return v_; }
    int bits() const { return bits_; }

    friend CheckedInt operator+(CheckedInt a, CheckedInt b) { return {a.v_ + b.v_, std::max(a.bits_, b.bits_)}; }
    friend CheckedInt operator-(CheckedInt a, CheckedInt b) { return {a.v_ - b.v_, std::max(a.bits_, b.bits_)}; }
    CheckedInt operator-() const { return {-v_, bits_}; }
    CheckedInt shl(int s) const { return {v_ * (std::int64_t{1} << s), bits_}; }
    bool operator==(const CheckedInt& o) const { return v_ == o.v_; }

private:
    void check() const
    {
        if (bits_ < 2 || bits_ > 62) {
            throw DomainError("word width must be in [2, 62]");
        }
        const std::int64_t hi = (std::int64_t{1} << (bits_ - 1)) - 1;
        const std::int64_t lo = -hi - 1;
        if (v_ < lo || v_ > hi) {
            throw OverflowError("value " + std::to_string(v_) + " does not fit in "
                                + std::to_string(bits_) + " bits");
        }
    }

    std::int64_t v_ = 0;
    int bits_ = 16;
};

/// Tally of the operations an instrumented run performed.
struct OpTrace {
    long adds = 0; ///< additions and subtractions
    long shifts = 0;
    long negations = 0;
    long multiplications = 0;
};

/// Integer that records every operation applied to it in a shared trace.
class CountingInt {
public:
    CountingInt() = default;
    CountingInt(std::int64_t v, OpTrace* trace) : v_(v), trace_(trace) {}

    std::int64_t value() const { return v_; }

    friend CountingInt operator+(CountingInt a, CountingInt b)
    {
        a.bump(&OpTrace::adds);
        return {a.v_ + b.v_, a.trace_};
    }
    friend CountingInt operator-(CountingInt a, CountingInt b)
    {
        a.bump(&OpTrace::adds);
        return {a.v_ - b.v_, a.trace_};
    }
    friend CountingInt operator*(CountingInt a, CountingInt b)
    {
        a.bump(&OpTrace::multiplications);
        return {a.v_ * b.v_, a.trace_};
    }
    CountingInt operator-() const
    {
        bump(&OpTrace::negations);
        return {-v_, trace_};
    }
    CountingInt shl(int s) const
    {
        bump(&OpTrace::shifts);
        return {v_ << s, trace_};
    }

private:
    void bump(long OpTrace::*field) const
    {
        if (trace_ != nullptr) {
            ++(trace_->*field);
        }
    }

    std::int64_t v_ = 0;
    OpTrace* trace_ = nullptr;
};

inline std::int64_t shl(std::int64_t v, int s) { return v * (std::int64_t{1} << s); }
template <typename W>
W shl(const W& v, int s)
{
    return v.shl(s);
}

namespace detail {

/// |m| * v for m in {1,2,3}
template <typename W>
W scaled(const W& v, int magnitude)
{
    using kltapprox::shl;
    switch (magnitude) {
    case 1: return v;
    case 2: return shl(v, 1);
    case 3: return shl(v, 1) + v;
    default: throw OutOfAlphabet("kernel constant magnitude " + std::to_string(magnitude));
    }
}

/// One output of a 4x4 kernel block: sum_c m[c] * u[c], built from adds,
/// subtractions and shifts only.
template <typename W>
W kernel_row(const int* m, const W* u, const W& zero)
{
    // start from a positive term so that no negation is needed
    int start = -1;
    for (int c = 0; c < 4; ++c) {
        if (m[c] > 0) {
            start = c;
            break;
        }
    }
    bool negate = false;
    if (start < 0) {
        for (int c = 0; c < 4; ++c) {
            if (m[c] != 0) {
                start = c;
                negate = true;
                break;
            }
        }
    }
    if (start < 0) {
        return zero;
    }
    W acc = scaled(u[start], std::abs(m[start]));
    if (negate) {
        acc = -acc;
    }
    for (int c = 0; c < 4; ++c) {
        if (c == start || m[c] == 0) {
            continue;
        }
        const W term = scaled(u[c], std::abs(m[c]));
        acc = m[c] > 0 ? acc + term : acc - term;
    }
    return acc;
}

} // namespace detail

/// y = T_id * x evaluated stage by stage through the factorisation.
template <typename W>
std::array<W, 8> apply_fast(const FastPlan& plan, const std::array<W, 8>& x)
{
    std::array<W, 8> u;
    for (int i = 0; i < 4; ++i) {
        u[i] = x[i] + x[7 - i];
        u[4 + i] = x[3 - i] - x[4 + i];
    }
    for (auto it = plan.factors.rbegin(); it != plan.factors.rend(); ++it) {
        if (*it == Factor::A2_prime) {
            const W a = u[0] + u[3];
            const W b = u[0] - u[3];
            u[0] = a;
            u[3] = b;
        } else if (*it == Factor::A2_doubleprime) {
            const W a = u[1] + u[2];
            const W b = u[1] - u[2];
            u[1] = a;
            u[2] = b;
        }
    }
    std::array<W, 8> v;
    const W zero{};
    for (int r = 0; r < 4; ++r) {
        v[r] = detail::kernel_row(&plan.m1_constants[4 * r], &u[0], zero);
        v[4 + r] = detail::kernel_row(&plan.m2_constants[4 * r], &u[4], zero);
    }
    std::array<W, 8> y;
    for (int r = 0; r < 8; ++r) {
        y[r] = v[output_permutation[r]];
    }
    return y;
}

inline std::array<std::int64_t, 8> apply_fast(TransformId id, const std::array<std::int64_t, 8>& x)
{
    return apply_fast(plan_for(id), x);
}

/// Checked run with the given word width (default 16 bits).
inline std::array<std::int64_t, 8> apply_fast_checked(const FastPlan& plan, const std::array<std::int64_t, 8>& x,
                                                      int word_bits = 16)
{
    std::array<CheckedInt, 8> in;
    for (int i = 0; i < 8; ++i) {
        in[i] = CheckedInt(x[i], word_bits);
    }
    const auto out = apply_fast(plan, in);
    std::array<std::int64_t, 8> y;
    for (int i = 0; i < 8; ++i) {
        y[i] = out[i].value();
    }
    return y;
}

struct VerifyResult {
    TransformId id;
    bool factorization_ok = false;
    std::optional<Mismatch> mismatch;
    bool random_vectors_ok = false;
    int vectors_checked = 0;
    OpCount ops;
    OpTrace trace; ///< one instrumented application
    int bit_growth = 0;
    bool ok() const { return factorization_ok && random_vectors_ok && trace.multiplications == 0; }
};

/// Checks the factorisation of `id` against `expected`, then compares the fast
/// path with a direct product on seeded random vectors in [-10, 10]^8.
inline VerifyResult verify_transform(TransformId id, const IntMatrix& expected, std::uint64_t seed = 1,
                                     int vectors = 1000)
{
    const FastPlan plan = plan_for(id);
    VerifyResult res;
    res.id = id;
    res.ops = {plan.add_count, plan.shift_count};
    res.bit_growth = plan.bit_growth;
    res.mismatch = first_mismatch(expected, plan.product());
    res.factorization_ok = !res.mismatch.has_value();

    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> dist(-10, 10);
    res.random_vectors_ok = true;
    for (int n = 0; n < vectors; ++n) {
        std::array<std::int64_t, 8> x;
        for (auto& v : x) {
            v = dist(gen);
        }
        const auto y = apply_fast_checked(plan, x);
        for (int r = 0; r < 8 && res.random_vectors_ok; ++r) {
            std::int64_t direct = 0;
            for (int c = 0; c < 8; ++c) {
                direct += static_cast<std::int64_t>(expected(r, c)) * x[c];
            }
            res.random_vectors_ok = direct == y[r];
        }
        ++res.vectors_checked;
        if (!res.random_vectors_ok) {
            break;
        }
    }

    std::array<CountingInt, 8> probe;
    for (int i = 0; i < 8; ++i) {
        probe[i] = CountingInt(i + 1, &res.trace);
    }
    apply_fast(plan, probe);
    return res;
}

inline VerifyResult verify_transform(TransformId id, std::uint64_t seed = 1, int vectors = 1000)
{
    return verify_transform(id, named_transform(id).t.entries, seed, vectors);
}

} // namespace kltapprox
