// 2-D transform of one 8x8 block through the fast T16 path (rows, then
// columns), checked against the matrix product.

#include "kltapprox/kltapprox.hpp"

#include <cstdio>

using namespace kltapprox;

int main()
{
    const FastPlan plan = plan_for(TransformId::T16);
    std::array<std::array<std::int64_t, 8>, 8> block;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            block[y][x] = 100 + 10 * x - 3 * y + (x * y) % 5;
        }
    }

    OpTrace trace;
    std::array<std::array<std::int64_t, 8>, 8> rows;
    for (int y = 0; y < 8; ++y) {
        std::array<CountingInt, 8> in;
        for (int x = 0; x < 8; ++x) {
            in[x] = CountingInt(block[y][x], &trace);
        }
        const auto out = apply_fast(plan, in);
        for (int x = 0; x < 8; ++x) {
            rows[y][x] = out[x].value();
        }
    }
    std::array<std::array<std::int64_t, 8>, 8> coeff;
    for (int x = 0; x < 8; ++x) {
        std::array<CountingInt, 8> in;
        for (int y = 0; y < 8; ++y) {
            in[y] = CountingInt(rows[y][x], &trace);
        }
        const auto out = apply_fast(plan, in);
        for (int y = 0; y < 8; ++y) {
            coeff[y][x] = out[y].value();
        }
    }

    const IntMatrix t = named_transform(TransformId::T16).t.entries;
    Eigen::Matrix<long long, 8, 8> a;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            a(y, x) = block[y][x];
        }
    }
    const Eigen::Matrix<long long, 8, 8> tl = t.cast<long long>();
    const Eigen::Matrix<long long, 8, 8> b = tl * a * tl.transpose();

    bool same = true;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            std::printf("%7lld", static_cast<long long>(coeff[y][x]));
            same = same && coeff[y][x] == b(y, x);
        }
        std::printf("\n");
    }
    std::printf("matches T*A*T': %s\n", same ? "yes" : "no");
    std::printf("16 passes: %ld adds, %ld shifts, %ld multiplications\n", trace.adds, trace.shifts,
                trace.multiplications);
    return same ? 0 : 1;
}
