// Figures of merit of the six built-in transforms, plus the exact KLT.

#include "kltapprox/kltapprox.hpp"

#include <cstdio>

using namespace kltapprox;

int main()
{
    std::printf("%-6s %5s %8s %9s %8s %8s\n", "name", "rho", "Cg dB", "eta %", "epsilon", "MSE");
    for (TransformId id : all_transform_ids) {
        const double rho = group_of(id) == Group::C1 ? (id == TransformId::T13 ? 0.7 : 0.1)
                                                     : (id == TransformId::T18 ? 0.9 : 0.8);
        const MeritReport m = evaluate(normalize(named_transform(id).t).k_hat, rho);
        std::printf("%-6s %5.2f %8.4f %9.4f %8.4f %8.4f\n", std::string(to_string(id)).c_str(), rho, m.cg_db, m.eta_pct,
                    m.epsilon, m.mse);
    }
    for (double rho : {0.2, 0.8}) {
        const MeritReport m = evaluate(exact_klt_closed_form(autocorrelation_matrix(rho, 8)).matrix, rho);
        std::printf("%-6s %5.2f %8.4f %9.4f %8.4f %8.4f\n", "KLT", rho, m.cg_db, m.eta_pct, m.epsilon, m.mse);
    }
}
