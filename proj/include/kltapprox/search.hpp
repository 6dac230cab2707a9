#pragma once

// Exhaustive (function, alpha, rho) scan, per-merit optima, shortlist
// refinement and 1-D k-means grouping on coding gain.

#include "kltapprox/approx.hpp"
#include "kltapprox/error.hpp"
#include "kltapprox/markov_klt.hpp"
#include "kltapprox/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace kltapprox {

enum class Merit { cg, eta, mse, epsilon };

inline constexpr std::array<Merit, 4> all_merits{Merit::cg, Merit::eta, Merit::mse, Merit::epsilon};

inline std::string_view to_string(Merit m)
{
    switch (m) {
    case Merit::cg: return "cg";
    case Merit::eta: return "eta";
    case Merit::mse: return "mse";
    case Merit::epsilon: return "epsilon";
    }
    return "?";
}

inline Merit parse_merit(std::string_view s)
{
    for (Merit m : all_merits) {
        if (to_string(m) == s) {
            return m;
        }
    }
    if (s == "eps") {
        return Merit::epsilon;
    }
    throw DomainError("unknown merit '" + std::string(s) + "'");
}

inline double merit_value(const MeritReport& r, Merit m)
{
    switch (m) {
    case Merit::cg: return r.cg_db;
    case Merit::eta: return r.eta_pct;
    case Merit::mse: return r.mse;
    case Merit::epsilon: return r.epsilon;
    }
    return 0.0;
}

inline bool maximized(Merit m) { return m == Merit::cg || m == Merit::eta; }

/// Adds + shifts of a direct (row by row) evaluation of T x: a row with z
/// nonzero entries costs z-1 adds, |2| one shift, |3| one shift and one add.
inline int direct_complexity(const IntMatrix& t)
{
    int ops = 0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        int nonzero = 0;
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            const int v = std::abs(t(i, j));
            nonzero += v != 0;
            ops += v == 2 ? 1 : v == 3 ? 2 : 0;
        }
        ops += std::max(0, nonzero - 1);
    }
    return ops;
}

/// Row-major lexicographic order.
inline bool lex_less(const IntMatrix& a, const IntMatrix& b)
{
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) != b(i, j)) {
                return a(i, j) < b(i, j);
            }
        }
    }
    return false;
}

inline bool same_matrix(const IntMatrix& a, const IntMatrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

struct CandidateRecord {
    IntMatrix t;
    IntFunction func;
    double alpha;
    double rho;
    MeritReport merits;
    int complexity = 0;
    bool orthogonal = false;
};

/// Values closer than this (relative) count as a tie.
inline constexpr double merit_tie_tolerance = 1e-12;

/// true if a is strictly preferable to b under merit m.
inline bool better(const CandidateRecord& a, const CandidateRecord& b, Merit m)
{
    const double va = merit_value(a.merits, m);
    const double vb = merit_value(b.merits, m);
    const double scale = std::max({1.0, std::abs(va), std::abs(vb)});
    if (std::abs(va - vb) > merit_tie_tolerance * scale) {
        return maximized(m) ? va > vb : va < vb;
    }
    if (a.complexity != b.complexity) {
        return a.complexity < b.complexity;
    }
    return lex_less(a.t, b.t);
}

struct RejectionCounts {
    long out_of_alphabet = 0;
    long all_zero_row = 0;
    long singular = 0;
    long duplicate = 0; ///< same matrix from a larger alpha in the same slice
    long accepted = 0;

    RejectionCounts& operator+=(const RejectionCounts& o)
    {
        out_of_alphabet += o.out_of_alphabet;
        all_zero_row += o.all_zero_row;
        singular += o.singular;
        duplicate += o.duplicate;
        accepted += o.accepted;
        return *this;
    }
    long scanned() const { return out_of_alphabet + all_zero_row + singular + duplicate + accepted; }
};

struct SliceResult {
    double rho;
    IntFunction func;
    std::vector<CandidateRecord> candidates; ///< ascending alpha of first appearance
    RejectionCounts rejected;
};

/// Every alpha on the step grid inside the function's range, for one rho.
/// Matrices repeated within the slice are kept once, at their smallest alpha.
inline SliceResult enumerate_slice(double rho, IntFunction func, double alpha_step)
{
    const CorrelationModel model = autocorrelation_matrix(rho, 8);
    const Matrix k = exact_klt_closed_form(model).matrix;
    ExactTransform kt{k, TransformSource::closed_form, rho, std::nullopt};
    const auto [first, last] = alpha_grid(alpha_range(func, gamma(kt)), alpha_step);

    SliceResult out{rho, func, {}, {}};
    std::vector<IntMatrix> seen;
    for (long m = first; m <= last; ++m) {
        const double alpha = static_cast<double>(m) * alpha_step;
        IntMatrix t = quantize(func, alpha, k);
        try {
            check_alphabet(t);
        } catch (const OutOfAlphabet&) {
            ++out.rejected.out_of_alphabet;
            continue;
        } catch (const AllZeroRow&) {
            ++out.rejected.all_zero_row;
            continue;
        }
        const bool dup = std::any_of(seen.begin(), seen.end(),
                                     [&](const IntMatrix& s) { return same_matrix(s, t); });
        if (dup) {
            ++out.rejected.duplicate;
            continue;
        }
        seen.push_back(t);
        const ApproximateTransform ap = normalize(t);
        CandidateRecord rec{t, func, alpha, rho, {}, direct_complexity(t), ap.orthogonal};
        try {
            rec.merits = evaluate(ap.k_hat, model, k, model);
        } catch (const SingularTransform&) {
            ++out.rejected.singular;
            continue;
        }
        ++out.rejected.accepted;
        out.candidates.push_back(std::move(rec));
    }
    return out;
}

struct SearchConfig {
    std::vector<double> rho_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double alpha_step = 0.01;
    std::vector<IntFunction> funcs{default_search_functions.begin(), default_search_functions.end()};
    unsigned workers = 1; ///< 0 = hardware concurrency
};

/// All slices, ordered (rho, func) as in the config regardless of worker count.
inline std::vector<SliceResult> enumerate_candidates(const SearchConfig& cfg)
{
    if (!(cfg.alpha_step > 0.0)) {
        throw DomainError("alpha step must be positive");
    }
    for (double r : cfg.rho_grid) {
        if (!(r > 0.0 && r < 1.0)) {
            throw DomainError("rho grid values must lie in (0,1)");
        }
    }
    struct Job {
        double rho;
        IntFunction func;
    };
    std::vector<Job> jobs;
    for (double r : cfg.rho_grid) {
        for (IntFunction f : cfg.funcs) {
            jobs.push_back({r, f});
        }
    }
    std::vector<SliceResult> results(jobs.size());
    unsigned workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.workers;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));

    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            results[i] = enumerate_slice(jobs[i].rho, jobs[i].func, cfg.alpha_step);
        }
        return results;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < jobs.size(); i += workers) {
                    results[i] = enumerate_slice(jobs[i].rho, jobs[i].func, cfg.alpha_step);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

/// Best record of a slice under one merit.
inline const CandidateRecord& optimize(const std::vector<CandidateRecord>& slice, Merit m)
{
    if (slice.empty()) {
        throw EmptySlice("no candidates to optimise over");
    }
    const CandidateRecord* best = &slice.front();
    for (const auto& c : slice) {
        if (better(c, *best, m)) {
            best = &c;
        }
    }
    return *best;
}

/// Half-open correlation interval (lo, hi] labelled by its grid rho.
struct RhoInterval {
    double lo;
    double hi;
    double grid_rho;
    bool contains(double rho) const { return rho > lo && rho <= hi; }
};

/// (0,0.1], (0.1,0.2], ..., (0.7,0.8], (0.8,1) for the grid 0.1..0.9.
inline RhoInterval interval_for(double grid_rho)
{
    const double step = 0.1;
    const double lo = std::round((grid_rho - step) * 10.0) / 10.0;
    const double hi = grid_rho >= 0.9 - 1e-12 ? 1.0 : grid_rho;
    return {std::max(0.0, lo), hi, grid_rho};
}

inline std::string interval_label(double grid_rho)
{
    const RhoInterval iv = interval_for(grid_rho);
    char lo[16];
    char hi[16];
    std::snprintf(lo, sizeof lo, "%.1f", iv.lo);
    std::snprintf(hi, sizeof hi, "%.1f", iv.hi);
    return "(" + std::string(iv.lo == 0.0 ? "0" : lo) + "," + (iv.hi >= 1.0 ? std::string("1)") : std::string(hi) + "]");
}

/// Optimum over every candidate whose rho falls in the interval.
inline CandidateRecord optimize(const std::vector<SliceResult>& slices, Merit m, const RhoInterval& iv)
{
    std::vector<CandidateRecord> pool;
    for (const auto& s : slices) {
        if (iv.contains(s.rho)) {
            pool.insert(pool.end(), s.candidates.begin(), s.candidates.end());
        }
    }
    return optimize(pool, m);
}

struct Optimum {
    double rho;
    IntFunction func;
    Merit merit;
    CandidateRecord record;
};

/// One optimum per (rho, func, merit); empty slices are skipped.
inline std::vector<Optimum> per_function_optima(const std::vector<SliceResult>& slices)
{
    std::vector<Optimum> out;
    for (const auto& s : slices) {
        if (s.candidates.empty()) {
            continue;
        }
        for (Merit m : all_merits) {
            out.push_back({s.rho, s.func, m, optimize(s.candidates, m)});
        }
    }
    return out;
}

struct ShortlistEntry {
    CandidateRecord record;
    std::vector<std::pair<double, Merit>> wins; ///< (rho, merit) pairs it was best for
};

enum class ShortlistMode {
    best_per_interval, ///< best of the per-function optima for each (rho, merit), then dedup
    union_all,         ///< every optimum, dedup only
};

/// Duplicated matrices collapse onto their first occurrence (rho, then merit order).
inline std::vector<ShortlistEntry> first_stage_shortlist(const std::vector<Optimum>& optima,
                                                         ShortlistMode mode = ShortlistMode::best_per_interval)
{
    std::vector<ShortlistEntry> out;
    auto add = [&](const Optimum& o) {
        for (auto& e : out) {
            if (same_matrix(e.record.t, o.record.t)) {
                e.wins.emplace_back(o.rho, o.merit);
                return;
            }
        }
        out.push_back({o.record, {{o.rho, o.merit}}});
    };

    if (mode == ShortlistMode::union_all) {
        for (const auto& o : optima) {
            add(o);
        }
        return out;
    }
    std::vector<double> rhos;
    for (const auto& o : optima) {
        if (std::find(rhos.begin(), rhos.end(), o.rho) == rhos.end()) {
            rhos.push_back(o.rho);
        }
    }
    for (double r : rhos) {
        for (Merit m : all_merits) {
            const Optimum* best = nullptr;
            for (const auto& o : optima) {
                if (o.rho == r && o.merit == m && (best == nullptr || better(o.record, best->record, m))) {
                    best = &o;
                }
            }
            if (best != nullptr) {
                add(*best);
            }
        }
    }
    return out;
}

// ---- k-means ------------------------------------------------------------------

struct ClusterAssignment {
    int k = 0;
    std::vector<double> means;    ///< ascending
    std::vector<int> assignment;  ///< cluster index per input value
    int iterations = 0;           ///< of the winning restart
    double wcss = 0.0;
    std::vector<double> history;  ///< wcss after each iteration of the winning restart
};

inline double within_cluster_ss(const std::vector<double>& v, const std::vector<int>& a,
                                const std::vector<double>& means)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - means[a[i]];
        s += d * d;
    }
    return s;
}

/// Lloyd iterations on scalars, Forgy initialisation, best of `restarts`.
inline ClusterAssignment kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed, int restarts = 32)
{
    const std::set<double> distinct(values.begin(), values.end());
    if (k < 1) {
        throw DomainError("k must be at least 1");
    }
    if (static_cast<std::size_t>(k) > distinct.size()) {
        throw DomainError("k = " + std::to_string(k) + " exceeds the number of distinct values ("
                          + std::to_string(distinct.size()) + ")");
    }
    if (restarts < 1) {
        throw DomainError("restarts must be at least 1");
    }
    const std::size_t n = values.size();
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    auto draw_means = [&] {
        // k distinct values picked from the data
        std::vector<double> mu;
        while (mu.size() < static_cast<std::size_t>(k)) {
            const double v = values[pick(gen)];
            if (std::find(mu.begin(), mu.end(), v) == mu.end()) {
                mu.push_back(v);
            }
        }
        return mu;
    };

    ClusterAssignment best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> mu = draw_means();
        std::vector<int> a(n, -1);
        std::vector<double> history;
        int it = 0;
        for (;; ++it) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                int arg = 0;
                for (int j = 1; j < k; ++j) {
                    if (std::abs(values[i] - mu[j]) < std::abs(values[i] - mu[arg])) {
                        arg = j;
                    }
                }
                if (a[i] != arg) {
                    a[i] = arg;
                    changed = true;
                }
            }
            if (!changed) {
                break;
            }
            std::vector<double> sum(k, 0.0);
            std::vector<int> count(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                sum[a[i]] += values[i];
                ++count[a[i]];
            }
            for (int j = 0; j < k; ++j) {
                // an emptied cluster restarts from a random data point
                mu[j] = count[j] > 0 ? sum[j] / count[j] : values[pick(gen)];
            }
            history.push_back(within_cluster_ss(values, a, mu));
        }
        const double w = within_cluster_ss(values, a, mu);
        if (w < best.wcss) {
            best = {k, mu, a, it, w, history};
        }
    }

    // relabel so that means ascend
    std::vector<int> order(k);
    for (int j = 0; j < k; ++j) {
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) { return best.means[x] < best.means[y]; });
    std::vector<int> relabel(k);
    std::vector<double> sorted_means(k);
    for (int j = 0; j < k; ++j) {
        relabel[order[j]] = j;
        sorted_means[j] = best.means[order[j]];
    }
    for (int& x : best.assignment) {
        x = relabel[x];
    }
    best.means = sorted_means;
    return best;
}

/// Per cluster, the indices of the best member under each merit (first index
/// wins ties), without repeats, in merit order.
inline std::vector<std::vector<int>> select_representatives(const std::vector<MeritReport>& merits,
                                                            const ClusterAssignment& clusters)
{
    if (merits.size() != clusters.assignment.size()) {
        throw DimensionMismatch("merit list and cluster assignment differ in length");
    }
    std::vector<std::vector<int>> out(clusters.k);
    for (int c = 0; c < clusters.k; ++c) {
        for (Merit m : all_merits) {
            int best = -1;
            for (std::size_t i = 0; i < merits.size(); ++i) {
                if (clusters.assignment[i] != c) {
                    continue;
                }
                const double v = merit_value(merits[i], m);
                if (best < 0) {
                    best = static_cast<int>(i);
                    continue;
                }
                const double b = merit_value(merits[best], m);
                if (maximized(m) ? v > b : v < b) {
                    best = static_cast<int>(i);
                }
            }
            if (best >= 0 && std::find(out[c].begin(), out[c].end(), best) == out[c].end()) {
                out[c].push_back(best);
            }
        }
    }
    return out;
}

// ---- whole pipeline -------------------------------------------------------------

struct PipelineReport {
    SearchConfig config;
    std::uint64_t seed = 0;
    int kmeans_restarts = 32;
    RejectionCounts rejected;
    long candidate_count = 0;
    std::vector<Optimum> optima;
    std::vector<ShortlistEntry> shortlist;
    double reduction_pct = 0.0; ///< 100 * (1 - shortlist / optima)
    ClusterAssignment clusters;
    std::vector<std::vector<int>> representatives; ///< shortlist indices per cluster
    std::vector<SliceResult> slices;
};

inline PipelineReport run_pipeline(const SearchConfig& cfg, std::uint64_t seed, int restarts = 32, int k = 2)
{
    PipelineReport rep;
    rep.config = cfg;
    rep.seed = seed;
    rep.kmeans_restarts = restarts;
    rep.slices = enumerate_candidates(cfg);
    for (const auto& s : rep.slices) {
        rep.rejected += s.rejected;
        rep.candidate_count += static_cast<long>(s.candidates.size());
    }
    rep.optima = per_function_optima(rep.slices);
    rep.shortlist = first_stage_shortlist(rep.optima);
    if (!rep.optima.empty()) {
        rep.reduction_pct = 100.0 * (1.0 - static_cast<double>(rep.shortlist.size()) / rep.optima.size());
    }
    std::vector<double> cg;
    std::vector<MeritReport> merits;
    for (const auto& e : rep.shortlist) {
        cg.push_back(e.record.merits.cg_db);
        merits.push_back(e.record.merits);
    }
    const std::set<double> distinct(cg.begin(), cg.end());
    if (static_cast<int>(distinct.size()) >= k) {
        rep.clusters = kmeans_1d(cg, k, seed, restarts);
        rep.representatives = select_representatives(merits, rep.clusters);
    }
    return rep;
}

/// Where in the candidate set a given matrix was found.
inline std::vector<const CandidateRecord*> find_candidates(const std::vector<SliceResult>& slices, const IntMatrix& t)
{
    std::vector<const CandidateRecord*> hits;
    for (const auto& s : slices) {
        for (const auto& c : s.candidates) {
            if (same_matrix(c.t, t)) {
                hits.push_back(&c);
            }
        }
    }
    return hits;
}

} // namespace kltapprox
