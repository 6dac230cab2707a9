#pragma once

// JSON / CSV views of search results, merit reports and quality reports.

#include "kltapprox/codec.hpp"
#include "kltapprox/fast_transforms.hpp"
#include "kltapprox/metrics.hpp"
#include "kltapprox/search.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace kltapprox {

using Json = nlohmann::ordered_json;

/// Doubles as JSON numbers; infinities become the strings "inf" / "-inf".
inline Json json_number(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    return v;
}

inline Json to_json(const IntMatrix& t)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            row.push_back(t(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

inline Json to_json(const Matrix& k)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            row.push_back(json_number(k(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

inline Json to_json(const MeritReport& m)
{
    return Json{{"cg_db", json_number(m.cg_db)},
                {"eta_pct", json_number(m.eta_pct)},
                {"mse", json_number(m.mse)},
                {"epsilon", json_number(m.epsilon)},
                {"rho_ref", json_number(m.rho_ref)}};
}

inline Json to_json(const CandidateRecord& c)
{
    return Json{{"func", std::string(to_string(c.func))},
                {"alpha", json_number(c.alpha)},
                {"rho", json_number(c.rho)},
                {"interval", interval_label(c.rho)},
                {"orthogonal", c.orthogonal},
                {"complexity", c.complexity},
                {"merits", to_json(c.merits)},
                {"t", to_json(c.t)}};
}

inline Json to_json(const QualityReport& q)
{
    return Json{{"psnr_db", json_number(q.psnr_db)},
                {"mssim", json_number(q.mssim)},
                {"psnr_float_db", json_number(q.psnr_float_db)},
                {"mssim_gaussian11", json_number(q.mssim_gaussian)}};
}

inline Json search_report_json(const PipelineReport& rep)
{
    Json cfg{{"rho_grid", rep.config.rho_grid}, {"alpha_step", rep.config.alpha_step}};
    Json funcs = Json::array();
    for (IntFunction f : rep.config.funcs) {
        funcs.push_back(std::string(to_string(f)));
    }
    cfg["funcs"] = funcs;
    cfg["seed"] = rep.seed;
    cfg["kmeans_restarts"] = rep.kmeans_restarts;

    Json rejected{{"scanned", rep.rejected.scanned()},
                  {"accepted", rep.rejected.accepted},
                  {"out_of_alphabet", rep.rejected.out_of_alphabet},
                  {"all_zero_row", rep.rejected.all_zero_row},
                  {"singular", rep.rejected.singular},
                  {"duplicate_in_slice", rep.rejected.duplicate}};

    Json optima = Json::array();
    for (const auto& o : rep.optima) {
        Json j = to_json(o.record);
        j["merit"] = std::string(to_string(o.merit));
        optima.push_back(j);
    }

    Json shortlist = Json::array();
    for (std::size_t i = 0; i < rep.shortlist.size(); ++i) {
        const auto& e = rep.shortlist[i];
        Json j{{"index", i}};
        const std::string name = published_name(e.record.t);
        j["published"] = name.empty() ? Json(nullptr) : Json(name);
        if (!rep.clusters.assignment.empty()) {
            j["cluster"] = rep.clusters.assignment[i];
        }
        Json wins = Json::array();
        for (const auto& [r, m] : e.wins) {
            wins.push_back(Json{{"rho", r}, {"merit", std::string(to_string(m))}});
        }
        j["wins"] = wins;
        const Json rj = to_json(e.record);
        for (auto& [k, v] : rj.items()) {
            j[k] = v;
        }
        shortlist.push_back(j);
    }

    Json clusters{{"k", rep.clusters.k},
                  {"means", rep.clusters.means},
                  {"iterations", rep.clusters.iterations},
                  {"wcss", rep.clusters.wcss},
                  {"wcss_history", rep.clusters.history},
                  {"representatives", rep.representatives}};

    Json found = Json::object();
    for (TransformId id : all_transform_ids) {
        Json hits = Json::array();
        for (const CandidateRecord* c : find_candidates(rep.slices, named_transform(id).t.entries)) {
            hits.push_back(Json{{"rho", c->rho}, {"func", std::string(to_string(c->func))}, {"alpha", c->alpha}});
        }
        found[std::string(to_string(id))] = hits;
    }

    return Json{{"config", cfg},
                {"candidates", rep.candidate_count},
                {"rejections", rejected},
                {"optima_count", rep.optima.size()},
                {"shortlist_count", rep.shortlist.size()},
                {"reduction_pct", rep.reduction_pct},
                {"published_found", found},
                {"clusters", clusters},
                {"shortlist", shortlist},
                {"optima", optima}};
}

/// One row per shortlist member: interval and the four merits.
inline void write_merit_csv(std::ostream& out, const PipelineReport& rep)
{
    out << "index,published,interval,rho,func,alpha,cg_db,eta_pct,epsilon,mse,cluster\n";
    char buf[256];
    for (std::size_t i = 0; i < rep.shortlist.size(); ++i) {
        const auto& c = rep.shortlist[i].record;
        const int cl = rep.clusters.assignment.empty() ? -1 : rep.clusters.assignment[i];
        std::snprintf(buf, sizeof buf, "%zu,%s,%s,%.12g,%s,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n", i,
                      published_name(c.t).c_str(), interval_label(c.rho).c_str(), c.rho,
                      std::string(to_string(c.func)).c_str(), c.alpha, c.merits.cg_db, c.merits.eta_pct,
                      c.merits.epsilon, c.merits.mse, cl);
        out << buf;
    }
}

} // namespace kltapprox
