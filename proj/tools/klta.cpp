// klta: command-line front end for the kltapprox library.

#include "kltapprox/kltapprox.hpp"

#include "CLI11.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace kltapprox;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_failed = 1;

/// Writes `text` to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path + "'");
    }
    out << text;
}

std::string matrix_csv(const Matrix& k)
{
    std::ostringstream s;
    char buf[40];
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g", k(i, j));
            s << (j ? "," : "") << buf;
        }
        s << '\n';
    }
    return s.str();
}

/// 8x8 integer matrix from a CSV or whitespace separated text file.
IntMatrix read_int_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open '" + path + "'");
    }
    std::vector<int> v;
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) {
                v.push_back(std::stoi(tok));
                tok.clear();
            }
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) {
        v.push_back(std::stoi(tok));
    }
    if (v.size() != 64) {
        throw FormatError("'" + path + "' holds " + std::to_string(v.size()) + " integers, expected 64");
    }
    IntMatrix m(8, 8);
    for (int i = 0; i < 64; ++i) {
        m(i / 8, i % 8) = v[i];
    }
    return m;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> rho_grid_from_step(double step)
{
    if (!(step > 0.0 && step < 1.0)) {
        throw DomainError("rho step must lie in (0,1)");
    }
    std::vector<double> g;
    for (int m = 1; m * step < 1.0 - 1e-9; ++m) {
        g.push_back(std::round(m * step * 1e9) / 1e9);
    }
    return g;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"KLT approximation toolkit: exact Markov-1 KLT, integer approximation search, fast transforms, "
                 "block codec"};
    app.require_subcommand(1);

    std::string out_path;
    std::string format = "json";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out,-o", out_path, "output file (default stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    // gen-klt
    auto* gen = app.add_subcommand("gen-klt", "exact KLT of a Markov-1 source as CSV");
    double gen_rho = 0.95;
    int gen_n = 8;
    std::string gen_source = "closed";
    gen->add_option("--rho", gen_rho, "correlation coefficient in (0,1)")->required();
    gen->add_option("--n", gen_n, "block length");
    gen->add_option("--source", gen_source, "closed or eigen")->check(CLI::IsMember({"closed", "eigen"}));
    add_common(gen);

    // search
    auto* srch = app.add_subcommand("search", "exhaustive search, shortlist and clustering");
    double rho_step = 0.1;
    double alpha_step = 0.01;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    int restarts = 32;
    std::vector<std::string> func_names{"floor", "ceil", "trunc", "round"};
    srch->add_option("--rho", rho_step, "step of the rho grid");
    srch->add_option("--alpha-step", alpha_step, "step of the alpha grid");
    srch->add_option("--seed", seed, "k-means seed")->required();
    srch->add_option("--workers", workers, "worker threads (0 = all cores)");
    srch->add_option("--restarts", restarts, "k-means restarts");
    srch->add_option("--funcs", func_names, "integer functions to scan");
    add_common(srch);

    // eval
    auto* ev = app.add_subcommand("eval", "figures of merit of one transform");
    std::string transform = "T16";
    double ev_rho = 0.8;
    std::optional<double> ev_rho_ref;
    std::string merit_name;
    ev->add_option("--transform", transform, "T1|T3|T13|T16|T17|T18, DCT or KLT<rho>")->required();
    ev->add_option("--rho", ev_rho, "correlation coefficient of the model")->required();
    ev->add_option("--rho-ref", ev_rho_ref, "rho of the reference KLT for mse/epsilon (default --rho)");
    ev->add_option("--merit", merit_name, "print only this merit (cg, eta, mse, epsilon)");
    add_common(ev);

    // compress
    auto* cmp = app.add_subcommand("compress", "block-transform compression of a PGM image");
    std::string in_path;
    int r_keep = 10;
    std::string image_out;
    cmp->add_option("--in,-i", in_path, "input PGM (P5, maxval 255)")->required();
    cmp->add_option("--transform", transform, "T1|T3|T13|T16|T17|T18, DCT or KLT<rho>")->required();
    cmp->add_option("--r", r_keep, "retained coefficients per block, 1..64");
    cmp->add_option("--image-out", image_out, "write the reconstructed image here");
    add_common(cmp);

    // sweep
    auto* swp = app.add_subcommand("sweep", "mean PSNR/MSSIM against r over a set of images (CSV)");
    std::vector<std::string> images;
    std::vector<std::string> transforms{"T16", "T17", "T18", "KLT0.8", "DCT"};
    int r_min = 1;
    int r_max = 45;
    swp->add_option("--images", images, "PGM files")->required();
    swp->add_option("--transform", transforms, "transforms to compare");
    swp->add_option("--r-min", r_min, "smallest r");
    swp->add_option("--r-max", r_max, "largest r");
    swp->add_option("--out,-o", out_path, "CSV output file (default stdout)");

    // verify
    auto* ver = app.add_subcommand("verify", "check factorisation, fast path and op counts");
    std::string verify_id = "all";
    std::string expect_path;
    std::uint64_t verify_seed = 1;
    int vectors = 1000;
    ver->add_option("--transform", verify_id, "T1|T3|T13|T16|T17|T18 or all");
    ver->add_option("--expect", expect_path, "8x8 integer matrix to verify against instead of the built-in one");
    ver->add_option("--seed", verify_seed, "seed of the random test vectors");
    ver->add_option("--vectors", vectors, "number of random vectors");
    add_common(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            const CorrelationModel model = autocorrelation_matrix(gen_rho, gen_n);
            const ExactTransform k = gen_source == "closed" ? exact_klt_closed_form(model) : exact_klt_eigen(model);
            // CSV unless asked otherwise
            if (gen->count("--format") > 0 && format == "json") {
                emit(out_path, dump(Json{{"rho", gen_rho}, {"source", gen_source}, {"matrix", to_json(k.matrix)}}));
            } else {
                emit(out_path, matrix_csv(k.matrix));
            }
            return 0;
        }

        if (srch->parsed()) {
            SearchConfig cfg;
            cfg.rho_grid = rho_grid_from_step(rho_step);
            cfg.alpha_step = alpha_step;
            cfg.workers = workers;
            cfg.funcs.clear();
            for (const auto& f : func_names) {
                cfg.funcs.push_back(parse_int_function(f));
            }
            const PipelineReport rep = run_pipeline(cfg, seed, restarts);
            if (format == "json") {
                emit(out_path, dump(search_report_json(rep)));
            } else {
                std::ostringstream s;
                write_merit_csv(s, rep);
                emit(out_path, s.str());
            }
            std::cerr << "candidates " << rep.candidate_count << ", optima " << rep.optima.size() << ", shortlist "
                      << rep.shortlist.size() << " (" << rep.reduction_pct << "% reduction)\n";
            return 0;
        }

        if (ev->parsed()) {
            const CodecTransform t = parse_codec_transform(transform);
            const CorrelationModel model = autocorrelation_matrix(ev_rho, 8);
            const CorrelationModel ref_model = autocorrelation_matrix(ev_rho_ref.value_or(ev_rho), 8);
            const Matrix ref = exact_klt_closed_form(ref_model).matrix;
            const MeritReport m = evaluate(t.forward, model, ref, ref_model);
            if (!merit_name.empty()) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.12g\n", merit_value(m, parse_merit(merit_name)));
                emit(out_path, buf);
                return 0;
            }
            Json j{{"transform", t.name}, {"rho", ev_rho}, {"orthogonal", t.orthogonal}};
            const Json mj = to_json(m);
            for (auto& [k, v] : mj.items()) {
                j[k] = v;
            }
            j["cg_db_inverse_synthesis"] = json_number(coding_gain(t.forward, model, SynthesisNorm::inverse));
            if (format == "json") {
                emit(out_path, dump(j));
            } else {
                char buf[200];
                std::snprintf(buf, sizeof buf, "transform,rho,cg_db,eta_pct,mse,epsilon\n%s,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                              t.name.c_str(), ev_rho, m.cg_db, m.eta_pct, m.mse, m.epsilon);
                emit(out_path, buf);
            }
            return 0;
        }

        if (cmp->parsed()) {
            const GrayImage img = read_pgm(in_path);
            const CodecTransform t = parse_codec_transform(transform);
            const CompressionResult res = compress(img, t, r_keep);
            if (!image_out.empty()) {
                write_pgm(image_out, res.image);
            }
            const QualityReport q = quality(img, res);
            if (format == "json") {
                Json j{{"image", in_path}, {"transform", t.name}, {"r", r_keep}};
                const Json qj = to_json(q);
                for (auto& [k, v] : qj.items()) {
                    j[k] = v;
                }
                emit(out_path, dump(j));
            } else {
                char buf[256];
                std::snprintf(buf, sizeof buf, "transform,r,psnr_db,mssim,psnr_float_db,mssim_gaussian11\n%s,%d,%.12g,%.12g,%.12g,%.12g\n",
                              t.name.c_str(), r_keep, q.psnr_db, q.mssim, q.psnr_float_db, q.mssim_gaussian);
                emit(out_path, buf);
            }
            return 0;
        }

        if (swp->parsed()) {
            std::vector<CodecTransform> ts;
            for (const auto& s : transforms) {
                ts.push_back(parse_codec_transform(s));
            }
            const SweepReport rep = sweep(images, ts, r_min, r_max);
            for (const auto& w : rep.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            std::ostringstream s;
            write_sweep_csv(s, rep);
            emit(out_path, s.str());
            return 0;
        }

        if (ver->parsed()) {
            std::vector<TransformId> ids;
            if (verify_id == "all") {
                ids.assign(all_transform_ids.begin(), all_transform_ids.end());
            } else if (auto id = parse_transform_id(verify_id)) {
                ids.push_back(*id);
            } else {
                throw DomainError("unknown transform '" + verify_id + "'");
            }
            if (!expect_path.empty() && ids.size() != 1) {
                throw DomainError("--expect needs a single --transform");
            }
            bool all_ok = true;
            Json results = Json::array();
            std::ostringstream text;
            text << "id,result,adds,shifts,bit_growth,vectors,multiplications,first_mismatch\n";
            for (TransformId id : ids) {
                const IntMatrix expected = expect_path.empty() ? named_transform(id).t.entries : read_int_matrix(expect_path);
                const VerifyResult v = verify_transform(id, expected, verify_seed, vectors);
                all_ok = all_ok && v.ok();
                Json j{{"id", std::string(to_string(id))},
                       {"pass", v.ok()},
                       {"factorization", v.factorization_ok},
                       {"random_vectors", v.random_vectors_ok},
                       {"vectors_checked", v.vectors_checked},
                       {"adds", v.ops.adds},
                       {"shifts", v.ops.shifts},
                       {"bit_growth", v.bit_growth},
                       {"multiplications", v.trace.multiplications}};
                std::string mm;
                if (v.mismatch) {
                    j["first_mismatch"] = Json{{"row", v.mismatch->row},
                                               {"col", v.mismatch->col},
                                               {"expected", v.mismatch->expected},
                                               {"factored", v.mismatch->actual}};
                    mm = "(" + std::to_string(v.mismatch->row) + "," + std::to_string(v.mismatch->col) + ") expected "
                        + std::to_string(v.mismatch->expected) + " got " + std::to_string(v.mismatch->actual);
                }
                results.push_back(j);
                text << to_string(id) << ',' << (v.ok() ? "pass" : "fail") << ',' << v.ops.adds << ',' << v.ops.shifts
                     << ',' << v.bit_growth << ',' << v.vectors_checked << ',' << v.trace.multiplications << ',' << mm
                     << '\n';
            }
            emit(out_path, format == "json" ? dump(Json{{"pass", all_ok}, {"results", results}}) : text.str());
            return all_ok ? 0 : exit_failed;
        }
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return 0;
}
