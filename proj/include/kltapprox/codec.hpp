#pragma once

// JPEG-like 8x8 block transform coding with zig-zag truncation, and image
// quality measures.

#include "kltapprox/approx.hpp"
#include "kltapprox/error.hpp"
#include "kltapprox/fast_transforms.hpp"
#include "kltapprox/markov_klt.hpp"
#include "kltapprox/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace kltapprox {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; ///< row-major

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill)
    {
        if (w <= 0 || h <= 0) {
            throw DomainError("image dimensions must be positive");
        }
    }

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const GrayImage&) const = default;
};

// ---- PGM (P5, maxval 255) ------------------------------------------------------

namespace detail {

inline std::string pgm_token(std::istream& in)
{
    std::string tok;
    int c = in.get();
    for (;;) {
        while (c != EOF && std::isspace(c)) {
            c = in.get();
        }
        if (c == '#') {
            while (c != EOF && c != '\n' && c != '\r') {
                c = in.get();
            }
            continue;
        }
        break;
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') {
        in.unget();
    }
    // the single whitespace after the last header token has been consumed
    return tok;
}

inline int pgm_int(std::istream& in, const char* what)
{
    const std::string tok = pgm_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        throw FormatError(std::string("PGM: bad ") + what + " '" + tok + "'");
    }
    return std::stoi(tok);
}

} // namespace detail

inline GrayImage read_pgm(std::istream& in)
{
    if (detail::pgm_token(in) != "P5") {
        throw FormatError("PGM: only binary P5 is supported");
    }
    const int w = detail::pgm_int(in, "width");
    const int h = detail::pgm_int(in, "height");
    const int maxval = detail::pgm_int(in, "maxval");
    if (w <= 0 || h <= 0) {
        throw FormatError("PGM: non-positive dimensions");
    }
    if (maxval != 255) {
        throw FormatError("PGM: maxval must be 255, got " + std::to_string(maxval));
    }
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw FormatError("PGM: truncated pixel data");
    }
    return img;
}

inline GrayImage read_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path + "'");
    }
    return read_pgm(in);
}

inline void write_pgm(std::ostream& out, const GrayImage& img)
{
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pgm(const std::string& path, const GrayImage& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path + "'");
    }
    write_pgm(out, img);
}

// ---- block coding -----------------------------------------------------------------

/// JPEG zig-zag scan of an 8x8 block as (row, col).
inline std::vector<std::pair<int, int>> zigzag_indices(int n = 8)
{
    if (n != 8) {
        throw DomainError("zig-zag scan is only defined here for 8x8 blocks");
    }
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < 2 * n - 1; ++s) {
        const int lo = std::max(0, s - n + 1);
        const int hi = std::min(s, n - 1);
        if (s % 2 == 0) {
            // moving up-right: row decreases
            for (int r = hi; r >= lo; --r) {
                out.emplace_back(r, s - r);
            }
        } else {
            for (int r = lo; r <= hi; ++r) {
                out.emplace_back(r, s - r);
            }
        }
    }
    return out;
}

struct CodecTransform {
    std::string name;
    Matrix forward; ///< K_hat
    Matrix inverse; ///< K_hat^{-1}
    bool orthogonal = false;
};

inline CodecTransform make_codec_transform(std::string name, const Matrix& k, bool orthogonal)
{
    return {std::move(name), k, invert(k), orthogonal};
}

inline CodecTransform codec_transform(TransformId id)
{
    const ApproximateTransform ap = normalize(named_transform(id).t);
    return make_codec_transform(std::string(to_string(id)), ap.k_hat, ap.orthogonal);
}

inline CodecTransform codec_transform_klt(double rho)
{
    const Matrix k = exact_klt_closed_form(autocorrelation_matrix(rho, 8)).matrix;
    char buf[32];
    std::snprintf(buf, sizeof buf, "KLT%.2f", rho);
    return make_codec_transform(buf, k, true);
}

inline CodecTransform codec_transform_dct() { return make_codec_transform("DCT", dct_reference(8).matrix, true); }

/// Parses "T16", "DCT", "KLT0.8" / "klt:0.8".
inline CodecTransform parse_codec_transform(const std::string& s)
{
    if (auto id = parse_transform_id(s)) {
        return codec_transform(*id);
    }
    if (s == "DCT" || s == "dct") {
        return codec_transform_dct();
    }
    for (const char* prefix : {"KLT", "klt:", "klt"}) {
        const std::string p(prefix);
        if (s.rfind(p, 0) == 0 && s.size() > p.size()) {
            try {
                return codec_transform_klt(std::stod(s.substr(p.size())));
            } catch (const std::invalid_argument&) {
                break;
            }
        }
    }
    throw DomainError("unknown transform '" + s + "' (expected T1, T3, T13, T16, T17, T18, DCT or KLT<rho>)");
}

/// Forward coefficients of every 8x8 block, block-row-major.
struct BlockCoefficients {
    int width = 0;
    int height = 0;
    std::vector<Eigen::Matrix<double, 8, 8>> blocks;
    double max_energy_deviation = 0.0; ///< max | ||B||_F - ||A||_F |, only meaningful for orthogonal K
};

inline void check_codable(const GrayImage& img)
{
    if (img.width % 8 != 0 || img.height % 8 != 0) {
        throw DomainError("image dimensions " + std::to_string(img.width) + "x" + std::to_string(img.height)
                          + " are not multiples of 8");
    }
}

inline BlockCoefficients forward_blocks(const GrayImage& img, const CodecTransform& t)
{
    check_codable(img);
    const Eigen::Matrix<double, 8, 8> k = t.forward;
    BlockCoefficients out{img.width, img.height, {}, 0.0};
    out.blocks.reserve(static_cast<std::size_t>(img.width / 8) * (img.height / 8));
    Eigen::Matrix<double, 8, 8> a;
    for (int by = 0; by < img.height; by += 8) {
        for (int bx = 0; bx < img.width; bx += 8) {
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    a(y, x) = img.at(bx + x, by + y);
                }
            }
            Eigen::Matrix<double, 8, 8> b = k * a * k.transpose();
            out.max_energy_deviation = std::max(out.max_energy_deviation, std::abs(b.norm() - a.norm()));
            out.blocks.push_back(b);
        }
    }
    return out;
}

inline double round_half_away(double x) { return std::round(x); }

inline std::uint8_t to_pixel(double x) { return static_cast<std::uint8_t>(std::clamp(round_half_away(x), 0.0, 255.0)); }

struct CompressionResult {
    GrayImage image;                 ///< rounded and clamped
    std::vector<double> reconstruction; ///< before rounding, row-major
    double max_energy_deviation = 0.0;
};

/// Keeps the first r zig-zag coefficients of every block and inverts.
inline CompressionResult reconstruct(const BlockCoefficients& c, const CodecTransform& t, int r)
{
    if (r < 1 || r > 64) {
        throw DomainError("retained coefficients r must be in [1, 64], got " + std::to_string(r));
    }
    Eigen::Matrix<double, 8, 8> mask = Eigen::Matrix<double, 8, 8>::Zero();
    const auto zz = zigzag_indices(8);
    for (int i = 0; i < r; ++i) {
        mask(zz[i].first, zz[i].second) = 1.0;
    }
    const Eigen::Matrix<double, 8, 8> inv = t.inverse;
    CompressionResult out{GrayImage(c.width, c.height), std::vector<double>(static_cast<std::size_t>(c.width) * c.height),
                          c.max_energy_deviation};
    std::size_t idx = 0;
    for (int by = 0; by < c.height; by += 8) {
        for (int bx = 0; bx < c.width; bx += 8) {
            const Eigen::Matrix<double, 8, 8> b = c.blocks[idx++].cwiseProduct(mask);
            const Eigen::Matrix<double, 8, 8> a = inv * b * inv.transpose();
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    const std::size_t p = static_cast<std::size_t>(by + y) * c.width + bx + x;
                    out.reconstruction[p] = a(y, x);
                    out.image.pixels[p] = to_pixel(a(y, x));
                }
            }
        }
    }
    return out;
}

inline CompressionResult compress(const GrayImage& img, const CodecTransform& t, int r)
{
    if (r < 1 || r > 64) {
        throw DomainError("retained coefficients r must be in [1, 64], got " + std::to_string(r));
    }
    return reconstruct(forward_blocks(img, t), t, r);
}

// ---- quality -----------------------------------------------------------------------

inline void check_same_size(const GrayImage& a, int w, int h)
{
    if (a.width != w || a.height != h) {
        throw DimensionMismatch("images differ in size");
    }
}

inline double psnr_from_mse(double m)
{
    return m == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(255.0 * 255.0 / m);
}

/// +inf for identical images.
inline double psnr(const GrayImage& a, const GrayImage& b)
{
    check_same_size(a, b.width, b.height);
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        s += d * d;
    }
    return psnr_from_mse(s / static_cast<double>(a.pixels.size()));
}

/// Against an unrounded reconstruction.
inline double psnr(const GrayImage& a, const std::vector<double>& b)
{
    if (b.size() != a.pixels.size()) {
        throw DimensionMismatch("reconstruction size differs from image");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = a.pixels[i] - b[i];
        s += d * d;
    }
    return psnr_from_mse(s / static_cast<double>(b.size()));
}

enum class SsimWindow {
    block8,     ///< non-overlapping 8x8 uniform windows
    gaussian11, ///< sliding 11x11 Gaussian, sigma 1.5, valid region
};

namespace detail {

inline double ssim_local(double mx, double my, double vx, double vy, double cxy)
{
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

inline double mssim_block8(const std::vector<double>& a, const std::vector<double>& b, int w, int h)
{
    double acc = 0.0;
    int count = 0;
    for (int by = 0; by + 8 <= h; by += 8) {
        for (int bx = 0; bx + 8 <= w; bx += 8) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (int y = by; y < by + 8; ++y) {
                for (int x = bx; x < bx + 8; ++x) {
                    const double p = a[static_cast<std::size_t>(y) * w + x];
                    const double q = b[static_cast<std::size_t>(y) * w + x];
                    sa += p;
                    sb += q;
                    saa += p * p;
                    sbb += q * q;
                    sab += p * q;
                }
            }
            const double mx = sa / 64.0, my = sb / 64.0;
            acc += ssim_local(mx, my, saa / 64.0 - mx * mx, sbb / 64.0 - my * my, sab / 64.0 - mx * my);
            ++count;
        }
    }
    return acc / count;
}

inline double mssim_gaussian(const std::vector<double>& a, const std::vector<double>& b, int w, int h)
{
    constexpr int radius = 5;
    constexpr double sigma = 1.5;
    std::array<double, 2 * radius + 1> g{};
    double gs = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        g[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        gs += g[i + radius];
    }
    for (auto& v : g) {
        v /= gs;
    }
    // separable filtering of the five moment images, valid region only
    const int ow = w - 2 * radius;
    const int oh = h - 2 * radius;
    auto filter = [&](auto&& value) {
        std::vector<double> rows(static_cast<std::size_t>(h) * ow);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < ow; ++x) {
                double s = 0.0;
                for (int k = 0; k <= 2 * radius; ++k) {
                    s += g[k] * value(static_cast<std::size_t>(y) * w + x + k);
                }
                rows[static_cast<std::size_t>(y) * ow + x] = s;
            }
        }
        std::vector<double> out(static_cast<std::size_t>(oh) * ow);
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                double s = 0.0;
                for (int k = 0; k <= 2 * radius; ++k) {
                    s += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
                }
                out[static_cast<std::size_t>(y) * ow + x] = s;
            }
        }
        return out;
    };
    const auto ma = filter([&](std::size_t i) { return a[i]; });
    const auto mb = filter([&](std::size_t i) { return b[i]; });
    const auto maa = filter([&](std::size_t i) { return a[i] * a[i]; });
    const auto mbb = filter([&](std::size_t i) { return b[i] * b[i]; });
    const auto mab = filter([&](std::size_t i) { return a[i] * b[i]; });
    double acc = 0.0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        acc += ssim_local(ma[i], mb[i], maa[i] - ma[i] * ma[i], mbb[i] - mb[i] * mb[i], mab[i] - ma[i] * mb[i]);
    }
    return acc / static_cast<double>(ma.size());
}

inline std::vector<double> as_double(const GrayImage& img) { return {img.pixels.begin(), img.pixels.end()}; }

} // namespace detail

inline double mssim(const GrayImage& a, const GrayImage& b, SsimWindow window = SsimWindow::block8)
{
    check_same_size(a, b.width, b.height);
    const int need = window == SsimWindow::block8 ? 8 : 11;
    if (a.width < need || a.height < need) {
        throw DomainError("image smaller than the SSIM window");
    }
    if (a == b) {
        return 1.0;
    }
    const auto da = detail::as_double(a);
    const auto db = detail::as_double(b);
    return window == SsimWindow::block8 ? detail::mssim_block8(da, db, a.width, a.height)
                                        : detail::mssim_gaussian(da, db, a.width, a.height);
}

struct QualityReport {
    double psnr_db = 0.0; ///< +inf when identical
    double mssim = 1.0;
    double psnr_float_db = 0.0;         ///< against the unrounded reconstruction
    double mssim_gaussian = 1.0;        ///< 11x11 Gaussian window variant
};

inline QualityReport quality(const GrayImage& original, const CompressionResult& c)
{
    return {psnr(original, c.image), mssim(original, c.image, SsimWindow::block8), psnr(original, c.reconstruction),
            mssim(original, c.image, SsimWindow::gaussian11)};
}

// ---- sweep --------------------------------------------------------------------------

struct SweepPoint {
    std::string transform;
    int r;
    double mean_psnr;
    double mean_mssim;
    int images;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    int images_used = 0;
    int images_skipped = 0;
    std::vector<std::string> warnings;
};

/// Mean pixel-domain PSNR / MSSIM per transform and r over the readable images.
/// Identical reconstructions (psnr +inf) are averaged as +inf.
inline SweepReport sweep(const std::vector<std::string>& image_paths, const std::vector<CodecTransform>& transforms,
                         int r_min = 1, int r_max = 45)
{
    if (r_min < 1 || r_max > 64 || r_min > r_max) {
        throw DomainError("sweep range must satisfy 1 <= r_min <= r_max <= 64");
    }
    SweepReport rep;
    std::vector<GrayImage> images;
    for (const auto& p : image_paths) {
        try {
            GrayImage img = read_pgm(p);
            check_codable(img);
            images.push_back(std::move(img));
        } catch (const Error& e) {
            ++rep.images_skipped;
            rep.warnings.push_back("skipped " + p + ": " + e.what());
        }
    }
    rep.images_used = static_cast<int>(images.size());
    if (images.empty()) {
        rep.warnings.emplace_back("no readable images; report is empty");
        return rep;
    }
    for (const auto& t : transforms) {
        std::vector<double> ps(r_max + 1, 0.0), ms(r_max + 1, 0.0);
        for (const auto& img : images) {
            const BlockCoefficients c = forward_blocks(img, t);
            for (int r = r_min; r <= r_max; ++r) {
                const CompressionResult res = reconstruct(c, t, r);
                ps[r] += psnr(img, res.image);
                ms[r] += mssim(img, res.image);
            }
        }
        for (int r = r_min; r <= r_max; ++r) {
            const double n = static_cast<double>(images.size());
            rep.points.push_back({t.name, r, ps[r] / n, ms[r] / n, rep.images_used});
        }
    }
    return rep;
}

inline void write_sweep_csv(std::ostream& out, const SweepReport& rep)
{
    out << "transform,r,mean_psnr_db,mean_mssim,images\n";
    char buf[160];
    for (const auto& p : rep.points) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.12g,%.12g,%d\n", p.transform.c_str(), p.r, p.mean_psnr, p.mean_mssim, p.images);
        out << buf;
    }
}

} // namespace kltapprox
