// Runs the klta binary end to end.

#include "json.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliRun {
    int code;
    std::string out;
};

CliRun klta(const std::string& args)
{
    const std::string cmd = std::string(KLTA_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) {
        return {-1, ""};
    }
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) {
        out.append(buf.data(), n);
    }
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch_dir()
{
    const auto d = std::filesystem::temp_directory_path() / "klta_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

} // namespace

TEST(Cli, GenKltCsv)
{
    const CliRun r = klta("gen-klt --rho 0.8");
    ASSERT_EQ(r.code, 0);
    int lines = 0;
    for (char c : r.out) {
        lines += c == '\n';
    }
    EXPECT_EQ(lines, 8);
    EXPECT_EQ(r.out.substr(0, 8), "0.296294");
}

TEST(Cli, GenKltBadRho)
{
    EXPECT_EQ(klta("gen-klt --rho 1.5").code, 2);
    EXPECT_NE(klta("gen-klt").code, 0);
}

TEST(Cli, EvalJson)
{
    const CliRun r = klta("eval --transform T16 --rho 0.8");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["cg_db"].get<double>(), 3.8484, 1e-3);
    EXPECT_NEAR(j["epsilon"].get<double>(), 0.2418, 1e-3);
    EXPECT_EQ(j["orthogonal"].get<bool>(), false);
    EXPECT_NEAR(j["cg_db_inverse_synthesis"].get<double>(), 3.7243, 1e-3);
}

TEST(Cli, EvalSingleMerit)
{
    const CliRun r = klta("eval --transform T1 --rho 0.1 --merit eta");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.out), 93.4298, 1e-3);
    EXPECT_EQ(klta("eval --transform T2 --rho 0.1").code, 2);
}

TEST(Cli, VerifyAll)
{
    const CliRun r = klta("verify --transform all --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("T1,pass,24,0,3,1000,0,"), std::string::npos);
    EXPECT_NE(r.out.find("T18,pass,26,12,"), std::string::npos);
}

TEST(Cli, VerifyCorruptedExpectation)
{
    const auto path = scratch_dir() / "bad.csv";
    {
        std::ofstream f(path);
        // T1 with one entry flipped
        f << "0,1,1,1,1,1,1,0\n1,1,1,0,0,-1,-1,-1\n1,1,0,-1,-1,0,1,1\n1,0,-1,-1,1,1,0,-1\n"
             "1,0,-1,1,1,-1,0,1\n1,-1,0,1,-1,0,1,-1\n1,-1,1,0,0,1,-1,1\n0,-1,1,-1,1,-1,1,1\n";
    }
    const CliRun r = klta("verify --transform T1 --expect " + path.string());
    EXPECT_EQ(r.code, 1);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_EQ(j["results"][0]["first_mismatch"]["row"].get<int>(), 7);
    EXPECT_EQ(j["results"][0]["first_mismatch"]["col"].get<int>(), 7);
}

TEST(Cli, SearchCoarse)
{
    const auto out = scratch_dir() / "search.json";
    const CliRun r = klta("search --seed 1 --alpha-step 0.5 --out " + out.string());
    ASSERT_EQ(r.code, 0);
    std::ifstream f(out);
    const auto j = nlohmann::json::parse(f);
    EXPECT_TRUE(j.contains("shortlist"));
    EXPECT_NE(klta("search --alpha-step 0.5").code, 0);
}

TEST(Cli, CompressAndSweep)
{
    const auto dir = scratch_dir();
    const auto in = dir / "flat.pgm";
    {
        std::ofstream f(in, std::ios::binary);
        f << "P5\n16 16\n255\n";
        for (int i = 0; i < 256; ++i) {
            f.put(static_cast<char>(i));
        }
    }
    const auto rec = dir / "rec.pgm";
    CliRun r = klta("compress --in " + in.string() + " --transform DCT --r 64 --image-out " + rec.string());
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["psnr_db"].get<std::string>(), "inf");
    EXPECT_TRUE(std::filesystem::exists(rec));

    r = klta("compress --in " + in.string() + " --transform T16 --r 10 --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, 10), "transform,");

    r = klta("sweep --images " + in.string() + " --transform DCT T1 --r-min 1 --r-max 3");
    ASSERT_EQ(r.code, 0);
    int lines = 0;
    for (char c : r.out) {
        lines += c == '\n';
    }
    EXPECT_EQ(lines, 7);

    EXPECT_EQ(klta("compress --in /nonexistent.pgm --transform DCT").code, 2);
}
