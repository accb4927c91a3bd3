#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ballquad/io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = ballquad::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("ballquad_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string slurp(const std::string& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"nodes", "-o", path("x.txt")}).code, 2);       // neither --N nor --h
    EXPECT_EQ(run({"nodes", "--family", "quasi", "--N", "100"}).code, 2);  // no output
    EXPECT_EQ(run({"nodes", "--family", "grid", "--N", "100", "-o", path("x.txt")}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, HaltonNodesRespectFilter)
{
    const auto r = run({"nodes", "--family", "halton", "--h", "0.1", "-o", path("h.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto nodes = ballquad::read_nodes(fs::path(path("h.txt")));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes.on_surface[i]) {
            EXPECT_LE(ballquad::norm(nodes.points[i]), nodes.ball.radius - 0.01 + 1e-12);
        }
    }
    EXPECT_NE(r.out.find("surface"), std::string::npos);
}

TEST_F(Cli, PipelineAndExitCodes)
{
    ASSERT_EQ(run({"nodes", "--family", "quasi", "--N", "800", "-o", path("n.txt")}).code, 0);
    const auto nodes = ballquad::read_nodes(fs::path(path("n.txt")));
    EXPECT_NEAR(double(nodes.size()), 800.0, 80.0);

    const auto w = run({"weights", "--nodes", path("n.txt"), "-o", path("w.txt")});
    ASSERT_EQ(w.code, 0) << w.err;
    EXPECT_NE(w.out.find("volume_defect"), std::string::npos);
    ASSERT_EQ(run({"weights", "--nodes", path("n.txt"), "-o", path("w2.txt"), "--threads", "3"}).code, 0);
    EXPECT_EQ(slurp(path("w.txt")), slurp(path("w2.txt")));

    const auto bad = run({"weights", "--nodes", path("n.txt"), "-o", path("w3.txt"), "--m", "2", "--n", "9"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("(m+1)(m+2)(m+3)/6"), std::string::npos);
    // n = M passes the pre-flight check (the solve itself may still hit a singular stencil)
    const auto edge = run({"weights", "--nodes", path("n.txt"), "-o", path("w4.txt"), "--m", "2", "--n", "10"});
    EXPECT_NE(edge.code, 2);
    EXPECT_EQ(edge.err.find("(m+1)(m+2)(m+3)/6"), std::string::npos);

    const auto one = run({"integrate", "--weights", path("w.txt"), "--integrand", "const"});
    ASSERT_EQ(one.code, 0);
    EXPECT_NE(one.out.find("value 1"), std::string::npos);

    {
        std::ofstream s(path("s.txt"));
        s << "1\n2\n";
    }
    EXPECT_EQ(run({"integrate", "--weights", path("w.txt"), "--samples", path("s.txt")}).code, 2);
    EXPECT_EQ(run({"integrate", "--weights", path("missing.txt"), "--integrand", "f2"}).code, 2);

    const auto tess = run({"tessellate", "--nodes", path("n.txt"), "-o", path("t.txt")});
    EXPECT_EQ(tess.code, 0);
    EXPECT_NE(slurp(path("t.txt")).find("# boundary"), std::string::npos);
}

TEST_F(Cli, ThreadEnvironmentOverride)
{
    ASSERT_EQ(run({"nodes", "--family", "halton", "--N", "400", "-o", path("n.txt")}).code, 0);
    ::setenv("BALLQUAD_THREADS", "bogus", 1);
    EXPECT_EQ(run({"weights", "--nodes", path("n.txt"), "-o", path("w.txt")}).code, 2);
    ::setenv("BALLQUAD_THREADS", "2", 1);
    EXPECT_EQ(run({"weights", "--nodes", path("n.txt"), "-o", path("w.txt")}).code, 0);
    ::unsetenv("BALLQUAD_THREADS");
}

TEST_F(Cli, CoefficientsAndCsv)
{
    const auto c = run({"f1-coeffs", "--seed", "3", "--degree", "2"});
    ASSERT_EQ(c.code, 0);
    std::istringstream in(c.out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 10);
    const auto conv = run({"convergence", "--family", "halton", "--N", "300,600", "--integrand", "const"});
    ASSERT_EQ(conv.code, 0) << conv.err;
    EXPECT_EQ(conv.out.rfind("N,error,seconds\n", 0), 0u);
    const auto bench = run({"bench", "--family", "halton", "--N", "300,600", "-o", path("b.csv")});
    ASSERT_EQ(bench.code, 0) << bench.err;
    EXPECT_NE(bench.out.find("exponent"), std::string::npos);
    EXPECT_EQ(slurp(path("b.csv")).rfind("N,error,seconds\n", 0), 0u);
}
