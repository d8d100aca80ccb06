#include "bihar/config.hpp"
#include "bihar/fourier.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace bihar;
namespace fs = std::filesystem;

namespace {

struct Proc {
    int code;
    std::string out;
};

// runs the CLI with stderr folded into the captured output
Proc biharlab(const std::string& args) {
    const std::string cmd = std::string(BIHARLAB_EXE) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("biharlab_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }

private:
    fs::path path_;
    static inline int counter_ = 0;
};

const char* small_gauge = R"(experiment: gauge-check
grid:
  dim: 2
  lo: -0.5
  hi: 0.5
  n: [16, 32]
checks: [order]
)";

std::string config_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ParsesSmallGaugeConfig) {
    const ExperimentConfig c = parse_config_text(small_gauge);
    EXPECT_EQ(c.kind, ExperimentKind::gauge_check);
    EXPECT_EQ(c.grid.dim, 2);
    EXPECT_EQ(c.grid.n, (std::vector<int>{16, 32}));
    EXPECT_EQ(c.checks, std::vector<std::string>{"order"});
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_NE(config_error("experiment: forward\n").find("grid"), std::string::npos);
    EXPECT_NE(config_error(std::string(small_gauge) + "colour: red\n").find("colour"), std::string::npos);
    EXPECT_NE(config_error("experiment: forward\ngrid: {dim: 4, lo: 0, hi: 1, n: 16}\n").find("grid.dim"),
              std::string::npos);
    EXPECT_NE(config_error("experiment: forward\ngrid: {dim: 2, lo: 1, hi: 0, n: 16}\n").find("grid"), std::string::npos);
    EXPECT_NE(config_error("experiment: forward\ngrid: {dim: 2, lo: 0, hi: 1, n: 4}\n").find("grid.n"), std::string::npos);
    EXPECT_NE(config_error("experiment: teleport\ngrid: {dim: 2, lo: 0, hi: 1, n: 16}\n").find("experiment"),
              std::string::npos);
    EXPECT_NE(config_error(std::string(small_gauge) + "sweep: {h: [0.9]}\n").find("sweep.h"), std::string::npos);
    EXPECT_NE(config_error(std::string(small_gauge) + "sweep: {tau: [-1]}\n").find("sweep.tau"), std::string::npos);
    EXPECT_NE(config_error(std::string(small_gauge) + "coefficients:\n  - family: spiral\n").find("coefficients[0]"),
              std::string::npos);
}

TEST(Config, CatalogHasSevenKinds) {
    EXPECT_EQ(experiment_catalog().size(), 7u);
    for (const auto& e : experiment_catalog()) EXPECT_EQ(kind_name(e.kind), e.name);
}

TEST(Coefficients, HessianFamilyMatchesSpectralHessian) {
    // narrow enough that the periodic extension is smooth to roundoff
    const Grid g = Grid::cube(3, -1.0, 1.0, 48);
    CoefficientSpec s;
    s.family = "hessian";
    s.amplitude = 0.3;
    s.width = 0.12;
    const BuiltCoefficients b = build_coefficients(g, {s});
    EXPECT_TRUE(b.structured);
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            const CVec want = spectral_d1(g, spectral_d1(g, b.p.v, k), j);
            EXPECT_LE((b.c.A.at(j, k) - want).cwiseAbs().maxCoeff(), 1e-6 * b.c.A.at(j, j).cwiseAbs().maxCoeff());
        }
}

TEST(Coefficients, GaussianAOnlyFeedsDSharp) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 16);
    CoefficientSpec s;
    s.family = "gaussian-bump";
    s.target = "A";
    const BuiltCoefficients b = build_coefficients(g, {s});
    EXPECT_TRUE(b.structured);
    EXPECT_EQ((b.c.A.at(1, 1) - b.d_sharp.v).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(b.c.A.at(0, 1).cwiseAbs().maxCoeff(), 0.0);
    s.target = "A01";
    EXPECT_FALSE(build_coefficients(g, {s}).structured);
}

TEST(Cli, ListExperiments) {
    const Proc r = biharlab("list-experiments");
    EXPECT_EQ(r.code, 0);
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    EXPECT_EQ(lines, 7);
    const Proc j = biharlab("list-experiments --json");
    ASSERT_EQ(j.code, 0);
    const auto doc = nlohmann::json::parse(j.out);
    ASSERT_EQ(doc.size(), 7u);
    EXPECT_TRUE(doc[0].contains("checks"));
}

TEST(Cli, BadArgumentsExitNonzero) {
    EXPECT_NE(biharlab("--frobnicate").code, 0);
    EXPECT_NE(biharlab("").code, 0);
    EXPECT_NE(biharlab("run /nonexistent/config.yaml").code, 0);
}

TEST(Cli, ConfigErrorExitsOne) {
    TempDir d;
    const Proc r = biharlab("run " + d.write("bad.yaml", "experiment: forward\n").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("grid"), std::string::npos) << r.out;
}

TEST(Cli, RunIsDeterministic) {
    TempDir d;
    const fs::path cfg = d.write("g.yaml", small_gauge);
    const Proc a = biharlab("run " + cfg.string() + " --out " + (d.path() / "a").string());
    const Proc b = biharlab("run " + cfg.string() + " --out " + (d.path() / "b").string());
    ASSERT_EQ(a.code, 0) << a.out;
    ASSERT_EQ(b.code, 0) << b.out;
    const std::string ja = slurp(d.path() / "a" / "results.json");
    EXPECT_FALSE(ja.empty());
    EXPECT_EQ(ja, slurp(d.path() / "b" / "results.json"));
    EXPECT_TRUE(fs::exists(d.path() / "a" / "timings.json"));
    const std::string summary = slurp(d.path() / "a" / "summary.txt");
    EXPECT_NE(summary.find("status PASS"), std::string::npos) << summary;
    const auto doc = nlohmann::json::parse(ja);
    EXPECT_FALSE(doc.contains("timings"));
}

TEST(Cli, FailedToleranceExitsThree) {
    TempDir d;
    const fs::path cfg = d.write("g.yaml", std::string(small_gauge) + "tolerances:\n  gauge_order_2d.lo: 5.0\n");
    const Proc r = biharlab("run " + cfg.string() + " --out " + (d.path() / "o").string());
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(slurp(d.path() / "o" / "summary.txt").find("status FAIL"), std::string::npos);
}

TEST(Cli, UnknownToleranceNameRejected) {
    TempDir d;
    const fs::path cfg = d.write("g.yaml", std::string(small_gauge) + "tolerances:\n  no_such_check: 1.0\n");
    EXPECT_EQ(biharlab("run " + cfg.string() + " --out " + (d.path() / "o").string()).code, 1);
}

TEST(Cli, TolScaleWidensWindows) {
    TempDir d;
    // order ~2 lies outside [2.2, 2.6] but inside the window stretched by 4
    const fs::path cfg = d.write("g.yaml", std::string(small_gauge) +
                                               "tolerances:\n  gauge_order_2d.lo: 2.2\n  gauge_order_2d: 2.6\n");
    EXPECT_EQ(biharlab("run " + cfg.string() + " --out " + (d.path() / "a").string()).code, 3);
    EXPECT_EQ(biharlab("run " + cfg.string() + " --tol-scale 4 --out " + (d.path() / "b").string()).code, 0);
    EXPECT_NE(biharlab("run " + cfg.string() + " --tol-scale -1").code, 0);
}

TEST(Cli, NumericalFailureExitsTwoWithStage) {
    TempDir d;
    const fs::path cfg = d.write("t.yaml", R"(experiment: decay-study
grid: {dim: 2, lo: -0.59, hi: 0.59, n: 32}
sweep:
  tau: [0.0001, 0.001]
params:
  plane_n: 16
checks: [amplitude]
)");
    const Proc r = biharlab("run " + cfg.string() + " --out " + (d.path() / "o").string());
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("stage"), std::string::npos) << r.out;
}

TEST(Config, ShippedConfigsParse) {
    int count = 0;
    for (const auto& e : fs::directory_iterator(CONFIG_DIR)) {
        if (e.path().extension() != ".yaml") continue;
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++count;
    }
    EXPECT_GE(count, 7);
}
