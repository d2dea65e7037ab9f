#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddeu/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = DDEU_CLI;
const std::string src = DDEU_SOURCE_DIR;

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ddeu_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) { return std::system((cli + " " + args + " > /dev/null 2>&1").c_str()); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, SimulateAffineOracle) {
    const fs::path out = scratch("sim");
    ASSERT_EQ(run("--config " + src + "/configs/affine_oracle.json --out " + out.string() + " simulate"), 0);
    std::ifstream in(out / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# config_hash=", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "t,x");
    bool found = false;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        const double t = std::stod(line.substr(0, c)), x = std::stod(line.substr(c + 1));
        if (std::abs(t - 1.0) < 1e-12) {
            EXPECT_NEAR(x, 2.0 * std::exp(-1.0), 1e-5);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(Cli, FindOrbitIsByteIdentical) {
    const fs::path a = scratch("orb_a"), b = scratch("orb_b");
    const std::string cfg = "--config " + src + "/configs/shipped.json ";
    ASSERT_EQ(run(cfg + "--out " + a.string() + " find-orbit --label P"), 0);
    ASSERT_EQ(run(cfg + "--out " + b.string() + " --jobs 2 find-orbit --label P"), 0);
    const std::string x = slurp(a / "orbit_P.json");
    EXPECT_FALSE(x.empty());
    EXPECT_EQ(x, slurp(b / "orbit_P.json"));
    const auto j = ddeu::json::parse(x);
    EXPECT_EQ(j.begin().key(), "config_hash");
    EXPECT_TRUE(j.contains("floquet"));
    // nodes on [-1, omega]
    const auto n = j["n"].get<std::size_t>();
    EXPECT_EQ(j["samples"].size(), n + static_cast<std::size_t>(std::floor(j["omega"].get<double>() * n)) + 1);
}

TEST(Cli, EquilibriaReport) {
    const fs::path out = scratch("eq");
    ASSERT_EQ(run("--out " + out.string() + " equilibria"), 0);
    const auto j = ddeu::json::parse(slurp(out / "equilibria.json"));
    EXPECT_EQ(j["xi"].size(), 5u);
    EXPECT_EQ(j["stability"][1], "UNSTABLE");
    EXPECT_TRUE(fs::exists(out / "config.json"));
}

TEST(Cli, EnvironmentSetsOutput) {
    const fs::path out = scratch("env");
    const std::string cmd = "DDE_UNSTABLE_OUT=" + out.string() + " " + cli + " equilibria > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(out / "equilibria.json"));
}

TEST(Cli, ErrorsAreJsonOnStderr) {
    const fs::path out = scratch("err");
    const fs::path cfg = out / "bad.json";
    std::ofstream(cfg) << R"({"grid": {"n": 1}})";
    const std::string cmd = cli + " --config " + cfg.string() + " --out " + out.string() + " equilibria 2> " +
                            (out / "stderr.txt").string() + " > /dev/null";
    EXPECT_NE(std::system(cmd.c_str()), 0);
    const auto j = ddeu::json::parse(slurp(out / "stderr.txt"));
    EXPECT_EQ(j["error"], "INVALID_CONFIG");
}
