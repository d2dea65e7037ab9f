#include <gtest/gtest.h>

#include <cstdlib>

#include "common.hpp"
#include "ddeu/config.hpp"
#include "ddeu/io.hpp"

using namespace ddeu;

TEST(Config, DefaultsAreMaterialized) {
    const RunConfig c = config_from_json(json::object());
    const json j = to_json(c);
    for (const char* k : {"model", "grid", "orbits", "fan", "classify", "tolerances", "output_dir", "rng_seed"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(c.orbits.size(), 4u);
    EXPECT_EQ(j["tolerances"]["on_curve"].get<double>(), 1e-6);
}

TEST(Config, RoundTripKeepsHash) {
    const RunConfig& c = testing_support::shipped();
    const RunConfig d = config_from_json(json::parse(to_json(c).dump()));
    EXPECT_EQ(config_hash(c), config_hash(d));
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, HashIgnoresOutputAndJobs) {
    RunConfig a = testing_support::shipped(), b = a;
    b.output_dir = "/elsewhere";
    b.jobs = 7;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.K = 10.5;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(config_from_json(json::parse(R"({"modle": {}})")), Error);
    EXPECT_THROW(config_from_json(json::parse(R"({"model": {"K": 10, "kk": 1}})")), Error);
    EXPECT_THROW(config_from_json(json::parse(R"({"grid": {"n": 2}})")), Error);
    EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

TEST(Config, AffineConfigHasNoDefaultOrbits) {
    const RunConfig c = config_from_json(json::parse(R"({"model": {"kind": "AFFINE", "a": 1, "b": 0, "mu": 1}})"));
    EXPECT_TRUE(c.orbits.empty());
}

TEST(Config, AnchorsResolve) {
    const auto eq = equilibria(Nonlinearity::near_step(10.0, 0.1));
    EXPECT_EQ(resolve_anchor("xi_1", eq), eq.at(1));
    EXPECT_EQ(resolve_anchor("0.25", eq), 0.25);
    EXPECT_THROW(resolve_anchor("xi_3", eq), Error);
}

TEST(Io, OutputDirPrecedence) {
    RunConfig c;
    c.output_dir = "from_config";
    ::unsetenv("DDE_UNSTABLE_OUT");
    EXPECT_EQ(resolve_output_dir(c, std::nullopt), "from_config");
    ::setenv("DDE_UNSTABLE_OUT", "from_env", 1);
    EXPECT_EQ(resolve_output_dir(c, std::nullopt), "from_env");
    EXPECT_EQ(resolve_output_dir(c, std::string("from_flag")), "from_flag");
    ::unsetenv("DDE_UNSTABLE_OUT");
}

TEST(Io, SeventeenDigits) {
    EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
    const std::string s = dump17(json{{"x", 1.0 / 3.0}, {"v", {1.5, 2.0}}}, 0);
    EXPECT_EQ(s, R"({"x":0.33333333333333331,"v":[1.5, 2]})");
}

TEST(Io, CsvCarriesHash) {
    CsvWriter w("abc", "t,x");
    w.row(std::vector<double>{0.5, 1.0 / 3.0});
    EXPECT_EQ(w.text(), "# config_hash=abc\nt,x\n0.5,0.33333333333333331\n");
}
