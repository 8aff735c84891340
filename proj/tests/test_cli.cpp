#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rearr/cli.hpp"

using namespace rearr;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"({
  "dimension": 2,
  "series": "alternating_rsqrt",
  "targets": {
    "1 2": {"kind": "constant", "value": 1.0},
    "2 1": {"kind": "constant", "value": -1.0}
  },
  "budget": {"depth": 2, "slab_budget": 2000},
  "tolerance": 0.05,
  "split_horizon": 10000
})";

fs::path fresh_dir(const std::string& tag) {
    auto d = fs::temp_directory_path() / ("rearr_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

int run_binary(const std::string& args) {
    std::string cmd = std::string(REARR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("minimal build then verify: exit 0 and two CSV artifacts") {
    auto config = parse_config_text(kMinimalConfig);
    auto dir = fresh_dir("build_verify");
    CHECK(run(config, "build", dir.string()) == kExitOk);
    CHECK(run(config, "verify", dir.string()) == kExitOk);
    CHECK(fs::exists(dir / "build.csv"));
    CHECK(fs::exists(dir / "verify.csv"));

    auto verify_text = slurp(dir / "verify.csv");
    CHECK(verify_text.substr(0, verify_text.find('\n')) == "sigma,k,measured,target,bound,pass");
    CHECK(line_count(verify_text) == 1 + 2 * 2);  // header + 2 perms x 2 prefixes
}

TEST_CASE("a permutation without target and without default is a config error") {
    const char* broken = R"({
      "dimension": 2,
      "targets": {"1 2": {"kind": "constant", "value": 1.0}}
    })";
    CHECK_THROWS_AS(parse_config_text(broken), ConfigError);
}

TEST_CASE("split emits exactly horizon rows") {
    auto config = parse_config_text(kMinimalConfig);
    auto dir = fresh_dir("split");
    CHECK(run(config, "split", dir.string()) == kExitOk);
    auto text = slurp(dir / "split.csv");
    CHECK(line_count(text) == 1 + 10000);
    CHECK(text.substr(0, text.find('\n')) == "m,t,a_m");
}

TEST_CASE("identical configs produce bit-identical artifacts") {
    auto config = parse_config_text(kMinimalConfig);
    auto d1 = fresh_dir("det1");
    auto d2 = fresh_dir("det2");
    for (const char* cmd : {"split", "build", "verify"}) {
        CHECK(run(config, cmd, d1.string()) == kExitOk);
        CHECK(run(config, cmd, d2.string()) == kExitOk);
    }
    for (const char* name : {"split.csv", "build.csv", "verify.csv"})
        CHECK(slurp(d1 / name) == slurp(d2 / name));
}

TEST_CASE("finite inline sources starve the build: exit 3") {
    std::string cfg = R"({
      "dimension": 2,
      "series": {"inline": [)";
    for (int i = 1; i <= 400; ++i) {
        if (i > 1) cfg += ",";
        double v = (i % 2 ? 1.0 : -1.0) / std::sqrt(double(i));
        cfg += std::to_string(v);
    }
    cfg += R"(]},
      "targets": {"default": {"kind": "constant", "value": 0.3}},
      "budget": {"depth": 1, "slab_budget": 500},
      "witness": {"horizon": 400, "bound": 2.0}
    })";
    auto config = parse_config_text(cfg);
    auto dir = fresh_dir("starve");
    CHECK(run(config, "build", dir.string()) == kExitStarvation);
}

TEST_CASE("an unreachable tolerance yields a verification failure exit") {
    auto config = parse_config_text(kMinimalConfig);
    auto dir = fresh_dir("tightverify");
    CHECK(run(config, "verify", dir.string(), 1e-15) == kExitVerification);
}

TEST_CASE("absurd quadrature tolerance maps to the quadrature exit code") {
    std::string cfg = R"({
      "dimension": 2,
      "targets": {
        "1 2": {"kind": "extended", "value": 1.0},
        "2 1": {"kind": "extended", "value": -1.0}
      },
      "budget": {"depth": 1, "slab_budget": 300},
      "fubini": {"quad_tol": 1e-30, "box_prefixes": 1}
    })";
    auto config = parse_config_text(cfg);
    auto dir = fresh_dir("quadfail");
    CHECK(run(config, "fubini", dir.string()) == kExitQuadrature);
}

TEST_CASE("fubini writes the order/box schedule") {
    std::string cfg = R"({
      "dimension": 2,
      "targets": {
        "1 2": {"kind": "extended", "value": 2.0},
        "2 1": {"kind": "extended", "value": -1.0}
      },
      "budget": {"depth": 2, "slab_budget": 1500},
      "fubini": {"quad_tol": 1e-6, "box_prefixes": 2}
    })";
    auto config = parse_config_text(cfg);
    auto dir = fresh_dir("fubini");
    CHECK(run(config, "fubini", dir.string()) == kExitOk);
    auto text = slurp(dir / "fubini.csv");
    CHECK(line_count(text) == 1 + 2 * 2);  // header + 2 orders x 2 boxes
    CHECK(text.substr(0, text.find('\n')) == "sigma,box,quadrature,coefficient_sum");
}

TEST_CASE("unknown command is a config-family failure") {
    auto config = parse_config_text(kMinimalConfig);
    CHECK(run(config, "frobnicate", fresh_dir("cmd").string()) == kExitConfig);
}

TEST_CASE("binary: bad config file exits with code 2") {
    auto dir = fresh_dir("bin_badcfg");
    auto cfg = dir / "bad.json";
    std::ofstream(cfg) << "{not json";
    CHECK(run_binary("--config " + cfg.string() + " --command build --out " + dir.string()) == 2);
}

TEST_CASE("binary: build and verify round trip") {
    auto dir = fresh_dir("bin_ok");
    auto cfg = dir / "config.json";
    std::ofstream(cfg) << kMinimalConfig;
    CHECK(run_binary("--config " + cfg.string() + " --command build --out " + dir.string()) == 0);
    CHECK(run_binary("--config " + cfg.string() + " --command verify --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "build.csv"));
    CHECK(fs::exists(dir / "verify.csv"));
}
