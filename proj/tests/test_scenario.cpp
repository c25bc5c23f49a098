#include <doctest.h>

#include "wigkit/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace wigkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "wigkit-scenario-tests" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

}  // namespace

TEST_CASE("malformed configs are rejected with the config exit code") {
    const fs::path out = fresh_dir("bad-config");
    CHECK(run_scenario(json{{"scenario", "no-such-scenario"}}, out.string())
              .exit_code == exit_config);
    CHECK(run_scenario(json::object(), out.string()).exit_code == exit_config);
    CHECK(run_scenario(json{{"scenario", "steer-sweep"}, {"sweep", "bogus"}},
                       out.string())
              .exit_code == exit_config);
}

TEST_CASE("the chain audit writes a manifest and a report") {
    const fs::path out = fresh_dir("chain-audit");
    const ScenarioResult res =
        run_scenario(json{{"scenario", "chain-audit"}}, out.string());
    REQUIRE(res.exit_code == exit_ok);

    const json manifest = load_json(out / "manifest.json");
    CHECK(manifest.at("scenario") == "chain-audit");
    CHECK(manifest.at("tool") == "wigkit");
    CHECK(manifest.contains("version"));
    CHECK(manifest.at("config").at("scenario") == "chain-audit");

    const json report = load_json(out / "report.json");
    CHECK(report.at("scenario") == "chain-audit");
    CHECK(report.at("chain").at("chain_ok") == true);
    CHECK(res.report.at("chain").at("chain_ok") == true);
}

TEST_CASE("heralding a gaussian product state fails the negativity assertion") {
    const fs::path out = fresh_dir("remote-positive");
    json cfg = {
        {"scenario", "remote-negativity"},
        {"state",
         {{"kind", "product_gaussian"},
          {"alice_cov", {{2.0, 0.0}, {0.0, 0.5}}},
          {"bob_cov", {{3.0, 0.0}, {0.0, 3.0}}}}},
        {"herald", {{"kind", "fock"}, {"level", 0}}},
    };
    const ScenarioResult res = run_scenario(cfg, out.string());
    CHECK(res.exit_code == exit_assertion);

    // with the expectation inverted the same run passes and reports its floor
    const fs::path out2 = fresh_dir("remote-positive-ok");
    cfg["expect_negative"] = false;
    const ScenarioResult res2 = run_scenario(cfg, out2.string());
    REQUIRE(res2.exit_code == exit_ok);
    CHECK(res2.report.at("negativity").at("min_value").get<double>() >= -1e-9);
}

TEST_CASE("the squeezing sweep accepts the r parameterization") {
    const fs::path out = fresh_dir("sweep-r");
    const json cfg = {{"scenario", "steer-sweep"}, {"sweep", "r"},
                      {"from", 0.0},           {"to", 1.0},
                      {"steps", 6}};
    const ScenarioResult res = run_scenario(cfg, out.string());
    REQUIRE(res.exit_code == exit_ok);
    CHECK(fs::exists(out / "sweep.csv"));
    const json report = load_json(out / "report.json");
    CHECK(report.at("steps") == 6);
    // r = 0 is the unsteerable product point; every flag flips above it
    CHECK(report.at("flip_index") == 1);
}

TEST_CASE("dumped fields round-trip into the other scenarios") {
    const fs::path dump = fresh_dir("field-dump");
    const json dump_cfg = {{"scenario", "field-dump"},
                           {"state", {{"kind", "tmsv"}, {"r", 0.3}}},
                           {"target", "joint"},
                           {"grid", {{"points", 24}}}};
    const ScenarioResult dumped = run_scenario(dump_cfg, dump.string());
    REQUIRE(dumped.exit_code == exit_ok);

    const json manifest = load_json(dump / "manifest.json");
    CHECK(manifest.at("scenario") == "field-dump");
    const json report = load_json(dump / "report.json");
    const std::string field_file = report.at("files").at(0).get<std::string>();
    const fs::path field_path = dump / field_file;
    REQUIRE(fs::exists(field_path));

    const fs::path audit = fresh_dir("field-audit");
    const json audit_cfg = {
        {"scenario", "chain-audit"},
        {"state", {{"kind", "field"}, {"path", field_path.string()}}},
        {"tol", 0.05}};
    const ScenarioResult res = run_scenario(audit_cfg, audit.string());
    CHECK(res.exit_code == exit_ok);
    CHECK(res.report.at("chain").at("chain_ok") == true);
}
