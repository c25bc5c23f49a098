#include "wigkit/scenario.hpp"
#include "wigkit/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

json default_config(const std::string& scenario) {
    if (scenario == "steer-sweep")
        return json{{"scenario", "steer-sweep"}, {"sweep", "eta"}, {"r", 0.7},
                    {"steps", 20},               {"from", 0.0},    {"to", 1.0}};
    if (scenario == "counterexample")
        return json{{"scenario", "counterexample"},
                    {"t", 1.0},
                    {"grid_points", 21},
                    {"grid_half_width", 4.0},
                    {"max_fock", 30}};
    if (scenario == "remote-negativity")
        return json{{"scenario", "remote-negativity"},
                    {"state", {{"kind", "fock_mixture"}, {"t", 1.0}}},
                    {"herald", {{"kind", "fock"}, {"level", 1}}},
                    {"grid", {{"points", 128}, {"half_width", 0.0}}}};
    if (scenario == "chain-audit")
        return json{{"scenario", "chain-audit"},
                    {"state", {{"kind", "tmsv"}, {"r", 0.5}}},
                    {"tol", 1e-4}};
    return json{{"scenario", "field-dump"},
                {"state", {{"kind", "tmsv"}, {"r", 0.5}}},
                {"target", "alice"},
                {"grid", {{"points", 96}, {"half_width", 0.0}}}};
}

// User values override defaults key by key; nested objects merge recursively.
void deep_merge(json& base, const json& over) {
    if (!over.is_object() || !base.is_object()) {
        base = over;
        return;
    }
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (base.contains(it.key()))
            deep_merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

struct Opts {
    std::string config_path;
    std::string out_dir;
    int grid_n = 0;
    double grid_l = 0.0;
    int seed = -1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space steering toolkit"};
    app.set_version_flag("--version", std::string("wigkit ") + wigkit::version);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> scenarios{
        {"steer-sweep", "sweep a Gaussian family and track the steering flags"},
        {"counterexample", "separable mixture with unphysical conditionals everywhere"},
        {"remote-negativity", "herald a Bob outcome and measure Alice's negativity"},
        {"chain-audit", "check the variance ordering on one state"},
        {"field-dump", "render a Wigner function to disk"}};
    std::map<std::string, Opts> opts;
    for (const auto& [name, desc] : scenarios) {
        CLI::App* sub = app.add_subcommand(name, desc);
        Opts& o = opts[name];
        sub->add_option("--config", o.config_path, "JSON config merged over the defaults");
        sub->add_option("--out", o.out_dir, "output directory")->required();
        sub->add_option("--grid-n", o.grid_n, "grid points per axis override");
        sub->add_option("--grid-l", o.grid_l, "grid half-width override");
        sub->add_option("--seed", o.seed, "seed recorded in the manifest");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const Opts& o = opts[name];

    json cfg = default_config(name);
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            std::cerr << "wigkit: cannot open config " << o.config_path << "\n";
            return wigkit::exit_config;
        }
        json user;
        try {
            user = json::parse(in);
        } catch (const std::exception& e) {
            std::cerr << "wigkit: bad config: " << e.what() << "\n";
            return wigkit::exit_config;
        }
        deep_merge(cfg, user);
    }
    cfg["scenario"] = name;  // the subcommand always wins
    if (o.grid_n > 0) {
        if (name == "counterexample")
            cfg["grid_points"] = o.grid_n;
        else
            cfg["grid"]["points"] = o.grid_n;
    }
    if (o.grid_l > 0) {
        if (name == "counterexample")
            cfg["grid_half_width"] = o.grid_l;
        else
            cfg["grid"]["half_width"] = o.grid_l;
    }
    if (o.seed >= 0) cfg["seed"] = o.seed;

    const wigkit::ScenarioResult res = wigkit::run_scenario(cfg, o.out_dir);
    if (res.exit_code == 0)
        std::cout << res.message << "\n";
    else
        std::cerr << "wigkit: " << res.message << "\n";
    return res.exit_code;
}
