#include "wigkit/scenario.hpp"

#include "wigkit/conditional.hpp"
#include "wigkit/field_io.hpp"
#include "wigkit/steering.hpp"
#include "wigkit/version.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace wigkit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad or contradictory configuration: exit code 3.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scenario-level invariant failed on otherwise valid input: exit code 2.
struct assertion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

Eigen::Vector2d vec2_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw config_error(std::string(what) + " must be a 2-element array");
    return Eigen::Vector2d(j[0].get<double>(), j[1].get<double>());
}

Eigen::Matrix2d mat2_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw config_error(std::string(what) + " must be a 2x2 array");
    Eigen::Matrix2d m;
    for (int r = 0; r < 2; ++r) {
        if (!j[r].is_array() || j[r].size() != 2)
            throw config_error(std::string(what) + " must be a 2x2 array");
        for (int c = 0; c < 2; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

JointState build_joint(const json& s) {
    if (!s.is_object() || !s.contains("kind"))
        throw config_error("state needs a \"kind\" string");
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "tmsv") {
        GaussianState g = make_tmsv(s.value("r", 0.5));
        if (s.contains("eta")) g = attenuate(g, s.at("eta").get<double>());
        return JointState(std::move(g));
    }
    if (kind == "product_gaussian") {
        const Eigen::Matrix2d va =
            s.contains("alice_cov") ? mat2_from(s.at("alice_cov"), "alice_cov")
                                    : Eigen::Matrix2d::Identity();
        const Eigen::Matrix2d vb =
            s.contains("bob_cov") ? mat2_from(s.at("bob_cov"), "bob_cov")
                                  : Eigen::Matrix2d::Identity();
        Eigen::VectorXd ma, mb;
        if (s.contains("alice_mean")) ma = vec2_from(s.at("alice_mean"), "alice_mean");
        if (s.contains("bob_mean")) mb = vec2_from(s.at("bob_mean"), "bob_mean");
        return JointState(make_product(va, vb, ma, mb));
    }
    if (kind == "gaussian") return JointState(GaussianState::from_json(s));
    if (kind == "fock_mixture") {
        if (s.contains("weights"))
            return JointState(FockMixtureState(s.at("weights").get<std::vector<double>>()));
        const double t = s.value("t", 1.0);
        const int cutoff =
            s.contains("cutoff") ? s.at("cutoff").get<int>() : thermal_default_cutoff(t);
        return JointState(thermal_weights(t, cutoff));
    }
    if (kind == "field") {
        if (!s.contains("path")) throw config_error("field state needs \"path\"");
        WignerField f = load_field(s.at("path").get<std::string>());
        ModeLayout layout{s.value("alice_modes", 1), s.value("bob_modes", 1)};
        return JointState(std::move(f), layout);
    }
    throw config_error("unknown state kind: " + kind);
}

WitnessOperator parse_witness(const json& h) {
    const std::string kind = h.value("kind", "fock");
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    if (h.contains("displacement")) d = vec2_from(h.at("displacement"), "displacement");
    if (kind == "fock") return WitnessOperator::fock_projector(h.value("level", 1), d);
    if (kind == "number") {
        Eigen::Vector2d axis(1.0, 0.0);
        if (h.contains("axis")) axis = vec2_from(h.at("axis"), "axis");
        return WitnessOperator::displaced_number(axis, d);
    }
    throw config_error("unknown witness kind: " + kind);
}

Eigen::Vector2d axis_from_config(const json& cfg, const char* key) {
    if (cfg.contains(key)) return vec2_from(cfg.at(key), key);
    return Eigen::Vector2d(1.0, 0.0);
}

// ---------------------------------------------------------------------------
// steer-sweep: track the Gaussian verdict, a witness certificate, and the
// Reid product while a family parameter moves, and check the three flags flip
// inside the same sweep step.

json steer_sweep(const json& cfg, const fs::path& out) {
    const std::string param = cfg.value("sweep", "eta");
    if (param != "eta" && param != "r")
        throw config_error("sweep must be \"eta\" or \"r\"");
    const double r = cfg.value("r", 0.7);
    const int steps = cfg.value("steps", 20);
    if (steps < 2) throw config_error("steps must be at least 2");
    const double lo = cfg.value("from", 0.0);
    const double hi = cfg.value("to", 1.0);
    const Eigen::Vector2d xcond =
        cfg.contains("conditioning_point")
            ? vec2_from(cfg.at("conditioning_point"), "conditioning_point")
            : Eigen::Vector2d(0.8, -0.6);
    WitnessFamilyConfig wc;
    wc.max_fock = cfg.value("max_fock", 8);

    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open sweep.csv");
    csv << "param,defect,witness_value,reid_var_q,reid_var_p,reid_product,"
           "steerable,witness_negative,reid_flag\n";

    std::vector<int> flip(3, -1);  // first index at which each flag turns on
    bool monotone = true;
    std::array<bool, 3> prev{false, false, false};
    std::vector<double> defects;
    defects.reserve(steps);

    for (int k = 0; k < steps; ++k) {
        const double v = lo + (hi - lo) * k / (steps - 1);
        GaussianState g = param == "eta" ? attenuate(make_tmsv(r), v) : make_tmsv(v);
        const SteeringVerdict verdict = gaussian_steerable(g);
        const NumberWitnessOptimum opt = optimal_number_witness(schur_complement(g));
        JointState joint(std::move(g));
        const ReidReport reid =
            reid_product(joint, Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0));
        const auto cert = certify_unphysical(joint, xcond, wc);

        const std::array<bool, 3> flags{verdict.steerable, cert.has_value(),
                                        reid.steering_flag};
        for (int i = 0; i < 3; ++i) {
            if (flags[i] && flip[i] < 0) flip[i] = k;
            if (prev[i] && !flags[i]) monotone = false;  // no turn-off allowed
            prev[i] = flags[i];
        }
        defects.push_back(verdict.defect);

        csv << fmt17(v) << "," << fmt17(verdict.defect) << "," << fmt17(opt.value)
            << "," << fmt17(reid.var_q) << "," << fmt17(reid.var_p) << ","
            << fmt17(reid.product) << "," << (flags[0] ? 1 : 0) << ","
            << (flags[1] ? 1 : 0) << "," << (flags[2] ? 1 : 0) << "\n";
    }

    if (!monotone)
        throw assertion_error("steer-sweep: a steering flag switched off mid-sweep");
    if (flip[0] != flip[1] || flip[0] != flip[2]) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "steer-sweep: flip indices disagree (%d, %d, %d)", flip[0],
                      flip[1], flip[2]);
        throw assertion_error(buf);
    }
    if (param == "r") {
        for (std::size_t k = 1; k < defects.size(); ++k)
            if (defects[k] > defects[k - 1] + 1e-12)
                throw assertion_error("steer-sweep: defect not monotone in r");
    }

    json rep;
    rep["sweep"] = param;
    rep["r"] = r;
    rep["steps"] = steps;
    rep["from"] = lo;
    rep["to"] = hi;
    rep["flip_index"] = flip[0] < 0 ? json(nullptr) : json(flip[0]);
    rep["flags_consistent"] = true;
    return rep;
}

// ---------------------------------------------------------------------------
// counterexample: a separable number-diagonal mixture where every
// conditioning point yields an unphysical conditional Wigner function while
// the Reid product stays at or above the classical bound.

json counterexample(const json& cfg, const fs::path& out) {
    const double t = cfg.value("t", 1.0);
    const int cutoff =
        cfg.contains("cutoff") ? cfg.at("cutoff").get<int>() : thermal_default_cutoff(t);
    if (t <= 0) throw config_error("t must be positive");
    const JointState joint{thermal_weights(t, cutoff)};
    const int n = cfg.value("grid_points", 21);
    const double hw = cfg.value("grid_half_width", 4.0);
    if (n < 2) throw config_error("grid_points must be at least 2");

    WitnessFamilyConfig wc;
    wc.number_witnesses = false;  // certificates must all be projectors
    wc.max_fock = cfg.value("max_fock", 30);

    std::ofstream csv(out / "certificates.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open certificates.csv");
    csv << "q_alice,p_alice,alice_density,witness_kind,level,value,error_bound\n";

    const double step = 2.0 * hw / (n - 1);  // inclusive endpoints
    int certified = 0;
    PhasePoint xa(2);
    for (int i = 0; i < n; ++i) {
        xa[0] = -hw + i * step;
        for (int j = 0; j < n; ++j) {
            xa[1] = -hw + j * step;
            const double density = joint.alice_marginal(xa);
            const auto cert = certify_unphysical(joint, xa, wc);
            if (!cert) {
                char buf[96];
                std::snprintf(buf, sizeof buf,
                              "counterexample: no certificate at (%.6g, %.6g)",
                              xa[0], xa[1]);
                throw assertion_error(buf);
            }
            ++certified;
            const auto* proj = cert->witness.fock();
            csv << fmt17(xa[0]) << "," << fmt17(xa[1]) << "," << fmt17(density)
                << "," << (proj ? "fock" : "number") << ","
                << (proj ? proj->level : -1) << "," << fmt17(cert->value) << ","
                << fmt17(cert->error_bound) << "\n";
        }
    }

    const ReidReport reid =
        reid_product(joint, Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0));
    if (reid.product < 1.0 - 1e-6)
        throw assertion_error("counterexample: Reid product fell below 1");
    const ChainReport chain = verify_variance_chain(joint, Eigen::Vector2d(1, 0),
                                                    Eigen::Vector2d(1, 0));

    json rep;
    rep["grid_points"] = n;
    rep["grid_half_width"] = hw;
    rep["t"] = t;
    rep["cutoff"] = cutoff;
    rep["points_certified"] = certified;
    rep["coverage"] = 1.0;
    rep["reid"] = reid.to_json();
    rep["chain"] = chain.to_json();
    rep["separable"] = true;  // explicit mixture of product states
    if (std::abs(t - 1.0) < 1e-12) {
        // closed form at the origin: c_m = 3 (-1)^m 2^{-(m+1)}
        const ConditionalWigner cw = conditional_wigner(joint, PhasePoint::Zero(2));
        const double c1 = (*cw.level_weights())[1];
        rep["origin_c1"] = c1;
        if (std::abs(c1 + 0.75) > 1e-6)
            throw assertion_error("counterexample: origin level-1 weight off");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// remote-negativity: herald a Bob outcome and summarize the negativity of
// Alice's conditioned state.

json remote_negativity(const json& cfg, const fs::path& out) {
    const json state_cfg =
        cfg.contains("state") ? cfg.at("state") : json{{"kind", "fock_mixture"}, {"t", 1.0}};
    const JointState joint = build_joint(state_cfg);
    const json herald_cfg =
        cfg.contains("herald") ? cfg.at("herald") : json{{"kind", "fock"}, {"level", 1}};
    const WitnessOperator herald = parse_witness(herald_cfg);

    const json grid_cfg = cfg.value("grid", json::object());
    const int points = grid_cfg.value("points", 128);
    const double hw = grid_cfg.value("half_width", 0.0);
    const PhaseGrid agrid =
        hw > 0 ? PhaseGrid(2, hw, points, PhasePoint::Zero(2))
               : joint.default_alice_grid(points);
    QuadSpec quad;
    quad.points = cfg.value("quad_points", 128);

    const HeraldedState hs = remote_conditioned_state(joint, herald, agrid, quad);
    const NegativitySummary neg = negativity_summary(hs.alice);
    save_field(hs.alice, (out / "alice_field").string(), FieldFormat::csv);

    if (cfg.value("expect_negative", true) && neg.min_value >= -1e-3)
        throw assertion_error("remote-negativity: heralded state shows no negativity");

    json rep;
    rep["herald"] = herald.descriptor();
    rep["success_probability"] = hs.success_probability;
    rep["negativity"] = neg.to_json();
    rep["grid_points"] = agrid.points_per_axis();
    rep["grid_half_width"] = agrid.half_width();
    return rep;
}

// ---------------------------------------------------------------------------
// chain-audit: verify the homodyne/conditional-Wigner variance ordering.

json chain_audit(const json& cfg, const fs::path& out) {
    (void)out;
    const json state_cfg =
        cfg.contains("state") ? cfg.at("state") : json{{"kind", "tmsv"}, {"r", 0.5}};
    const JointState joint = build_joint(state_cfg);
    const Eigen::Vector2d g = axis_from_config(cfg, "g");
    const Eigen::Vector2d f = axis_from_config(cfg, "f");
    const double tol = cfg.value("tol", 1e-4);
    const ChainReport chain = verify_variance_chain(joint, g, f, tol);
    json rep;
    rep["chain"] = chain.to_json();
    rep["tol"] = tol;
    return rep;
}

// ---------------------------------------------------------------------------
// field-dump: render a joint or marginal Wigner function to disk.

json field_dump(const json& cfg, const fs::path& out) {
    const json state_cfg =
        cfg.contains("state") ? cfg.at("state") : json{{"kind", "tmsv"}, {"r", 0.5}};
    const JointState joint = build_joint(state_cfg);
    const std::string target = cfg.value("target", "alice");
    const json grid_cfg = cfg.value("grid", json::object());
    int points = grid_cfg.value("points", 96);
    const double hw_cfg = grid_cfg.value("half_width", 0.0);

    WignerField field = [&]() {
        if (target == "alice") {
            const PhaseGrid g = hw_cfg > 0
                                    ? PhaseGrid(2, hw_cfg, points, PhasePoint::Zero(2))
                                    : joint.default_alice_grid(points);
            return render(g, [&](const PhasePoint& x) { return joint.alice_marginal(x); });
        }
        if (target == "bob") {
            const PhaseGrid g = hw_cfg > 0
                                    ? PhaseGrid(2, hw_cfg, points, PhasePoint::Zero(2))
                                    : joint.default_bob_grid(points);
            return render(g, [&](const PhasePoint& x) { return joint.bob_marginal(x); });
        }
        if (target == "joint") {
            points = std::min(points, 48);
            const int dim = joint.layout().dim();
            const double hw =
                hw_cfg > 0 ? hw_cfg
                           : 6.0 * std::max(joint.alice_sigma(), joint.bob_sigma());
            const PhaseGrid g(dim, hw, points, PhasePoint::Zero(dim));
            return render(g, [&](const PhasePoint& x) { return joint.wigner(x); });
        }
        throw config_error("target must be alice, bob, or joint");
    }();

    const FieldFormat fmt =
        field.grid.dim() <= 2 ? FieldFormat::csv : FieldFormat::f64le;
    const FieldFiles files = save_field(field, (out / "field").string(), fmt);
    const FieldMinimum mn = min_value(field);

    json rep;
    rep["target"] = target;
    rep["integral"] = integrate(field);
    rep["min_value"] = mn.value;
    rep["files"] = {fs::path(files.header_path).filename().string(),
                    fs::path(files.data_path).filename().string()};
    return rep;
}

}  // namespace

ScenarioResult run_scenario(const nlohmann::json& config, const std::string& out_dir) {
    ScenarioResult res;
    try {
        const fs::path out(out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw config_error("cannot create output directory " + out_dir);
        if (!config.contains("scenario") || !config.at("scenario").is_string())
            throw config_error("config needs a \"scenario\" string");
        const std::string name = config.at("scenario").get<std::string>();

        json report;
        if (name == "steer-sweep") report = steer_sweep(config, out);
        else if (name == "counterexample") report = counterexample(config, out);
        else if (name == "remote-negativity") report = remote_negativity(config, out);
        else if (name == "chain-audit") report = chain_audit(config, out);
        else if (name == "field-dump") report = field_dump(config, out);
        else throw config_error("unknown scenario: " + name);

        json manifest;
        manifest["scenario"] = name;
        manifest["tool"] = "wigkit";
        manifest["version"] = version;
        manifest["seed"] = config.value("seed", 0);
        manifest["config"] = config;
        write_json_file(out / "manifest.json", manifest);
        report["scenario"] = name;
        write_json_file(out / "report.json", report);

        res.report = std::move(report);
        res.message = "ok: " + name;
        return res;
    } catch (const config_error& e) {
        res.exit_code = exit_config;
        res.message = e.what();
    } catch (const assertion_error& e) {
        res.exit_code = exit_assertion;
        res.message = e.what();
    } catch (const nlohmann::json::exception& e) {
        res.exit_code = exit_config;
        res.message = e.what();
    } catch (const std::invalid_argument& e) {
        res.exit_code = exit_config;
        res.message = e.what();
    } catch (const std::runtime_error& e) {
        res.exit_code = exit_assertion;
        res.message = e.what();
    }
    return res;
}

}  // namespace wigkit
