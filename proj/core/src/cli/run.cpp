#include "pfc/cli/run.hpp"

#include "pfc/cli/config.hpp"
#include "pfc/cli/io.hpp"
#include "pfc/errors.hpp"
#include "pfc/norms.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <iostream>

namespace pfc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const BoundednessReport& b) {
    json j{{"max_abs_theta", b.max_abs_theta}, {"min_phi", b.min_phi}, {"max_phi", b.max_phi},
           {"max_abs_xi", b.max_abs_xi}};
    j["contained"] = b.contained ? json(*b.contained) : json(nullptr);
    return j;
}

json to_json(const CertificationReport& c) {
    json v = json::array();
    for (const auto& [n, b] : c.violations) v.push_back({n, b});
    return {{"tol_sign", c.tol_sign}, {"pairs", c.pairs}, {"satisfied", c.satisfied},
            {"satisfied_fraction", c.satisfied_fraction}, {"normal_cone_residual", c.normal_cone_residual},
            {"violations", v}};
}

struct Outcome {
    int code = exit_ok;
    json summary = json::object();
    std::vector<std::string> artifacts;
};

void write_series(const fs::path& out, const std::string& name, const std::vector<Eigen::VectorXd>& s,
                  Outcome& o) {
    write_series_csv(out / name, s);
    o.artifacts.push_back(name);
}

Outcome simulate(const RunConfig& cfg, const fs::path& out) {
    const auto& in = cfg.instance;
    Outcome o;
    const StateTrajectory st = in.problem().solve(in.control);
    write_series(out, "theta.csv", st.theta, o);
    write_series(out, "phi.csv", st.phi, o);
    write_series(out, "xi.csv", st.xi, o);
    write_series(out, "theta_gamma.csv", st.theta_gamma, o);

    const auto energy = energy_diagnostic(st, in.init, in.grid, in.tgrid, in.params, in.potential, in.control);
    json e = json::array();
    double min_slack = 0.0;
    for (const auto& r : energy) {
        e.push_back({{"time", r.time}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack},
                     {"coupling_defect", r.coupling_defect}});
        min_slack = std::min(min_slack, r.slack);
    }
    const auto guard = Nonlinearity(in.potential, in.regularization).guard(0.0);
    const auto residual = weak_form_residual(st, in.grid, in.tgrid, in.params, in.potential, in.control);
    o.summary = {
        {"cost", evaluate_cost(st, in.cost, in.grid, in.tgrid)},
        {"energy", e},
        {"min_energy_slack", min_slack},
        {"boundedness", to_json(boundedness_check(st, guard))},
        {"max_weak_form_residual", residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end())},
        {"guard_rejections", st.guard_rejections()},
        {"norms", {{"theta_l2_h", norm_l2_h(in.grid, in.tgrid, st.theta)},
                   {"phi_l2_h", norm_l2_h(in.grid, in.tgrid, st.phi)},
                   {"theta_gamma_l2_sigma", norm_l2_sigma(in.grid, in.tgrid, st.theta_gamma)}}},
    };
    return o;
}

Outcome gradcheck(const RunConfig& cfg, Fault fault) {
    GradCheckOptions opt = cfg.gradcheck;
    opt.fault = fault;
    const auto rep = grad_check(cfg.instance, opt);
    Outcome o;
    json probes = json::array();
    for (const auto& p : rep.probes) {
        probes.push_back({{"adjoint_derivative", p.adjoint_derivative},
                          {"central_difference", p.central_difference},
                          {"rel_error", p.rel_error},
                          {"cost_remainders", p.cost_remainders},
                          {"state_remainders", p.state_remainders},
                          {"cost_slope", optional_json(p.cost_slope)},
                          {"state_slope", optional_json(p.state_slope)},
                          {"duality_gap", p.duality_gap},
                          {"rel_ok", p.rel_ok},
                          {"slope_ok", p.slope_ok},
                          {"gap_ok", p.gap_ok},
                          {"error", p.error}});
    }
    o.summary = {{"seed", rep.seed},          {"fault", to_string(fault)},   {"deltas", opt.deltas},
                 {"probes", probes},          {"worst_rel_error", rep.worst_rel_error},
                 {"worst_gap", rep.worst_gap}, {"rel_ok", rep.rel_ok},       {"slope_ok", rep.slope_ok},
                 {"gap_ok", rep.gap_ok},      {"passed", rep.passed}};
    o.code = rep.passed ? exit_ok : exit_check_failed;
    return o;
}

Outcome optimize(const RunConfig& cfg, const fs::path& out) {
    const auto& in = cfg.instance;
    const auto rep = projected_gradient(in.control, in.bounds, in.problem(), in.cost, cfg.optimizer);
    Outcome o;
    write_series(out, "control.csv", rep.control.values, o);
    std::vector<Eigen::VectorXd> active;
    for (const auto& row : rep.active) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
        for (std::size_t b = 0; b < row.size(); ++b) v[static_cast<Eigen::Index>(b)] = static_cast<int>(row[b]);
        active.push_back(v);
    }
    write_series(out, "active_set.csv", active, o);
    const double j0 = rep.cost_history.front();
    const double jf = rep.cost_history.back();
    o.summary = {{"iterations", rep.iterations},
                 {"evaluations", rep.evaluations},
                 {"cost_history", rep.cost_history},
                 {"residual_history", rep.residual_history},
                 {"step_history", rep.step_history},
                 {"initial_cost", j0},
                 {"final_cost", jf},
                 {"cost_reduction", j0 > 0.0 ? jf / j0 : 0.0},
                 {"final_residual", rep.residual_history.back()},
                 {"converged", rep.converged},
                 {"termination", rep.termination},
                 {"certification", to_json(rep.certification)}};
    o.code = rep.converged ? exit_ok : exit_check_failed;
    return o;
}

Outcome sweep_eps(const RunConfig& cfg) {
    const auto rep = epsilon_sweep(cfg.instance, cfg.epsilons);
    Outcome o;
    o.summary = {{"seed", rep.seed},
                 {"epsilons", rep.epsilons},
                 {"phi_successive", rep.phi_successive},
                 {"theta_successive", rep.theta_successive},
                 {"phi_to_direct", rep.phi_to_direct},
                 {"theta_to_direct", rep.theta_to_direct},
                 {"successive_decreasing", rep.successive_decreasing},
                 {"direct_decreasing", rep.direct_decreasing},
                 {"passed", rep.passed}};
    o.code = rep.passed ? exit_ok : exit_check_failed;
    return o;
}

Outcome contdep(const RunConfig& cfg) {
    const auto rep = contdep_probe(cfg.instance, cfg.contdep_pairs, cfg.separations);
    Outcome o;
    json pairs = json::array();
    for (const auto& p : rep.pairs) {
        pairs.push_back({{"separations", p.separations}, {"ratios", p.ratios}, {"band", p.band}});
    }
    o.summary = {{"seed", rep.seed},
                 {"pairs", pairs},
                 {"worst_band", rep.worst_band},
                 {"band_limit", rep.band_limit},
                 {"passed", rep.passed}};
    o.code = rep.passed ? exit_ok : exit_check_failed;
    return o;
}

}  // namespace

int run(const RunRequest& req) {
    const auto start = std::chrono::steady_clock::now();
    json manifest = {
        {"tool", "pfc"},
        {"subcommand", req.subcommand},
        {"config", req.config.string()},
        {"config_sha256", nullptr},
        {"seed", req.seed ? json(*req.seed) : json(nullptr)},
        {"fault", to_string(req.fault)},
        {"versions", {{"pfc", PFC_VERSION},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)}}},
        {"status", "ok"},
        {"failing_step", nullptr},
        {"error", nullptr},
    };
    int code = exit_ok;
    std::error_code ec;
    fs::create_directories(req.out, ec);
    if (ec) {
        std::cerr << "pfc: cannot create output directory '" << req.out.string() << "': " << ec.message() << '\n';
        return exit_bad_input;
    }

    try {
        if (fs::exists(req.config)) manifest["config_sha256"] = sha256_hex(read_text(req.config));
        RunConfig cfg = parse_config(req.config);
        if (req.seed) cfg.instance.seed = *req.seed;
        manifest["seed"] = cfg.instance.seed;

        Outcome o;
        if (req.subcommand == "simulate") o = simulate(cfg, req.out);
        else if (req.subcommand == "gradcheck") o = gradcheck(cfg, req.fault);
        else if (req.subcommand == "optimize") o = optimize(cfg, req.out);
        else if (req.subcommand == "sweep-eps") o = sweep_eps(cfg);
        else if (req.subcommand == "contdep") o = contdep(cfg);
        else throw InvalidArgument("unknown subcommand '" + req.subcommand + "'");

        write_text(req.out / "summary.json", o.summary.dump(2) + "\n");
        o.artifacts.push_back("summary.json");
        manifest["artifacts"] = o.artifacts;
        if (o.summary.contains("cost_history")) manifest["cost_history"] = o.summary["cost_history"];
        code = o.code;
        if (code != exit_ok) manifest["status"] = "check_failed";
    } catch (const SolverError& e) {
        manifest["status"] = "solver_failure";
        manifest["error"] = e.what();
        if (e.step() >= 0) manifest["failing_step"] = e.step();
        code = exit_solver_failure;
    } catch (const Error& e) {
        manifest["status"] = "bad_input";
        manifest["error"] = e.what();
        code = exit_bad_input;
    }

    manifest["exit_code"] = code;
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_text(req.out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "pfc: " << e.what() << '\n';
        return code == exit_ok ? exit_bad_input : code;
    }
    if (manifest["error"].is_string()) {
        std::cerr << "pfc: " << manifest["error"].get<std::string>() << '\n';
    }
    return code;
}

}  // namespace pfc::cli
