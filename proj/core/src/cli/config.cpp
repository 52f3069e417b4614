#include "pfc/cli/config.hpp"

#include "pfc/cli/io.hpp"
#include "pfc/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <initializer_list>

namespace pfc::cli {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw InvalidArgument("config: " + key + ": " + what);
}

std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

void allow_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> keys) {
    if (!node) return;
    if (!node.IsMap()) fail(where, "expected a mapping");
    for (const auto& kv : node) {
        const auto k = kv.first.as<std::string>();
        if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end()) {
            fail(join(where, k), "unknown key");
        }
    }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) fail(key, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(key, "cannot convert '" + node.Scalar() + "'");
    }
}

template <class T>
T get(const YAML::Node& block, const std::string& where, const char* key, T fallback) {
    if (!block || !block[key]) return fallback;
    return scalar<T>(block[key], join(where, key));
}

template <class T>
std::vector<T> get_list(const YAML::Node& block, const std::string& where, const char* key,
                        std::vector<T> fallback) {
    if (!block || !block[key]) return fallback;
    const auto& n = block[key];
    const auto name = join(where, key);
    if (!n.IsSequence()) fail(name, "expected a list");
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(scalar<T>(n[i], name + "[" + std::to_string(i) + "]"));
    return out;
}

fs::path resolve(const fs::path& base, const std::string& file, const std::string& key) {
    fs::path p(file);
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) fail(key, "file '" + p.string() + "' does not exist");
    return p;
}

// scalar -> constant; list -> per-entry values; {file: path} -> CSV series
std::vector<Eigen::VectorXd> series_spec(const YAML::Node& n, const std::string& key, const fs::path& base,
                                         Eigen::Index size, std::size_t count) {
    if (n.IsScalar()) {
        return std::vector<Eigen::VectorXd>(count, Eigen::VectorXd::Constant(size, scalar<double>(n, key)));
    }
    if (n.IsSequence()) {
        if (static_cast<Eigen::Index>(n.size()) != size) {
            fail(key, "expected " + std::to_string(size) + " values, got " + std::to_string(n.size()));
        }
        Eigen::VectorXd v(size);
        for (Eigen::Index i = 0; i < size; ++i) v[i] = scalar<double>(n[i], key + "[" + std::to_string(i) + "]");
        return std::vector<Eigen::VectorXd>(count, v);
    }
    if (n.IsMap()) {
        allow_keys(n, key, {"file"});
        if (!n["file"]) fail(key, "expected a scalar, a list or {file: path}");
        auto series = read_series_csv(resolve(base, scalar<std::string>(n["file"], key + ".file"), key + ".file"));
        if (series.size() == 1 && count > 1) series.resize(count, series.front());
        if (series.size() != count) {
            fail(key, "file holds " + std::to_string(series.size()) + " time indices, expected " + std::to_string(count));
        }
        for (const auto& v : series) {
            if (v.size() != size) fail(key, "file rows do not match " + std::to_string(size) + " nodes");
        }
        return series;
    }
    fail(key, "expected a scalar, a list or {file: path}");
}

Eigen::VectorXd field_spec(const YAML::Node& block, const std::string& where, const char* k, const fs::path& base,
                           Eigen::Index size, double fallback) {
    if (!block || !block[k]) return Eigen::VectorXd::Constant(size, fallback);
    return series_spec(block[k], join(where, k), base, size, 1).front();
}

BoundaryControl control_spec(const YAML::Node& n, const std::string& key, const fs::path& base,
                             const SpatialGrid& grid, const TimeGrid& tgrid) {
    return BoundaryControl{series_spec(n, key, base, static_cast<Eigen::Index>(grid.boundary_size()),
                                       static_cast<std::size_t>(tgrid.steps()))};
}

template <class F>
auto guarded(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        if (msg.rfind("config:", 0) == 0) throw;
        fail(key, msg);
    }
}

}  // namespace

RunConfig parse_config(const fs::path& path) {
    if (!fs::exists(path)) throw InvalidArgument("config: file '" + path.string() + "' does not exist");
    return parse_config_text(read_text(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

RunConfig parse_config_text(const std::string& text, const fs::path& base) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw InvalidArgument(std::string("config: malformed YAML: ") + e.what());
    }
    if (!root || root.IsNull()) throw InvalidArgument("config: empty document");
    allow_keys(root, "", {"grid", "time", "params", "potential", "initial", "solver", "control", "cost",
                          "optimizer", "gradcheck", "sweep", "contdep", "seed"});

    // grid
    const auto g = root["grid"];
    if (!g) fail("grid", "required block is missing");
    allow_keys(g, "grid", {"dimension", "lengths", "node_counts"});
    const auto dim_name = get<std::string>(g, "grid", "dimension", "interval");
    Dimension dim;
    if (dim_name == "interval") dim = Dimension::interval;
    else if (dim_name == "rectangle") dim = Dimension::rectangle;
    else fail("grid.dimension", "expected interval or rectangle, got '" + dim_name + "'");
    const std::size_t axes = dim == Dimension::interval ? 1 : 2;
    const auto lengths = get_list<double>(g, "grid", "lengths", std::vector<double>(axes, 1.0));
    if (!g["node_counts"]) fail("grid.node_counts", "required key is missing");
    const auto counts = get_list<int>(g, "grid", "node_counts", {});
    if (lengths.size() != axes) fail("grid.lengths", "expected " + std::to_string(axes) + " entries");
    if (counts.size() != axes) fail("grid.node_counts", "expected " + std::to_string(axes) + " entries");
    for (int c : counts) {
        if (c < 3) fail("grid.node_counts", "need at least 3 nodes per axis (one interior node)");
    }
    SpatialGrid grid = guarded("grid", [&] { return build_grid(dim, lengths, counts); });
    const auto n_nodes = static_cast<Eigen::Index>(grid.size());
    const auto n_bnd = static_cast<Eigen::Index>(grid.boundary_size());

    // time
    const auto t = root["time"];
    if (!t) fail("time", "required block is missing");
    allow_keys(t, "time", {"T", "N"});
    if (!t["N"]) fail("time.N", "required key is missing");
    const double horizon = get<double>(t, "time", "T", 1.0);
    const int steps = get<int>(t, "time", "N", 0);
    if (!(horizon > 0.0)) fail("time.T", "must be positive");
    if (steps < 1) fail("time.N", "must be at least 1");
    TimeGrid tgrid(horizon, steps);

    // params
    const auto p = root["params"];
    allow_keys(p, "params", {"sigma", "tau", "alpha", "m"});
    PhysicalParams params;
    params.sigma = get<double>(p, "params", "sigma", 1.0);
    params.tau = get<double>(p, "params", "tau", 1.0);
    params.alpha = get<double>(p, "params", "alpha", 1.0);
    params.m = field_spec(p, "params", "m", base, n_bnd, 1.0);
    guarded("params", [&] { params.validate(grid); return 0; });

    // potential
    const auto pot = root["potential"];
    allow_keys(pot, "potential", {"variant", "a", "lambda", "epsilon"});
    LatentHeat latent = LatentHeat::linear(1.0);
    if (pot && pot["lambda"]) {
        const auto& l = pot["lambda"];
        if (!l.IsScalar()) fail("potential.lambda", "expected a number or log_cosh");
        if (l.Scalar() == "log_cosh") latent = LatentHeat::log_cosh();
        else latent = LatentHeat::linear(scalar<double>(l, "potential.lambda"));
    }
    const auto variant = get<std::string>(pot, "potential", "variant", "regular");
    std::optional<PotentialSpec> potential;
    if (variant == "regular") {
        potential = PotentialSpec::regular(latent);
    } else if (variant == "logarithmic") {
        const double a = get<double>(pot, "potential", "a", 2.0);
        potential = guarded("potential.a", [&] { return PotentialSpec::logarithmic(a, latent); });
    } else {
        fail("potential.variant", "expected regular or logarithmic, got '" + variant + "'");
    }
    std::optional<Regularization> reg;
    if (pot && pot["epsilon"]) {
        Regularization r;
        r.epsilon = scalar<double>(pot["epsilon"], "potential.epsilon");
        guarded("potential.epsilon", [&] { r.validate(); return 0; });
        reg = r;
    }

    // initial data
    const auto ini = root["initial"];
    allow_keys(ini, "initial", {"theta0", "phi0"});
    InitialData init{field_spec(ini, "initial", "theta0", base, n_nodes, 0.0),
                     field_spec(ini, "initial", "phi0", base, n_nodes, 0.0)};
    if (!potential->domain().bounded() || reg) {
        // nothing to check
    } else {
        for (Eigen::Index i = 0; i < n_nodes; ++i) {
            if (!potential->domain().contains(init.phi0[i])) fail("initial.phi0", "values must lie inside the potential's domain");
        }
    }

    // solver
    const auto s = root["solver"];
    allow_keys(s, "solver", {"inner_sweeps", "newton_max_iterations", "newton_tolerance", "guard_margin", "retry_budget"});
    SolverOptions solver;
    solver.inner_sweeps = get<int>(s, "solver", "inner_sweeps", solver.inner_sweeps);
    solver.newton_max_iterations = get<int>(s, "solver", "newton_max_iterations", solver.newton_max_iterations);
    solver.newton_tolerance = get<double>(s, "solver", "newton_tolerance", solver.newton_tolerance);
    solver.guard_margin = get<double>(s, "solver", "guard_margin", solver.guard_margin);
    solver.retry_budget = get<int>(s, "solver", "retry_budget", solver.retry_budget);
    guarded("solver", [&] { solver.validate(); return 0; });

    // control and box
    const auto c = root["control"];
    allow_keys(c, "control", {"u0", "u_min", "u_max"});
    auto ctl = [&](const char* k, double fallback) {
        if (!c || !c[k]) return BoundaryControl::constant(grid, tgrid, fallback);
        return control_spec(c[k], join("control", k), base, grid, tgrid);
    };
    ControlBounds bounds{ctl("u_min", -1.0), ctl("u_max", 1.0)};
    for (int n = 0; n < tgrid.steps(); ++n) {
        if ((bounds.u_min[n].array() > bounds.u_max[n].array()).any()) {
            fail("control.u_min", "must not exceed control.u_max");
        }
    }
    BoundaryControl u0 = ctl("u0", 0.0);

    // cost
    const auto k = root["cost"];
    allow_keys(k, "cost", {"kappa1", "kappa2", "theta_Q", "phi_Omega"});
    CostSpec cost = CostSpec::zeros(grid, tgrid, get<double>(k, "cost", "kappa1", 1.0), get<double>(k, "cost", "kappa2", 0.0));
    if (cost.kappa1 < 0.0) fail("cost.kappa1", "must be nonnegative");
    if (cost.kappa2 < 0.0) fail("cost.kappa2", "must be nonnegative");
    cost.phi_Omega = field_spec(k, "cost", "phi_Omega", base, n_nodes, 0.0);

    Instance inst{std::move(grid), tgrid, std::move(params), std::move(*potential), reg, std::move(init),
                  std::move(u0), std::move(cost), std::move(bounds), solver, 0};
    if (k && k["theta_Q"]) {
        const auto& q = k["theta_Q"];
        if (q.IsMap() && q["manufactured"]) {
            allow_keys(q, "cost.theta_Q", {"manufactured"});
            const BoundaryControl dagger = control_spec(q["manufactured"], "cost.theta_Q.manufactured", base, inst.grid, tgrid);
            inst.cost.theta_Q = inst.problem().solve(dagger).theta;
        } else {
            inst.cost.theta_Q = series_spec(q, "cost.theta_Q", base, n_nodes, static_cast<std::size_t>(steps + 1));
        }
    }

    RunConfig cfg(std::move(inst));

    const auto o = root["optimizer"];
    allow_keys(o, "optimizer", {"tol", "max_iter", "s0", "c1", "backtrack_ratio", "backtrack_budget"});
    auto& oo = cfg.optimizer;
    oo.tol = get<double>(o, "optimizer", "tol", oo.tol);
    oo.max_iter = get<int>(o, "optimizer", "max_iter", oo.max_iter);
    oo.s0 = get<double>(o, "optimizer", "s0", oo.s0);
    oo.armijo_c1 = get<double>(o, "optimizer", "c1", oo.armijo_c1);
    oo.backtrack_ratio = get<double>(o, "optimizer", "backtrack_ratio", oo.backtrack_ratio);
    oo.backtrack_budget = get<int>(o, "optimizer", "backtrack_budget", oo.backtrack_budget);
    if (!(oo.tol >= 0.0)) fail("optimizer.tol", "must be nonnegative");
    if (oo.max_iter < 0) fail("optimizer.max_iter", "must be nonnegative");
    if (!(oo.s0 > 0.0)) fail("optimizer.s0", "must be positive");
    if (!(oo.armijo_c1 > 0.0 && oo.armijo_c1 < 1.0)) fail("optimizer.c1", "must lie in (0, 1)");
    if (!(oo.backtrack_ratio > 0.0 && oo.backtrack_ratio < 1.0)) fail("optimizer.backtrack_ratio", "must lie in (0, 1)");
    if (oo.backtrack_budget < 1) fail("optimizer.backtrack_budget", "must be at least 1");

    const auto gc = root["gradcheck"];
    allow_keys(gc, "gradcheck", {"directions", "deltas", "central_delta"});
    auto& go = cfg.gradcheck;
    go.directions = get<int>(gc, "gradcheck", "directions", go.directions);
    go.deltas = get_list<double>(gc, "gradcheck", "deltas", go.deltas);
    go.central_delta = get<double>(gc, "gradcheck", "central_delta", go.central_delta);
    if (go.directions < 1) fail("gradcheck.directions", "must be at least 1");
    if (go.deltas.empty()) fail("gradcheck.deltas", "must not be empty");
    if (!(go.central_delta > 0.0)) fail("gradcheck.central_delta", "must be positive");

    const auto sw = root["sweep"];
    allow_keys(sw, "sweep", {"epsilons"});
    cfg.epsilons = get_list<double>(sw, "sweep", "epsilons", cfg.epsilons);
    for (double e : cfg.epsilons) {
        if (!(e > 0.0 && e < 1.0)) fail("sweep.epsilons", "entries must lie in (0, 1)");
    }

    const auto cd = root["contdep"];
    allow_keys(cd, "contdep", {"pairs", "separations"});
    cfg.contdep_pairs = get<int>(cd, "contdep", "pairs", cfg.contdep_pairs);
    cfg.separations = get_list<double>(cd, "contdep", "separations", cfg.separations);
    if (cfg.contdep_pairs < 1) fail("contdep.pairs", "must be at least 1");

    if (root["seed"]) cfg.instance.seed = scalar<std::uint64_t>(root["seed"], "seed");

    cfg.text = text;
    cfg.sha256 = sha256_hex(text);
    return cfg;
}

}  // namespace pfc::cli
