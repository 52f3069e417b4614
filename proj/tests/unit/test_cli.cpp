#include "pfc/cli/config.hpp"
#include "pfc/cli/io.hpp"
#include "pfc/cli/run.hpp"
#include "pfc/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <cstring>
#include <random>

namespace {

using namespace pfc;
using namespace pfc::cli;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("pfc_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    std::string error_of(const std::string& text) {
        try {
            parse_config_text(text, dir);
        } catch (const InvalidArgument& e) {
            return e.what();
        }
        return "";
    }

    fs::path dir;
};

TEST_F(TempDir, MinimalConfigTakesDefaults) {
    const auto cfg = parse_config_text("grid: {node_counts: [9]}\ntime: {N: 8}\n");
    const auto& in = cfg.instance;
    EXPECT_EQ(in.params.sigma, 1.0);
    EXPECT_EQ(in.params.tau, 1.0);
    EXPECT_EQ(in.params.alpha, 1.0);
    EXPECT_EQ(in.potential.variant(), PotentialVariant::regular);
    EXPECT_EQ(in.potential.lambda(0.3), 1.0);
    EXPECT_FALSE(in.regularization.has_value());
    EXPECT_EQ(in.cost.kappa1, 1.0);
    EXPECT_EQ(in.cost.kappa2, 0.0);
    EXPECT_EQ(in.bounds.u_min[0][0], -1.0);
    EXPECT_EQ(in.bounds.u_max[7][1], 1.0);
    EXPECT_EQ(in.tgrid.horizon(), 1.0);
    EXPECT_EQ(cfg.optimizer.max_iter, 200);
    EXPECT_EQ(cfg.sha256.size(), 64u);
}

TEST_F(TempDir, InvariantViolationsNameTheKey) {
    const std::string base = "grid: {node_counts: [9]}\ntime: {N: 4}\n";
    const auto box = error_of(base + "control: {u_min: 2, u_max: 1}\n");
    EXPECT_NE(box.find("control.u_min"), std::string::npos) << box;
    EXPECT_EQ(box.find("hpUad"), std::string::npos);
    EXPECT_NE(error_of("grid: {node_counts: [2]}\ntime: {N: 4}\n").find("grid.node_counts"), std::string::npos);
    EXPECT_NE(error_of(base + "params: {sigma: 1, gamma: 2}\n").find("params.gamma"), std::string::npos);
    EXPECT_NE(error_of(base + "extra: 1\n").find("extra"), std::string::npos);
    EXPECT_NE(error_of(base + "params: {tau: -1}\n").find("params"), std::string::npos);
    EXPECT_NE(error_of(base + "potential: {variant: logarithmic}\ninitial: {phi0: 1.0}\n").find("initial.phi0"),
              std::string::npos);
    EXPECT_NE(error_of(base + "potential: {epsilon: 1.5}\n").find("potential.epsilon"), std::string::npos);
    EXPECT_NE(error_of("grid: {node_counts: [9]}\ntime: {N: x}\n").find("time.N"), std::string::npos);
    EXPECT_NE(error_of(base + "cost: {theta_Q: {file: missing.csv}}\n").find("does not exist"), std::string::npos);
    EXPECT_NE(error_of("time: {N: 4}\n").find("grid"), std::string::npos);
    EXPECT_THROW(parse_config(dir / "nope.yaml"), InvalidArgument);
}

TEST_F(TempDir, FullConfigAndFileReferences) {
    const auto g = build_grid(Dimension::interval, {2.0}, {5});
    std::vector<Eigen::VectorXd> q(5, Eigen::VectorXd::LinSpaced(5, 0.0, 1.0));
    write_series_csv(dir / "tq.csv", q);
    write_series_csv(dir / "u0.csv", std::vector<Eigen::VectorXd>(4, Eigen::VectorXd::Constant(2, 0.25)));
    const auto path = write("run.yaml", R"(
grid: {dimension: interval, lengths: [2.0], node_counts: [5]}
time: {T: 2.0, N: 4}
params: {sigma: 0.5, tau: 2.0, alpha: 3.0, m: [1.0, 0.0]}
potential: {variant: logarithmic, a: 1.5, lambda: log_cosh, epsilon: 0.05}
initial: {theta0: 0.1, phi0: [0.0, 0.1, 0.2, 0.1, 0.0]}
solver: {inner_sweeps: 3}
control: {u0: {file: u0.csv}, u_min: [-1, -2], u_max: 2}
cost: {kappa1: 2.0, kappa2: 1.0, theta_Q: {file: tq.csv}, phi_Omega: 0.5}
optimizer: {tol: 1.0e-8, max_iter: 10, s0: 2.0, c1: 0.001}
gradcheck: {directions: 2, deltas: [0.1, 0.01]}
sweep: {epsilons: [0.1, 0.05]}
contdep: {pairs: 2}
seed: 99
)");
    const auto cfg = parse_config(path);
    const auto& in = cfg.instance;
    EXPECT_EQ(in.params.m[1], 0.0);
    EXPECT_EQ(in.params.alpha, 3.0);
    EXPECT_EQ(in.potential.variant(), PotentialVariant::logarithmic);
    EXPECT_NEAR(in.potential.lambda(0.5), std::tanh(0.5), 1e-15);
    EXPECT_EQ(in.regularization->epsilon, 0.05);
    EXPECT_EQ(in.options.inner_sweeps, 3);
    EXPECT_EQ(in.control[2][1], 0.25);
    EXPECT_EQ(in.bounds.u_min[0][1], -2.0);
    EXPECT_EQ(in.cost.theta_Q[4], q[4]);
    EXPECT_EQ(cfg.optimizer.s0, 2.0);
    EXPECT_EQ(cfg.gradcheck.deltas.size(), 2u);
    EXPECT_EQ(cfg.epsilons.size(), 2u);
    EXPECT_EQ(in.seed, 99u);
}

TEST_F(TempDir, ManufacturedTargetIsTheStateOfTheControl) {
    const auto cfg = parse_config_text(
        "grid: {node_counts: [7]}\ntime: {N: 5}\ncost: {theta_Q: {manufactured: 0.3}}\ncontrol: {u0: 0.3}\n");
    const auto& in = cfg.instance;
    const auto st = in.problem().solve(in.control);
    EXPECT_EQ(evaluate_cost(st, in.cost, in.grid, in.tgrid), 0.0);
}

TEST_F(TempDir, CsvRoundTripIsBitIdentical) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1e3, 1e3);
    std::vector<Eigen::VectorXd> s(4, Eigen::VectorXd(6));
    for (auto& v : s) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = U(rng) * std::pow(10.0, i - 3);
    s[1][2] = 0.1;
    s[2][0] = -0.0;
    s[3][5] = 5e-324;
    write_series_csv(dir / "x.csv", s);
    const auto back = read_series_csv(dir / "x.csv");
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        for (Eigen::Index i = 0; i < s[k].size(); ++i) {
            EXPECT_EQ(std::memcmp(&back[k][i], &s[k][i], sizeof(double)), 0);
        }
    }
    write("bad.csv", "time_index,node_index,value\n0,1,2.0\n");
    EXPECT_THROW(read_series_csv(dir / "bad.csv"), InvalidArgument);
}

TEST(Io, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST_F(TempDir, SimulateZeroDataWritesZeros) {
    const auto cfg = write("zero.yaml", "grid: {node_counts: [9]}\ntime: {N: 8}\nseed: 5\n");
    EXPECT_EQ(run({"simulate", cfg, dir / "out", std::nullopt, Fault::none}), exit_ok);
    for (const char* f : {"theta.csv", "phi.csv", "xi.csv", "theta_gamma.csv"}) {
        const auto s = read_series_csv(dir / "out" / f);
        EXPECT_EQ(s.size(), 9u);
        for (const auto& v : s) EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
    }
    const auto manifest = read_text(dir / "out" / "manifest.json");
    EXPECT_NE(manifest.find(sha256_hex(read_text(cfg))), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 5"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
}

TEST_F(TempDir, SeedFlagOverridesConfig) {
    const auto cfg = write("zero.yaml", "grid: {node_counts: [9]}\ntime: {N: 2}\nseed: 5\n");
    EXPECT_EQ(run({"simulate", cfg, dir / "out", 123u, Fault::none}), exit_ok);
    EXPECT_NE(read_text(dir / "out" / "manifest.json").find("\"seed\": 123"), std::string::npos);
}

TEST_F(TempDir, GradcheckWithFaultExitsNonzero) {
    const auto cfg = fs::path(PFC_TEST_DATA) / "logarithmic.yaml";
    EXPECT_EQ(run({"gradcheck", cfg, dir / "ok", std::nullopt, Fault::none}), exit_ok);
    EXPECT_EQ(run({"gradcheck", cfg, dir / "bad", std::nullopt, Fault::negate_gradient}), exit_check_failed);
    EXPECT_NE(read_text(dir / "bad" / "manifest.json").find("check_failed"), std::string::npos);
}

TEST_F(TempDir, ManifestWrittenOnBadConfig) {
    const auto cfg = write("bad.yaml", "grid: {node_counts: [9]}\ntime: {N: 4}\ncontrol: {u_min: 2, u_max: 1}\n");
    EXPECT_EQ(run({"simulate", cfg, dir / "out", std::nullopt, Fault::none}), exit_bad_input);
    const auto m = read_text(dir / "out" / "manifest.json");
    EXPECT_NE(m.find("bad_input"), std::string::npos);
    EXPECT_NE(m.find(sha256_hex(read_text(cfg))), std::string::npos);
}

TEST_F(TempDir, SolverFailureRecordsTheStep) {
    const auto cfg = write("fail.yaml", R"(
grid: {node_counts: [9]}
time: {N: 4}
potential: {variant: logarithmic}
initial: {phi0: 0.5, theta0: 0.5}
solver: {newton_max_iterations: 1, retry_budget: 0}
)");
    EXPECT_EQ(run({"simulate", cfg, dir / "out", std::nullopt, Fault::none}), exit_solver_failure);
    const auto m = read_text(dir / "out" / "manifest.json");
    EXPECT_NE(m.find("\"failing_step\": 0"), std::string::npos) << m;
}

TEST_F(TempDir, OptimizeSelfTrackingReducesTheCost) {
    const auto cfg = fs::path(PFC_TEST_DATA) / "self_tracking.yaml";
    EXPECT_EQ(run({"optimize", cfg, dir / "out", std::nullopt, Fault::none}), exit_ok);
    const auto summary = read_text(dir / "out" / "summary.json");
    const auto pos = summary.find("\"cost_reduction\": ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_LE(std::stod(summary.substr(pos + 18)), 1e-6);
    EXPECT_NE(read_text(dir / "out" / "manifest.json").find("cost_history"), std::string::npos);
    EXPECT_EQ(read_series_csv(dir / "out" / "control.csv").size(), 8u);
}

TEST_F(TempDir, UnknownSubcommandIsBadInput) {
    const auto cfg = write("zero.yaml", "grid: {node_counts: [9]}\ntime: {N: 2}\n");
    EXPECT_EQ(run({"frobnicate", cfg, dir / "out", std::nullopt, Fault::none}), exit_bad_input);
}

}  // namespace
