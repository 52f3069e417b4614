#include "pfc/cli/run.hpp"
#include "pfc/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Boundary control of a phase-field system with dynamic boundary condition"};
    app.require_subcommand(1, 1);

    pfc::cli::RunRequest req;
    std::string fault;
    std::uint64_t seed = 0;

    for (const char* name : {"simulate", "gradcheck", "optimize", "sweep-eps", "contdep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", req.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", req.out, "output directory")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--inject-fault", fault, "negate-gradient or perturb-trajectory");
    }
    CLI11_PARSE(app, argc, argv);

    auto* sub = app.get_subcommands().front();
    req.subcommand = sub->get_name();
    if (sub->count("--seed") > 0) req.seed = seed;
    try {
        req.fault = pfc::parse_fault(fault);
    } catch (const pfc::Error& e) {
        std::cerr << "pfc: " << e.what() << '\n';
        return pfc::cli::exit_bad_input;
    }
    return pfc::cli::run(req);
}
