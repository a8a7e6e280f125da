// flwin: command-line front end for the link, training and planning experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "flwin/errors.hpp"
#include "flwin/experiment.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accuracy/resource simulator for federated learning over wireless links"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::int64_t trials = 100000;
    std::string output;
    std::string sweep;
    int plan_case = 1;
    std::string link = "ideal";
    std::int64_t max_rounds = 100;

    const char* kinds[] = {"success-prob-up", "success-prob-down", "bandwidth", "compute", "train", "plan", "sweep"};
    std::vector<CLI::App*> subs;
    for (const char* kind : kinds) {
        auto* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--seed", seed, "master seed (u64)");
        sub->add_option("--trials", trials, "Monte Carlo trials / bandwidth samples")->check(CLI::PositiveNumber);
        sub->add_option("--output", output, "CSV output path (stdout when omitted)");
        sub->add_option("--sweep", sweep, "param=v1,v2,...");
        if (std::string(kind) == "plan") {
            sub->add_option("--case", plan_case, "planner case")->check(CLI::IsMember({1, 2, 3}));
        }
        if (std::string(kind) == "train") {
            sub->add_option("--link", link, "link model")->check(CLI::IsMember({"ideal", "stochastic"}));
            sub->add_option("--max-rounds", max_rounds, "round limit")->check(CLI::PositiveNumber);
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    flwin::ExperimentSpec spec;
    try {
        spec.kind = flwin::parse_kind(chosen->get_name());
        if (!config_path.empty()) spec.config = flwin::load_config(config_path);
        if (chosen->count("--seed") > 0) spec.seed = seed;
        spec.trials = trials;
        if (!sweep.empty()) spec.sweep = flwin::parse_sweep(sweep);
        spec.plan_case = plan_case;
        spec.stochastic_links = link == "stochastic";
        spec.max_rounds = max_rounds;
    } catch (const flwin::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    flwin::ExperimentResult result;
    try {
        result = flwin::run_experiment(spec);
    } catch (const flwin::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (output.empty()) {
        std::cout << result.csv;
    } else {
        std::ofstream out(output, std::ios::binary);
        out << result.csv;
        out.close();
        if (!out) {
            std::cerr << "error: cannot write '" << output << "'\n";
            return kExitIo;
        }
        std::cerr << result.summary;
    }
    if (result.infeasible_plan) {
        std::cerr << "error: plan is infeasible for the given budget\n";
        return kExitInfeasible;
    }
    return 0;
}
