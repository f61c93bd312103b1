// Command-line front end: single solves, configured sweeps, full-scale
// reproductions and the self-check suite.

#include "jamcraft/config.hpp"
#include "jamcraft/harness.hpp"
#include "jamcraft/validation.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace jamcraft;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kNumerical = 3, kNotConverged = 4 };

json diagnostics_json(const SolverDiagnostics& d)
{
    return {{"iterations", d.iterations},     {"lambda", d.lambda},
            {"epsilon", d.epsilon},           {"kkt_residual", d.kkt_residual},
            {"psd_condition_held", d.psd_condition_held}, {"converged", d.converged}};
}

json solution_json(const std::string& kind, const JammerSolution& s)
{
    return {{"kind", kind},
            {"method", to_string(s.method)},
            {"rate", s.rate},
            {"q_z", matrix_to_json(s.q_z.matrix())},
            {"diagnostics", diagnostics_json(s.diagnostics)}};
}

int run_solve(const std::string& path, bool strict)
{
    const ProblemConfig cfg = parse_problem(load_json(path));
    json out;
    bool converged = true;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SingleProblem>) {
                const JammerSolution s = solve_single(p.scenario, p.fallback, cfg.spca);
                out = solution_json("single", s);
                converged = s.diagnostics.converged;
            } else if constexpr (std::is_same_v<T, MacScenario>) {
                const JammerSolution s = solve_single(mac_reduce(p), Fallback::spca, cfg.spca);
                out = solution_json("mac", s);
                converged = s.diagnostics.converged;
            } else if constexpr (std::is_same_v<T, BcScenario>) {
                const JammerSolution s = bc_solve(p, cfg.spca);
                out = solution_json("bc", s);
                out["rate_unjammed"] = bc_rate(p, HermitianMatrix::zero(p.n_z()));
                converged = s.diagnostics.converged;
            } else if constexpr (std::is_same_v<T, IcScenario>) {
                const JammerSolution s = ic_solve(p, cfg.spca);
                out = solution_json("ic", s);
                out["rate_unjammed"] = ic_rate(p, HermitianMatrix::zero(p.n_z()));
                converged = s.diagnostics.converged;
            } else {
                const TdmSolution s = p.solver == "joint"
                                          ? tdm_solve_joint(p.scenario, cfg.spca)
                                          : tdm_solve_grid(p.scenario, p.grid_steps, cfg.spca);
                json q = json::array();
                for (const HermitianMatrix& m : s.q_z)
                    q.push_back(matrix_to_json(m.matrix()));
                out = {{"kind", "tdm"},       {"solver", p.solver},
                       {"sum_rate", s.sum_rate}, {"rho", s.rho},
                       {"q_z", q},            {"iterations", s.iterations},
                       {"converged", s.converged}};
                converged = s.converged;
            }
        },
        cfg.problem);
    std::cout << out.dump(2) << "\n";
    if (strict && !converged) {
        std::cerr << "jamcraft: solver did not converge\n";
        return kNotConverged;
    }
    return kOk;
}

int write_sweep(const ExperimentConfig& cfg, const std::string& out)
{
    const SweepResult r = run_experiment(cfg);
    if (out == "-")
        write_csv(r, std::cout);
    else
        write_csv(r, out);
    return kOk;
}

int run_validate(const std::string& scale, std::uint64_t seed)
{
    const ValidationReport report =
        validate_suite(seed, scale == "full" ? Scale::full : Scale::quick);
    for (const PropertyOutcome& p : report.properties) {
        std::cout << (p.passed ? "PASS " : "FAIL ") << p.name << " (" << p.cases
                  << " cases): " << p.detail << "\n";
        if (!p.passed)
            std::cout << "  counterexample: " << p.counterexample << "\n";
    }
    return report.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Jamming covariance design for MIMO Gaussian links"};
    app.require_subcommand(1);

    bool strict = false;
    CLI::App* solve = app.add_subcommand("solve", "Solve one scenario and print the result as JSON");
    std::string solve_path;
    solve->add_option("config", solve_path, "Scenario JSON file")->required();
    solve->add_flag("--strict", strict, "Exit with code 4 if an iterative solver did not converge");

    CLI::App* sweep = app.add_subcommand("sweep", "Run a configured Monte Carlo sweep");
    std::string sweep_path;
    std::string sweep_out;
    sweep->add_option("config", sweep_path, "Experiment JSON file")->required();
    sweep->add_option("--out", sweep_out, "CSV output path, '-' for stdout")->required();

    CLI::App* reproduce = app.add_subcommand("reproduce", "Run a built-in experiment with its defaults");
    std::string figure;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string repro_out;
    bool clamp = false;
    reproduce->add_option("figure", figure, "fig1, fig2, fig3 or fig45")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig45"}));
    reproduce->add_option("--seed", seed, "Base seed");
    reproduce->add_option("--trials", trials, "Channel realizations per grid point");
    reproduce->add_option("--out", repro_out, "CSV output path, '-' for stdout")->required();
    reproduce->add_flag("--clamp-indefinite", clamp,
                        "fig1/fig2: project indefinite closed-form candidates before rating them");

    CLI::App* validate = app.add_subcommand("validate", "Run the self-check suite");
    std::string scale = "quick";
    std::uint64_t validate_seed = 1;
    validate->add_option("--scale", scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    validate->add_option("--seed", validate_seed, "Seed for the random scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*solve)
            return run_solve(solve_path, strict);
        if (*sweep)
            return write_sweep(parse_experiment(load_json(sweep_path)), sweep_out);
        if (*reproduce) {
            ExperimentConfig cfg = default_config(figure);
            if (seed)
                cfg.seed = *seed;
            if (trials)
                cfg.trials = *trials;
            cfg.clamp_indefinite = clamp;
            cfg.validate();
            return write_sweep(cfg, repro_out);
        }
        return run_validate(scale, validate_seed);
    } catch (const InvalidInput& e) {
        std::cerr << "jamcraft: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "jamcraft: " << e.what() << "\n";
        return kNumerical;
    } catch (const ContractViolation& e) {
        std::cerr << "jamcraft: " << e.what() << "\n";
        return kNumerical;
    }
}
