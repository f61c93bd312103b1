#pragma once

// Experiment and scenario configuration read from JSON. Parsing is strict:
// unknown fields, wrong types and out-of-range values are rejected with the
// path of the offending field.

#include "jamcraft/multi_target.hpp"
#include "jamcraft/scenario.hpp"
#include "jamcraft/spca.hpp"
#include "jamcraft/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace jamcraft {

class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

struct ReceiverSpec {
    int n_r = 4;
    double noise_power = 1.0;
};

struct PairSpec {
    int n_t = 4;
    int n_r = 4;
    double beta = 0.5;
    double noise_power = 1.0;
};

struct ExperimentConfig {
    std::string experiment = "fig1";   // fig1 | fig2 | fig3 | fig45 | custom
    std::uint64_t seed = 1;
    int trials = 800;

    // single link (fig1, fig2, custom); n_t and n_z are shared with fig3
    int n_t = 4;
    int n_r = 3;
    int n_z = 5;
    double transmit_power = 3.0;
    double noise_power = 1.0;
    std::vector<double> pz_grid;
    std::vector<std::string> methods;   // closed_form | spca | suboptimal
    bool clamp_indefinite = false;
    bool require_pd_signal = true;

    // fig3
    std::vector<ReceiverSpec> receivers;

    // fig45
    std::vector<PairSpec> pairs;
    double jam_budget = 4.0;
    double total_power = 5.0;
    std::vector<double> p1_grid;
    std::vector<double> v1_grid;
    std::string tdm_solver = "joint";   // joint | grid
    int grid_steps = 20;

    SpcaOptions spca;

    /// Throws ConfigError naming the field.
    void validate() const;
};

/// Full-scale defaults for a named experiment.
ExperimentConfig default_config(const std::string& experiment);

/// Fields absent from `doc` keep the defaults of its "experiment".
ExperimentConfig parse_experiment(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical JSON dump (keys sorted).
std::string config_hash(const ExperimentConfig& cfg);

// Single problem instances for `solve`. "kind" selects the model and defaults
// to "single"; matrices are row lists of numbers or [re, im] pairs.
struct SingleProblem {
    JammingScenario scenario;
    Fallback fallback = Fallback::spca;
};
struct TdmProblem {
    TdmScenario scenario;
    std::string solver = "joint";
    int grid_steps = 20;
};
using Problem = std::variant<SingleProblem, MacScenario, BcScenario, TdmProblem, IcScenario>;

struct ProblemConfig {
    Problem problem;
    SpcaOptions spca;
};

ProblemConfig parse_problem(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const ComplexMatrix& m);

/// Reads a file and parses it as JSON; syntax errors become ConfigError.
nlohmann::json load_json(const std::string& path);

}  // namespace jamcraft
