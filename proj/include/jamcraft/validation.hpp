#pragma once

// Self-checks over random scenarios: optimality cross-checks between solvers,
// first-order conditions, monotonicity and exactness identities. A failing
// property carries the offending scenario as a `solve`-ready JSON document.

#include "jamcraft/spectral.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace jamcraft {

struct PropertyOutcome {
    std::string name;
    bool passed = true;
    int cases = 0;              // instances actually checked
    double worst = 0.0;         // largest violation measure seen
    std::string detail;
    std::string counterexample; // JSON, empty when passed
};

struct ValidationReport {
    std::vector<PropertyOutcome> properties;
    bool passed() const;
};

enum class Scale { quick, full };

using ClosedFormSolver =
    std::function<ClosedFormOutcome(const EffectiveDecomposition&, double p_z, double noise_power)>;

/// Solvers under test; replaced in tests to check that the properties notice
/// a broken implementation.
struct SolverHooks {
    ClosedFormSolver closed_form = closed_form_pd;
};

/// Closed form and SPCA agree (within 1e-6 nats) wherever the closed form is PSD.
PropertyOutcome check_closed_form_vs_spca(std::uint64_t seed, int cases,
                                          const SolverHooks& hooks = {});

ValidationReport validate_suite(std::uint64_t seed, Scale scale, const SolverHooks& hooks = {});

}  // namespace jamcraft
