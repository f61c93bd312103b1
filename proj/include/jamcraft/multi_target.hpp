#pragma once

// Jamming several legitimate links at once: a multiple-access receiver, a
// broadcast transmitter with several receivers, time-multiplexed pairs, and
// an interference network in which all pairs transmit simultaneously.

#include "jamcraft/hermitian.hpp"
#include "jamcraft/scenario.hpp"
#include "jamcraft/spca.hpp"

#include <vector>

namespace jamcraft {

struct MacLink {
    ComplexMatrix h;        // n_r x n_ti
    HermitianMatrix q;      // n_ti x n_ti
};

struct MacScenario {
    std::vector<MacLink> links;
    ComplexMatrix h_z;
    double noise_power = 1.0;
    double jam_budget = 0.0;

    void validate() const;
};

/// Single-target scenario whose H_r Q_s H_rᴴ equals Σ H_i Q_i H_iᴴ: H_r is the
/// eigenbasis of the sum and Q_s its clipped eigenvalues.
JammingScenario mac_reduce(const MacScenario& mac);

struct BcReceiver {
    ComplexMatrix h;        // n_ri x n_t
    ComplexMatrix h_z;      // n_ri x n_z
    double noise_power = 1.0;
};

struct BcScenario {
    HermitianMatrix q_s;
    std::vector<BcReceiver> receivers;
    double jam_budget = 0.0;

    Index n_z() const { return receivers.empty() ? 0 : receivers.front().h_z.cols(); }
    void validate() const;
};

/// log|H Q_s Hᴴ + D + Θ| - log|D + Θ|, Θ = blockdiag(H_zi Q_z H_ziᴴ).
double bc_rate(const BcScenario& bc, const HermitianMatrix& q_z);

JammerSolution bc_solve(const BcScenario& bc, const SpcaOptions& opts = {});

struct TdmPair {
    ComplexMatrix h;        // n_ri x n_ti
    HermitianMatrix q;
    ComplexMatrix h_z;      // n_ri x n_zi
    double noise_power = 1.0;
    double beta = 1.0;      // share of the frame
};

struct TdmScenario {
    std::vector<TdmPair> pairs;
    double jam_budget = 0.0;   // bounds Σ β_i Tr Q_zi

    void validate() const;
    /// Pair i as a stand-alone single-target scenario with the given budget.
    JammingScenario pair_scenario(std::size_t i, double budget) const;
};

struct TdmSolution {
    std::vector<HermitianMatrix> q_z;
    std::vector<double> rho;   // β_i Tr Q_zi / Σ_j β_j Tr Q_zj, uniform when nothing is spent
    double sum_rate = 0.0;
    int iterations = 0;
    bool converged = true;
};

double tdm_rate(const TdmScenario& tdm, const std::vector<HermitianMatrix>& q_z);

/// Simplex grid over ρ with step 1/grid_steps; each pair is solved on its own
/// with budget ρ_i P_z / β_i. Pair solutions depend only on their own ρ_i and
/// are cached, so the cost is m·(grid_steps + 1) single-target solves.
TdmSolution tdm_solve_grid(const TdmScenario& tdm, int grid_steps, const SpcaOptions& opts = {});

/// Joint SPCA over all Q_zi under the coupled budget.
TdmSolution tdm_solve_joint(const TdmScenario& tdm, const SpcaOptions& opts = {});

struct IcPair {
    ComplexMatrix h;        // n_ri x n_ti, own link
    HermitianMatrix q;
    ComplexMatrix h_z;      // n_ri x n_z
    double noise_power = 1.0;
};

struct IcScenario {
    std::vector<IcPair> pairs;
    /// cross[i][j]: channel from transmitter j into receiver i (n_ri x n_tj).
    /// Diagonal entries are ignored; an empty matrix means no coupling.
    std::vector<std::vector<ComplexMatrix>> cross;
    double jam_budget = 0.0;

    Index n_z() const { return pairs.empty() ? 0 : pairs.front().h_z.cols(); }
    void validate() const;
    /// σ_i² I + Σ_{j≠i} H_ji Q_j H_jiᴴ.
    HermitianMatrix interference_plus_noise(std::size_t i) const;
};

double ic_rate(const IcScenario& ic, const HermitianMatrix& q_z);

JammerSolution ic_solve(const IcScenario& ic, const SpcaOptions& opts = {});

/// Projection onto {X_i ⪰ 0, Σ Tr X_i <= budget}: one capped simplex over the
/// concatenated eigenvalues of all blocks.
Blocks shared_budget_projection(const Blocks& x, double budget);

}  // namespace jamcraft
