#pragma once

// Closed-form jamming covariances built from the generalized waterfilling
// primitive, and the single-target dispatcher that falls back to the
// iterative or suboptimal solvers when the closed form is indefinite.

#include "jamcraft/hermitian.hpp"
#include "jamcraft/scenario.hpp"
#include "jamcraft/spca.hpp"

#include <functional>

namespace jamcraft {

/// Finds λ > 0 with trace_of(λ) = target for a continuous trace map that is
/// nonincreasing in λ, diverging as λ → 0. The bracket starts at
/// [machine epsilon, 1] and is widened geometrically when needed.
double bisect_multiplier(const std::function<double(double)>& trace_of, double target);

/// sqrt(a/λ + a²/4) - a/2, written to avoid cancellation when a·λ is large.
double waterfill_term(double a, double lambda);

struct UnitTraceSolution {
    HermitianMatrix x;
    double lambda = 0.0;
};

/// argmin over Tr X <= 1, X ⪰ 0 of log|I + A X⁻¹| for A ≻ 0:
/// X = U_A sqrt(Λ_A/λ + Λ_A²/4) U_Aᴴ - A/2 with Tr X = 1.
UnitTraceSolution unit_trace_minimize(const HermitianMatrix& a);

struct ClosedFormOutcome {
    HermitianMatrix q_prime;
    double lambda = 0.0;
    bool psd_ok = false;
};

/// Optimal Q' when H_r Q_s H_rᴴ ≻ 0, valid whenever the result is PSD. The
/// candidate is returned even when indefinite; psd_ok reports which case
/// occurred. Throws DomainError if B is not positive definite.
ClosedFormOutcome closed_form_pd(const EffectiveDecomposition& eff, double p_z, double noise_power);

/// Rank-aware variant for PSD H_r Q_s H_rᴴ, restricted to the range of Ã.
/// Returns Q' = 0 when Ã vanishes (jamming cannot change the rate).
ClosedFormOutcome closed_form_psd(const EffectiveDecomposition& eff, double p_z, double noise_power);

/// Identity jamming channel: per-eigenvalue clamped solution
/// U_B (sqrt(Λ_B/λ + Λ_B²/4) - Λ_B/2 - σ²I)₊ U_Bᴴ with trace p_z.
HermitianMatrix identity_channel_solution(const HermitianMatrix& b, double noise_power, double p_z);

enum class Fallback { spca, suboptimal };

/// Full single-target procedure: closed form when it is PSD, otherwise the
/// requested fallback. H_z ≈ 0 or a zero budget yields Q_z = 0 (method zero).
JammerSolution solve_single(const JammingScenario& sc, Fallback prefer,
                            const SpcaOptions& opts = {});

}  // namespace jamcraft
