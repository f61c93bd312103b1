#pragma once

// Closed-form suboptimal jamming covariance. The noise-shaping term -D0 of the
// optimal closed form is scaled by (1 - ε) with the smallest ε in [0, 1] that
// makes the result PSD; λ is re-fitted for every ε so the budget stays tight.

#include "jamcraft/hermitian.hpp"
#include "jamcraft/scenario.hpp"

namespace jamcraft {

/// Positive part of the EVD of Ã: the columns of `vectors` span its range.
struct SpectralData {
    ComplexMatrix vectors;
    RealVector values;
};

struct EpsilonLambda {
    double epsilon = 0.0;
    double lambda = 0.0;
    bool probe_monotone = true;   // false when the linear-scan fallback ran
};

/// U sqrt(Λ/λ + Λ²/4) Uᴴ - U Λ Uᴴ / 2 + (ε - 1) D0 with λ fitted so the trace
/// equals p_z.
HermitianMatrix suboptimal_candidate(const SpectralData& spectrum, const HermitianMatrix& d0,
                                     double p_z, double epsilon, double* lambda_out = nullptr);

/// Smallest ε in [0, 1] whose candidate is PSD (relative tolerance 1e-12). Throws
/// ContractViolation if even ε = 1 fails.
EpsilonLambda epsilon_lambda_search(const SpectralData& spectrum, const HermitianMatrix& d0,
                                    double p_z);

struct SuboptimalSolution {
    HermitianMatrix q_prime;
    EpsilonLambda params;
};

/// Full-rank form; requires H_r Q_s H_rᴴ ≻ 0 (DomainError otherwise).
SuboptimalSolution suboptimal_pd(const EffectiveDecomposition& eff, double p_z);

/// Rank-aware form restricted to the range of Ã; Q' = 0 when Ã vanishes.
SuboptimalSolution suboptimal_psd(const EffectiveDecomposition& eff, double p_z);

}  // namespace jamcraft
