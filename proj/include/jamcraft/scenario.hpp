#pragma once

// The single-link jamming model: legitimate link, jamming link, receiver noise
// and the jammer's power budget, together with the rate expressions and the
// reduced r_z-dimensional problem obtained from the SVD of the jamming channel.

#include "jamcraft/hermitian.hpp"

#include <optional>
#include <string>

namespace jamcraft {

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct JammingScenario {
    ComplexMatrix h_r;      // n_r x n_t legitimate channel
    HermitianMatrix q_s;    // n_t x n_t signal covariance
    ComplexMatrix h_z;      // n_r x n_z jamming channel
    double noise_power = 1.0;
    double jam_budget = 0.0;

    Index n_r() const { return h_r.rows(); }
    Index n_t() const { return h_r.cols(); }
    Index n_z() const { return h_z.cols(); }

    /// Throws InvalidInput if shapes disagree, q_s is not PSD, or powers are
    /// out of range.
    void validate() const;

    /// H_r·Q_s·H_rᴴ.
    HermitianMatrix signal_gram() const;
};

/// Quantities of the reduced problem derived from H_z = U_z Ω_z V_zᴴ.
struct EffectiveDecomposition {
    ComplexMatrix u_z;          // n_r x n_r
    ComplexMatrix v_z;          // n_z x n_z
    RealVector omega_plus;      // r_z positive singular values, descending
    Index r_z = 0;
    double noise_power = 1.0;

    HermitianMatrix b;          // U_zᴴ H_r Q_s H_rᴴ U_z
    ComplexMatrix b11, b12, b21, b22;
    HermitianMatrix b_tilde;    // B11 - B12 (σ²I + B22)⁻¹ B21
    HermitianMatrix a_tilde;    // Ω⁺⁻¹ B̃ Ω⁺⁻ᴴ
    HermitianMatrix d0;         // diag(σ²/ω_i²)

    Index n_r() const { return u_z.rows(); }
    Index n_z() const { return v_z.rows(); }

    /// True when H_r Q_s H_rᴴ (equivalently B) is positive definite under the
    /// relative eigenvalue tolerance kRankTolerance.
    bool signal_is_pd() const;
};

enum class Method { closed_form, spca, suboptimal, zero };

std::string to_string(Method m);

struct SolverDiagnostics {
    int iterations = 0;
    double lambda = 0.0;
    double epsilon = 0.0;
    double kkt_residual = 0.0;
    bool psd_condition_held = false;
    bool converged = true;
};

struct JammerSolution {
    HermitianMatrix q_z;
    double rate = 0.0;      // nats
    Method method = Method::zero;
    SolverDiagnostics diagnostics;
};

/// log|I + H_r Q_s H_rᴴ (H_z Q_z H_zᴴ + σ²I)⁻¹| in nats.
double rate_single(const JammingScenario& sc, const HermitianMatrix& q_z);

/// Rate with no jamming at all.
double unjammed_rate(const JammingScenario& sc);

/// Returns std::nullopt when H_z is numerically zero (r_z = 0); callers then
/// fall back to Q_z = 0.
std::optional<EffectiveDecomposition> effective_quantities(const JammingScenario& sc);

struct RateSplit {
    double r_bar = 0.0;   // part of the rate reachable by jamming
    double r0 = 0.0;      // part living outside the range of H_z
};

/// Splits the rate at Q_z = V_z blockdiag(Q', 0) V_zᴴ. Only requires
/// Q' + D0 ≻ 0, so it also evaluates indefinite closed-form candidates.
RateSplit reduced_rate(const EffectiveDecomposition& eff, const HermitianMatrix& q_prime,
                       double noise_power);

/// Q_z = V_z · blockdiag(Q', 0) · V_zᴴ.
HermitianMatrix assemble_qz(const EffectiveDecomposition& eff, const HermitianMatrix& q_prime,
                            Index n_z);

/// Capacity-achieving Q_s for H_r under total power P (spectral waterfilling).
HermitianMatrix waterfilling(const ComplexMatrix& h_r, double transmit_power, double noise_power);

}  // namespace jamcraft
