#include "jamcraft/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace jamcraft {

void JammingScenario::validate() const
{
    if (h_r.rows() == 0 || h_r.cols() == 0 || h_z.cols() == 0)
        throw InvalidInput("scenario: empty channel matrix");
    if (h_r.rows() != h_z.rows())
        throw InvalidInput("scenario: h_r has " + std::to_string(h_r.rows()) +
                           " rows but h_z has " + std::to_string(h_z.rows()));
    if (q_s.dim() != h_r.cols())
        throw InvalidInput("scenario: q_s dimension does not match h_r columns");
    if (!all_finite(h_r) || !all_finite(h_z))
        throw InvalidInput("scenario: non-finite channel entry");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw InvalidInput("scenario: noise_power must be positive");
    if (!(jam_budget >= 0.0) || !std::isfinite(jam_budget))
        throw InvalidInput("scenario: jam_budget must be nonnegative");
    if (!is_psd(q_s, 1e-9))
        throw InvalidInput("scenario: q_s is not PSD");
}

HermitianMatrix JammingScenario::signal_gram() const { return congruence(h_r, q_s); }

bool EffectiveDecomposition::signal_is_pd() const { return is_pd(b, kRankTolerance); }

std::string to_string(Method m)
{
    switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::spca: return "spca";
    case Method::suboptimal: return "suboptimal";
    case Method::zero: return "zero";
    }
    return "unknown";
}

double rate_single(const JammingScenario& sc, const HermitianMatrix& q_z)
{
    if (q_z.dim() != sc.n_z())
        throw InvalidInput("rate_single: q_z is " + std::to_string(q_z.dim()) + "x" +
                           std::to_string(q_z.dim()) + ", expected n_z = " +
                           std::to_string(sc.n_z()));
    if (sc.h_r.rows() != sc.h_z.rows() || sc.q_s.dim() != sc.h_r.cols())
        throw InvalidInput("rate_single: inconsistent scenario dimensions");
    const Index n_r = sc.n_r();
    const HermitianMatrix interference =
        congruence(sc.h_z, q_z) + HermitianMatrix::identity(n_r) * sc.noise_power;
    // log|I + K W⁻¹| = log|K + W| - log|W| keeps both arguments PD.
    const double rate = log_det(sc.signal_gram() + interference) - log_det(interference);
    return std::max(rate, 0.0);
}

double unjammed_rate(const JammingScenario& sc)
{
    return rate_single(sc, HermitianMatrix::zero(sc.n_z()));
}

std::optional<EffectiveDecomposition> effective_quantities(const JammingScenario& sc)
{
    sc.validate();
    const SingularSystem s = svd(sc.h_z);
    const double top = s.sigma.size() ? s.sigma(0) : 0.0;
    Index r_z = 0;
    if (top > 0.0)
        while (r_z < s.sigma.size() && s.sigma(r_z) > kRankTolerance * top)
            ++r_z;
    if (r_z == 0)
        return std::nullopt;

    EffectiveDecomposition eff;
    eff.u_z = s.u;
    eff.v_z = s.v;
    eff.omega_plus = s.sigma.head(r_z);
    eff.r_z = r_z;
    eff.noise_power = sc.noise_power;

    const Index n_r = sc.n_r();
    const Index rest = n_r - r_z;
    eff.b = congruence(s.u.adjoint(), sc.signal_gram());
    const ComplexMatrix& b = eff.b.matrix();
    eff.b11 = b.topLeftCorner(r_z, r_z);
    eff.b12 = b.topRightCorner(r_z, rest);
    eff.b21 = b.bottomLeftCorner(rest, r_z);
    eff.b22 = b.bottomRightCorner(rest, rest);

    if (rest > 0) {
        const ComplexMatrix shifted =
            eff.b22 + sc.noise_power * ComplexMatrix::Identity(rest, rest);
        eff.b_tilde = HermitianMatrix(eff.b11 - eff.b12 * shifted.llt().solve(eff.b21));
    } else {
        eff.b_tilde = HermitianMatrix(eff.b11);
    }

    const RealVector inv_omega = eff.omega_plus.cwiseInverse();
    const ComplexMatrix scale = inv_omega.cast<Complex>().asDiagonal();
    eff.a_tilde = congruence(scale, eff.b_tilde);
    eff.d0 = HermitianMatrix::diagonal(sc.noise_power * inv_omega.cwiseAbs2());
    return eff;
}

RateSplit reduced_rate(const EffectiveDecomposition& eff, const HermitianMatrix& q_prime,
                       double noise_power)
{
    if (q_prime.dim() != eff.r_z)
        throw InvalidInput("reduced_rate: q_prime must be r_z x r_z");
    RateSplit split;
    const HermitianMatrix shifted = q_prime + eff.d0;
    split.r_bar = log_det(shifted + eff.a_tilde) - log_det(shifted);
    const Index rest = eff.n_r() - eff.r_z;
    if (rest > 0) {
        const HermitianMatrix b22(eff.b22);
        split.r0 = log_det(HermitianMatrix::identity(rest) + b22 * (1.0 / noise_power));
    }
    return split;
}

HermitianMatrix assemble_qz(const EffectiveDecomposition& eff, const HermitianMatrix& q_prime,
                            Index n_z)
{
    if (q_prime.dim() != eff.r_z || eff.v_z.rows() != n_z)
        throw InvalidInput("assemble_qz: dimension mismatch");
    return congruence(eff.v_z.leftCols(eff.r_z), q_prime);
}

HermitianMatrix waterfilling(const ComplexMatrix& h_r, double transmit_power, double noise_power)
{
    if (!(transmit_power > 0.0))
        throw InvalidInput("waterfilling: transmit_power must be positive");
    if (!(noise_power > 0.0))
        throw InvalidInput("waterfilling: noise_power must be positive");
    const Index n_t = h_r.cols();
    const SingularSystem s = svd(h_r);
    const double top = s.sigma.size() ? s.sigma(0) : 0.0;
    if (!(top > 0.0))
        return HermitianMatrix::identity(n_t) * (transmit_power / static_cast<double>(n_t));

    Index modes = 0;
    while (modes < s.sigma.size() && s.sigma(modes) > kRankTolerance * top)
        ++modes;
    // Inverse gains σ²/s_i² are ascending because s is descending.
    RealVector floor(modes);
    for (Index i = 0; i < modes; ++i)
        floor(i) = noise_power / (s.sigma(i) * s.sigma(i));

    // Largest k whose water level μ_k = (P + Σ_{i<k} floor_i)/k clears floor_{k-1}.
    double level = 0.0;
    double cumulative = 0.0;
    for (Index k = 1; k <= modes; ++k) {
        cumulative += floor(k - 1);
        const double candidate = (transmit_power + cumulative) / static_cast<double>(k);
        if (candidate > floor(k - 1))
            level = candidate;
        else
            break;
    }
    RealVector power = RealVector::Zero(n_t);
    for (Index i = 0; i < modes; ++i)
        power(i) = std::max(level - floor(i), 0.0);
    return from_spectrum(s.v, power);
}

}  // namespace jamcraft
