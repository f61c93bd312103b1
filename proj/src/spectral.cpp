#include "jamcraft/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jamcraft {

double waterfill_term(double a, double lambda)
{
    if (!(a > 0.0))
        return 0.0;
    const double ratio = a / lambda;
    return ratio / (std::sqrt(ratio + 0.25 * a * a) + 0.5 * a);
}

double bisect_multiplier(const std::function<double(double)>& trace_of, double target)
{
    double lo = std::numeric_limits<double>::epsilon();
    double hi = 1.0;
    for (int k = 0; k < 2100 && trace_of(hi) >= target; ++k)
        hi *= 2.0;
    for (int k = 0; k < 2100 && trace_of(lo) < target; ++k) {
        lo *= 0.5;
        if (lo == 0.0)
            break;
    }
    if (!(trace_of(lo) >= target) || !(trace_of(hi) < target))
        throw ContractViolation("bisect_multiplier: could not bracket the trace equation");

    // Geometric bisection; the trace map varies on a log scale in λ.
    for (int k = 0; k < 400; ++k) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi))
            break;
        if (trace_of(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return std::abs(trace_of(lo) - target) <= std::abs(trace_of(hi) - target) ? lo : hi;
}

UnitTraceSolution unit_trace_minimize(const HermitianMatrix& a)
{
    const Eigensystem es = evd(a);
    if (es.values.size() == 0 || !(es.values.minCoeff() > 0.0))
        throw DomainError("unit_trace_minimize: A must be positive definite");
    const RealVector& vals = es.values;
    const auto trace_of = [&](double lambda) {
        double t = 0.0;
        for (Index i = 0; i < vals.size(); ++i)
            t += waterfill_term(vals(i), lambda);
        return t;
    };
    UnitTraceSolution out;
    out.lambda = bisect_multiplier(trace_of, 1.0);
    RealVector root(vals.size());
    for (Index i = 0; i < vals.size(); ++i)
        root(i) = std::sqrt(vals(i) / out.lambda + 0.25 * vals(i) * vals(i));
    out.x = from_spectrum(es.vectors, root) - a * 0.5;
    return out;
}

namespace {

// log|I + Ã D0⁻¹| <= r·1e-14 below this level, so Ã is treated as zero.
bool vanishes(const RealVector& a_values, const HermitianMatrix& d0)
{
    const double top = a_values.size() ? a_values.maxCoeff() : 0.0;
    const double noise = d0.matrix().diagonal().real().maxCoeff();
    return !(top > 1e-14 * noise);
}

}  // namespace

ClosedFormOutcome closed_form_pd(const EffectiveDecomposition& eff, double p_z, double noise_power)
{
    if (!(p_z > 0.0))
        throw InvalidInput("closed_form_pd: p_z must be positive");
    if (!eff.signal_is_pd())
        throw DomainError("closed_form_pd: H_r Q_s H_rᴴ is not positive definite");

    const Eigensystem es = evd(eff.a_tilde);
    const RealVector& vals = es.values;
    const double target = p_z + eff.d0.trace();
    const auto trace_of = [&](double lambda) {
        double t = 0.0;
        for (Index i = 0; i < vals.size(); ++i)
            t += waterfill_term(vals(i), lambda);
        return t;
    };

    ClosedFormOutcome out;
    out.lambda = bisect_multiplier(trace_of, target);
    RealVector root(vals.size());
    for (Index i = 0; i < vals.size(); ++i) {
        const double a = std::max(vals(i), 0.0);
        root(i) = std::sqrt(a / out.lambda + 0.25 * a * a);
    }
    // Ω⁺⁻¹ (B̃/2 + σ²I) Ω⁺⁻ᴴ
    const ComplexMatrix inv_omega = eff.omega_plus.cwiseInverse().cast<Complex>().asDiagonal();
    const HermitianMatrix shift = congruence(
        inv_omega, eff.b_tilde * 0.5 + HermitianMatrix::identity(eff.r_z) * noise_power);
    out.q_prime = from_spectrum(es.vectors, root) - shift;
    out.psd_ok = is_psd(out.q_prime, 1e-9);
    return out;
}

ClosedFormOutcome closed_form_psd(const EffectiveDecomposition& eff, double p_z,
                                  double /*noise_power: already folded into D0*/)
{
    if (!(p_z > 0.0))
        throw InvalidInput("closed_form_psd: p_z must be positive");
    const Eigensystem es = evd(eff.a_tilde);
    ClosedFormOutcome out;
    if (vanishes(es.values, eff.d0)) {
        out.q_prime = HermitianMatrix::zero(eff.r_z);
        out.lambda = std::numeric_limits<double>::infinity();
        out.psd_ok = true;
        return out;
    }

    const double top = es.values(0);
    Index rank = 0;
    while (rank < es.values.size() && es.values(rank) > kRankTolerance * top)
        ++rank;
    const RealVector positive = es.values.head(rank);
    const ComplexMatrix u1 = es.vectors.leftCols(rank);

    const double target = p_z + eff.d0.trace();
    const auto trace_of = [&](double lambda) {
        double t = 0.0;
        for (Index i = 0; i < rank; ++i)
            t += waterfill_term(positive(i), lambda);
        return t;
    };
    out.lambda = bisect_multiplier(trace_of, target);
    RealVector root(rank);
    for (Index i = 0; i < rank; ++i)
        root(i) = std::sqrt(positive(i) / out.lambda + 0.25 * positive(i) * positive(i));

    // σ²Ω⁺⁻¹Ω⁺⁻ᴴ is exactly D0.
    out.q_prime = from_spectrum(u1, root) - from_spectrum(u1, positive) * 0.5 - eff.d0;
    out.psd_ok = is_psd(out.q_prime, 1e-9);
    return out;
}

HermitianMatrix identity_channel_solution(const HermitianMatrix& b, double noise_power, double p_z)
{
    if (!(p_z > 0.0))
        throw InvalidInput("identity_channel_solution: p_z must be positive");
    const Index n = b.dim();
    const Eigensystem es = evd(b);
    const RealVector vals = es.values.cwiseMax(0.0);
    if (!(vals.maxCoeff() > 0.0))
        return HermitianMatrix::identity(n) * (p_z / static_cast<double>(n));

    const auto clamped = [&](double lambda) {
        RealVector out(n);
        for (Index i = 0; i < n; ++i)
            out(i) = std::max(waterfill_term(vals(i), lambda) - noise_power, 0.0);
        return out;
    };
    const double lambda = bisect_multiplier([&](double l) { return clamped(l).sum(); }, p_z);
    return from_spectrum(es.vectors, clamped(lambda));
}

}  // namespace jamcraft
