#include "jamcraft/suboptimal.hpp"

#include "jamcraft/spectral.hpp"

#include <array>
#include <cmath>

namespace jamcraft {

namespace {

// Tighter than the 1e-9 contract so the returned point clears it comfortably.
constexpr double kPsdTol = 1e-12;

double fit_lambda(const RealVector& values, double target)
{
    return bisect_multiplier(
        [&](double lambda) {
            double t = 0.0;
            for (Index i = 0; i < values.size(); ++i)
                t += waterfill_term(values(i), lambda);
            return t;
        },
        target);
}

bool feasible(const SpectralData& s, const HermitianMatrix& d0, double p_z, double eps)
{
    return is_psd(suboptimal_candidate(s, d0, p_z, eps), kPsdTol);
}

SpectralData range_of(const HermitianMatrix& a_tilde, bool full_rank)
{
    const Eigensystem es = evd(a_tilde);
    if (full_rank)
        return {es.vectors, es.values.cwiseMax(0.0)};
    const double top = es.values.size() ? es.values(0) : 0.0;
    Index rank = 0;
    if (top > 0.0)
        while (rank < es.values.size() && es.values(rank) > kRankTolerance * top)
            ++rank;
    return {es.vectors.leftCols(rank), es.values.head(rank)};
}

}  // namespace

HermitianMatrix suboptimal_candidate(const SpectralData& spectrum, const HermitianMatrix& d0,
                                     double p_z, double epsilon, double* lambda_out)
{
    const double target = p_z + (1.0 - epsilon) * d0.trace();
    const double lambda = fit_lambda(spectrum.values, target);
    if (lambda_out)
        *lambda_out = lambda;
    RealVector shaped(spectrum.values.size());
    for (Index i = 0; i < shaped.size(); ++i)
        shaped(i) = waterfill_term(spectrum.values(i), lambda);
    return from_spectrum(spectrum.vectors, shaped) - d0 * (1.0 - epsilon);
}

EpsilonLambda epsilon_lambda_search(const SpectralData& spectrum, const HermitianMatrix& d0,
                                    double p_z)
{
    if (!is_pd(d0, 0.0))
        throw DomainError("epsilon_lambda_search: d0 must be positive definite");
    EpsilonLambda out;
    const auto finish = [&](double eps) {
        out.epsilon = eps;
        suboptimal_candidate(spectrum, d0, p_z, eps, &out.lambda);
        return out;
    };

    constexpr std::array<double, 5> probes{0.0, 0.25, 0.5, 0.75, 1.0};
    std::array<bool, 5> ok{};
    for (std::size_t i = 0; i < probes.size(); ++i)
        ok[i] = feasible(spectrum, d0, p_z, probes[i]);
    if (!ok.back())
        throw ContractViolation("epsilon_lambda_search: no PSD candidate for any ε in [0, 1]");
    if (ok.front())
        return finish(0.0);

    std::size_t first = 0;
    while (!ok[first])
        ++first;
    bool monotone = true;
    for (std::size_t i = first; i < ok.size(); ++i)
        monotone = monotone && ok[i];

    double lo = 0.0;
    double hi = 1.0;
    if (monotone) {
        lo = probes[first - 1];
        hi = probes[first];
    } else {
        out.probe_monotone = false;
        // Linear scan from zero; the first feasible step closes the bracket.
        constexpr double kStep = 1e-3;
        for (int k = 1; k <= 1000; ++k) {
            const double eps = std::min(1.0, k * kStep);
            if (feasible(spectrum, d0, p_z, eps)) {
                hi = eps;
                lo = eps - kStep;
                break;
            }
        }
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(spectrum, d0, p_z, mid))
            hi = mid;
        else
            lo = mid;
    }
    return finish(hi);
}

SuboptimalSolution suboptimal_pd(const EffectiveDecomposition& eff, double p_z)
{
    if (!(p_z > 0.0))
        throw InvalidInput("suboptimal_pd: p_z must be positive");
    if (!eff.signal_is_pd())
        throw DomainError("suboptimal_pd: H_r Q_s H_rᴴ is not positive definite");
    const SpectralData spectrum = range_of(eff.a_tilde, true);
    SuboptimalSolution out;
    out.params = epsilon_lambda_search(spectrum, eff.d0, p_z);
    out.q_prime = suboptimal_candidate(spectrum, eff.d0, p_z, out.params.epsilon);
    return out;
}

SuboptimalSolution suboptimal_psd(const EffectiveDecomposition& eff, double p_z)
{
    if (!(p_z > 0.0))
        throw InvalidInput("suboptimal_psd: p_z must be positive");
    const SpectralData spectrum = range_of(eff.a_tilde, false);
    const double top = spectrum.values.size() ? spectrum.values(0) : 0.0;
    SuboptimalSolution out;
    if (spectrum.values.size() == 0 ||
        !(top > 1e-14 * eff.d0.matrix().diagonal().real().maxCoeff())) {
        out.q_prime = HermitianMatrix::zero(eff.r_z);
        return out;
    }
    out.params = epsilon_lambda_search(spectrum, eff.d0, p_z);
    out.q_prime = suboptimal_candidate(spectrum, eff.d0, p_z, out.params.epsilon);
    return out;
}

}  // namespace jamcraft
