#include "jamcraft/spectral.hpp"
#include "jamcraft/suboptimal.hpp"

namespace jamcraft {

JammerSolution solve_single(const JammingScenario& sc, Fallback prefer, const SpcaOptions& opts)
{
    sc.validate();
    JammerSolution out;
    const std::optional<EffectiveDecomposition> eff = effective_quantities(sc);
    if (!eff || sc.jam_budget == 0.0) {
        out.q_z = HermitianMatrix::zero(sc.n_z());
        out.rate = rate_single(sc, out.q_z);
        out.method = Method::zero;
        out.diagnostics.psd_condition_held = true;
        return out;
    }

    const double p_z = sc.jam_budget;
    const bool pd = eff->signal_is_pd();
    const ClosedFormOutcome cf =
        pd ? closed_form_pd(*eff, p_z, sc.noise_power) : closed_form_psd(*eff, p_z, sc.noise_power);
    out.diagnostics.lambda = cf.lambda;
    out.diagnostics.psd_condition_held = cf.psd_ok;

    HermitianMatrix q_prime;
    if (cf.psd_ok) {
        q_prime = cf.q_prime;
        out.method = Method::closed_form;
    } else if (prefer == Fallback::spca) {
        SpcaResult r = spca_iterate(*eff, p_z, opts);
        q_prime = std::move(r.q_prime);
        out.method = Method::spca;
        out.diagnostics.iterations = r.trace.iterations;
        out.diagnostics.converged = r.trace.converged;
    } else {
        SuboptimalSolution s = pd ? suboptimal_pd(*eff, p_z) : suboptimal_psd(*eff, p_z);
        q_prime = std::move(s.q_prime);
        out.method = Method::suboptimal;
        out.diagnostics.lambda = s.params.lambda;
        out.diagnostics.epsilon = s.params.epsilon;
    }
    out.diagnostics.kkt_residual = kkt_residual(q_prime, eff->a_tilde, eff->d0, p_z);
    out.q_z = assemble_qz(*eff, q_prime, sc.n_z());
    out.rate = rate_single(sc, out.q_z);
    return out;
}

}  // namespace jamcraft
