#include "jamcraft/validation.hpp"

#include "jamcraft/config.hpp"
#include "jamcraft/harness.hpp"
#include "jamcraft/multi_target.hpp"
#include "jamcraft/suboptimal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace jamcraft {

using nlohmann::json;

bool ValidationReport::passed() const
{
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyOutcome& p) { return p.passed; });
}

namespace {

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Check {
public:
    explicit Check(std::string name) { out_.name = std::move(name); }

    // False once the property has failed; callers stop at that point.
    bool record(double violation, double tol, const std::string& what, const json& example)
    {
        ++out_.cases;
        if (std::isfinite(violation))
            out_.worst = std::max(out_.worst, violation);
        if (violation <= tol)
            return true;
        out_.passed = false;
        out_.detail = what + " (violation " + number(violation) + ", tolerance " + number(tol) + ")";
        out_.counterexample = example.dump();
        return false;
    }

    PropertyOutcome done()
    {
        if (out_.passed && out_.detail.empty())
            out_.detail = "worst violation " + number(out_.worst);
        return std::move(out_);
    }

private:
    PropertyOutcome out_;
};

json serialize(const JammingScenario& sc)
{
    return {{"kind", "single"},
            {"h_r", matrix_to_json(sc.h_r)},
            {"q_s", matrix_to_json(sc.q_s.matrix())},
            {"h_z", matrix_to_json(sc.h_z)},
            {"noise_power", sc.noise_power},
            {"jam_budget", sc.jam_budget}};
}

JammingScenario random_link(Rng& rng, int n_t, int n_r, int n_z, double p_z, bool pd_signal)
{
    ExperimentConfig cfg;
    cfg.n_t = n_t;
    cfg.n_r = n_r;
    cfg.n_z = n_z;
    cfg.transmit_power = 3.0;
    cfg.noise_power = 1.0;
    JammingScenario sc = draw_single_link(rng, cfg, pd_signal);
    sc.jam_budget = p_z;
    return sc;
}

double pick(Rng& rng, std::initializer_list<double> values)
{
    return *(values.begin() + rng.index(values.size()));
}

HermitianMatrix random_pd(Rng& rng, Index n)
{
    const ComplexMatrix g = random_channel(rng, n, n, 1.0);
    return HermitianMatrix(g * g.adjoint()) + HermitianMatrix::identity(n) * 0.05;
}

HermitianMatrix random_feasible(Rng& rng, Index n, double budget)
{
    const HermitianMatrix p = random_pd(rng, n);
    return p * (budget * std::abs(rng.normal(0.6)) / std::max(p.trace(), 1e-12));
}

double reduced_value(const EffectiveDecomposition& eff, const HermitianMatrix& q)
{
    return reduced_rate(eff, q, eff.noise_power).r_bar;
}

// ---- properties ------------------------------------------------------------

PropertyOutcome scalar_ground_truth()
{
    Check c("scalar_ground_truth");
    JammingScenario sc;
    sc.h_r = ComplexMatrix::Ones(1, 1);
    sc.q_s = HermitianMatrix::identity(1);
    sc.h_z = ComplexMatrix::Ones(1, 1);
    sc.noise_power = 1.0;
    sc.jam_budget = 1.0;
    const json ex = serialize(sc);
    const EffectiveDecomposition eff = *effective_quantities(sc);
    const ClosedFormOutcome cf = closed_form_pd(eff, 1.0, 1.0);
    const SpcaResult sp = spca_iterate(eff, 1.0);
    const SuboptimalSolution so = suboptimal_pd(eff, 1.0);
    const double target = std::log(1.5);
    c.record(std::abs(cf.q_prime(0, 0).real() - 1.0), 1e-10, "closed form Q'", ex) &&
        c.record(std::abs(cf.lambda - 1.0 / 6.0), 1e-10, "closed form lambda", ex) &&
        c.record(std::abs(reduced_value(eff, cf.q_prime) - target), 1e-10, "closed form rate", ex) &&
        c.record(std::abs(reduced_value(eff, sp.q_prime) - target), 1e-10, "spca rate", ex) &&
        c.record(std::abs(reduced_value(eff, so.q_prime) - target), 1e-10, "suboptimal rate", ex);
    return c.done();
}

PropertyOutcome unit_trace_kkt(std::uint64_t seed, int cases)
{
    Check c("unit_trace_kkt");
    Rng rng(derive_seed(seed, {101}));
    for (int k = 0; k < cases; ++k) {
        const Index n = 2 + k % 7;
        const HermitianMatrix a = random_pd(rng, n);
        const UnitTraceSolution s = unit_trace_minimize(a);
        const HermitianMatrix residual =
            inverse_pd(s.x + a) - inverse_pd(s.x) + HermitianMatrix::identity(n) * s.lambda;
        const json ex = {{"a", matrix_to_json(a.matrix())}};
        if (!c.record(residual.frobenius_norm(), 1e-7, "stationarity residual", ex) ||
            !c.record(std::abs(s.x.trace() - 1.0), 1e-10, "trace of X", ex))
            break;
    }
    return c.done();
}

PropertyOutcome schur_complement_pd(std::uint64_t seed, int cases)
{
    Check c("schur_complement_pd");
    Rng rng(derive_seed(seed, {102}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc = random_link(rng, 4, 4, 2 + k % 3, 1.0, true);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const double lo = evd(eff.b_tilde).values.minCoeff();
        if (!c.record(lo > 0.0 ? 0.0 : 1.0, 0.0,
                      "B~ has smallest eigenvalue " + std::to_string(lo), serialize(sc)))
            break;
    }
    return c.done();
}

PropertyOutcome rank_aware_reduction(std::uint64_t seed, int cases)
{
    Check c("rank_aware_reduction");
    Rng rng(derive_seed(seed, {103}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc = random_link(rng, 4, 3, 5, pick(rng, {0.5, 2.0, 8.0}), true);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const ClosedFormOutcome full = closed_form_pd(eff, sc.jam_budget, sc.noise_power);
        const ClosedFormOutcome aware = closed_form_psd(eff, sc.jam_budget, sc.noise_power);
        if (!c.record((full.q_prime - aware.q_prime).frobenius_norm(), 1e-9,
                      "full-rank and rank-aware closed forms differ", serialize(sc)))
            break;
    }
    return c.done();
}

PropertyOutcome identity_channel(std::uint64_t seed, int cases)
{
    Check c("identity_channel");
    Rng rng(derive_seed(seed, {104}));
    int checked = 0;
    for (int k = 0; k < 20 * cases && checked < cases; ++k) {
        JammingScenario sc = random_link(rng, 3, 3, 3, pick(rng, {2.0, 4.0, 8.0, 16.0}), true);
        sc.h_z = ComplexMatrix::Identity(3, 3);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const ClosedFormOutcome cf = closed_form_pd(eff, sc.jam_budget, sc.noise_power);
        if (!cf.psd_ok)
            continue;
        ++checked;
        const HermitianMatrix direct =
            identity_channel_solution(sc.signal_gram(), sc.noise_power, sc.jam_budget);
        const HermitianMatrix general = assemble_qz(eff, cf.q_prime, 3);
        if (!c.record((direct - general).frobenius_norm(), 1e-9,
                      "identity-channel formula differs from the general closed form",
                      serialize(sc)))
            break;
    }
    return c.done();
}

PropertyOutcome rate_split(std::uint64_t seed, int cases)
{
    Check c("rate_split");
    Rng rng(derive_seed(seed, {105}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc = random_link(rng, 4, 4, 2 + k % 3, 2.0, false);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const HermitianMatrix q = random_feasible(rng, eff.r_z, sc.jam_budget);
        const RateSplit split = reduced_rate(eff, q, sc.noise_power);
        const double direct = rate_single(sc, assemble_qz(eff, q, sc.n_z()));
        if (!c.record(std::abs(split.r_bar + split.r0 - direct), 1e-9,
                      "reduced rate differs from the full rate", serialize(sc)))
            break;
    }
    return c.done();
}

PropertyOutcome projection(std::uint64_t seed, int cases)
{
    Check c("projection");
    Rng rng(derive_seed(seed, {106}));
    for (int k = 0; k < cases; ++k) {
        const Index n = 2 + k % 4;
        const double budget = pick(rng, {0.5, 1.0, 3.0});
        const HermitianMatrix x(random_channel(rng, n, n, 2.0));
        const HermitianMatrix p = psd_trace_projection(x, budget);
        const HermitianMatrix y = random_feasible(rng, n, budget);
        const json ex = {{"x", matrix_to_json(x.matrix())}, {"budget", budget}};
        const double infeasible = std::max({0.0, p.trace() - budget, -evd(p).values.minCoeff()});
        // Variational inequality of the Euclidean projection onto a convex set.
        const double angle = inner(x - p, y - p);
        if (!c.record(infeasible, 1e-10, "projection left the feasible set", ex) ||
            !c.record((psd_trace_projection(p, budget) - p).frobenius_norm(), 1e-10,
                      "projection not idempotent", ex) ||
            !c.record(angle, 1e-9, "projection is not the nearest point", ex))
            break;
    }
    return c.done();
}

PropertyOutcome spca_monotone_and_stationary(std::uint64_t seed, int cases)
{
    Check c("spca_monotone_and_stationary");
    Rng rng(derive_seed(seed, {107}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc =
            random_link(rng, 4, 3, 2 + k % 4, pick(rng, {0.25, 1.0, 4.0, 50.0}), k % 2 == 0);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const SpcaResult r = spca_iterate(eff, sc.jam_budget);
        double rise = 0.0;
        for (std::size_t i = 1; i < r.trace.objective.size(); ++i)
            rise = std::max(rise, r.trace.objective[i] - r.trace.objective[i - 1]);
        const HermitianMatrix again =
            subproblem_solve(eff.a_tilde, eff.d0, sc.jam_budget, r.q_prime);
        const json ex = serialize(sc);
        if (!c.record(rise, 1e-12, "objective increased between iterations", ex) ||
            !c.record(r.trace.kkt_residual, 1e-6, "KKT residual at the returned point", ex) ||
            !c.record((again - r.q_prime).frobenius_norm(), 1e-7,
                      "returned point is not a fixed point of the subproblem map", ex))
            break;
    }
    return c.done();
}

PropertyOutcome majorization(std::uint64_t seed, int cases)
{
    Check c("majorization");
    Rng rng(derive_seed(seed, {108}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc = random_link(rng, 4, 3, 2 + k % 4, 2.0, k % 2 == 0);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const HermitianMatrix q = random_feasible(rng, eff.r_z, sc.jam_budget);
        const HermitianMatrix anchor = random_feasible(rng, eff.r_z, sc.jam_budget);
        const HermitianMatrix at_anchor = anchor + eff.d0 + eff.a_tilde;
        const double tangent =
            log_det(at_anchor) + inner(inverse_pd(at_anchor), q - anchor);
        const double exact = log_det(q + eff.d0 + eff.a_tilde);
        if (!c.record(exact - tangent, 1e-10, "tangent plane below the concave term",
                      serialize(sc)))
            break;
    }
    return c.done();
}

PropertyOutcome suboptimal_contracts(std::uint64_t seed, int cases)
{
    Check c("suboptimal_contracts");
    Rng rng(derive_seed(seed, {109}));
    for (int k = 0; k < cases; ++k) {
        const JammingScenario sc =
            random_link(rng, 4, 3, 5, pick(rng, {0.25, 0.5, 1.0, 2.0, 8.0}), k % 3 != 0);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const bool pd = eff.signal_is_pd();
        const SuboptimalSolution s = pd ? suboptimal_pd(eff, sc.jam_budget)
                                        : suboptimal_psd(eff, sc.jam_budget);
        const SpcaResult opt = spca_iterate(eff, sc.jam_budget);
        const ClosedFormOutcome cf = pd ? closed_form_pd(eff, sc.jam_budget, sc.noise_power)
                                        : closed_form_psd(eff, sc.jam_budget, sc.noise_power);
        const double sub_rate = rate_single(sc, assemble_qz(eff, s.q_prime, sc.n_z()));
        const double opt_rate = rate_single(sc, assemble_qz(eff, opt.q_prime, sc.n_z()));
        const json ex = serialize(sc);
        const double min_eig = evd(s.q_prime).values.minCoeff();
        bool ok = c.record(std::max(0.0, -min_eig), 1e-9, "suboptimal Q' not PSD", ex) &&
                  c.record(std::abs(s.q_prime.trace() - sc.jam_budget), 1e-8,
                           "suboptimal Q' does not use the whole budget", ex) &&
                  c.record(opt_rate - sub_rate, 1e-6, "suboptimal beats the optimum", ex);
        if (ok && cf.psd_ok)
            ok = c.record(s.params.epsilon, 1e-6, "epsilon nonzero although closed form is PSD",
                          ex) &&
                 c.record(std::abs(sub_rate - opt_rate), 1e-6,
                          "suboptimal differs from the PSD closed form", ex);
        if (ok && s.params.epsilon > 1e-3 && pd) {
            const SpectralData spectrum{evd(eff.a_tilde).vectors,
                                        evd(eff.a_tilde).values.cwiseMax(0.0)};
            const HermitianMatrix earlier = suboptimal_candidate(
                spectrum, eff.d0, sc.jam_budget, s.params.epsilon - 1e-3);
            ok = c.record(is_psd(earlier, 1e-9) ? 1.0 : 0.0, 0.0,
                          "a smaller epsilon is already PSD", ex);
        }
        if (!ok)
            break;
    }
    return c.done();
}

PropertyOutcome mac_exactness(std::uint64_t seed, int cases)
{
    Check c("mac_exactness");
    Rng rng(derive_seed(seed, {110}));
    for (int k = 0; k < cases; ++k) {
        MacScenario mac;
        mac.h_z = random_channel(rng, 3, 4, 1.0);
        mac.jam_budget = 2.0;
        HermitianMatrix sum = HermitianMatrix::zero(3);
        for (int i = 0; i < 3; ++i) {
            MacLink link{random_channel(rng, 3, 2, 1.0), random_feasible(rng, 2, 2.0)};
            sum += congruence(link.h, link.q);
            mac.links.push_back(std::move(link));
        }
        const JammingScenario reduced = mac_reduce(mac);
        const HermitianMatrix q_z = random_feasible(rng, 4, 2.0);
        const HermitianMatrix w =
            congruence(mac.h_z, q_z) + HermitianMatrix::identity(3) * mac.noise_power;
        const double direct = log_det(sum + w) - log_det(w);
        if (!c.record(std::abs(direct - rate_single(reduced, q_z)), 1e-9,
                      "reduced single-target rate differs from the MAC sum-rate",
                      {{"kind", "mac"}, {"case", k}}))
            break;
    }
    return c.done();
}

PropertyOutcome jamming_never_helps(std::uint64_t seed, int cases)
{
    Check c("jamming_never_helps");
    Rng rng(derive_seed(seed, {111}));
    for (int k = 0; k < cases; ++k) {
        BcScenario bc;
        bc.q_s = HermitianMatrix::identity(3);
        bc.jam_budget = pick(rng, {0.5, 2.0, 6.0});
        for (int i = 0; i < 2; ++i)
            bc.receivers.push_back({random_channel(rng, 2, 3, 1.0),
                                    random_channel(rng, 2, 3, 1.0), 1.0});
        IcScenario ic;
        ic.jam_budget = bc.jam_budget;
        for (int i = 0; i < 2; ++i)
            ic.pairs.push_back({random_channel(rng, 2, 2, 1.0), HermitianMatrix::identity(2),
                                random_channel(rng, 2, 3, 1.0), 1.0});
        ic.cross = {{ComplexMatrix(), random_channel(rng, 2, 2, 0.3)},
                    {random_channel(rng, 2, 2, 0.3), ComplexMatrix()}};
        const double bc_gain =
            bc_solve(bc).rate - bc_rate(bc, HermitianMatrix::zero(bc.n_z()));
        const double ic_gain = ic_solve(ic).rate - ic_rate(ic, HermitianMatrix::zero(ic.n_z()));
        const json ex = {{"case", k}, {"seed", seed}};
        if (!c.record(bc_gain, 1e-10, "broadcast jamming raised the sum-rate", ex) ||
            !c.record(ic_gain, 1e-10, "interference-network jamming raised the sum-rate", ex))
            break;
    }
    return c.done();
}

PropertyOutcome tdm_cross_check(std::uint64_t seed, int cases, int grid_steps)
{
    Check c("tdm_grid_vs_joint");
    Rng rng(derive_seed(seed, {112}));
    for (int k = 0; k < cases; ++k) {
        TdmScenario tdm;
        tdm.jam_budget = pick(rng, {1.0, 2.0, 4.0});
        for (int i = 0; i < 2; ++i)
            tdm.pairs.push_back({random_channel(rng, 2, 2, 1.0), HermitianMatrix::identity(2),
                                 random_channel(rng, 2, 2, 1.0), 1.0, 0.5});
        const double grid = tdm_solve_grid(tdm, grid_steps).sum_rate;
        const double joint = tdm_solve_joint(tdm).sum_rate;
        if (!c.record(std::abs(grid - joint), 1e-3, "grid search and joint solver disagree",
                      {{"case", k}, {"seed", seed}}))
            break;
    }
    return c.done();
}

PropertyOutcome rng_determinism(std::uint64_t seed)
{
    Check c("rng_determinism");
    Rng a(derive_seed(seed, {113}));
    Rng b(derive_seed(seed, {113}));
    const ComplexMatrix x = random_channel(a, 5, 7, 1.0);
    const ComplexMatrix y = random_channel(b, 5, 7, 1.0);
    c.record((x - y).norm(), 0.0, "same stream produced different draws", {{"seed", seed}});
    return c.done();
}

}  // namespace

PropertyOutcome check_closed_form_vs_spca(std::uint64_t seed, int cases, const SolverHooks& hooks)
{
    Check c("closed_form_vs_spca");
    Rng rng(derive_seed(seed, {100}));
    int checked = 0;
    for (int k = 0; k < 50 * cases && checked < cases; ++k) {
        const JammingScenario sc = random_link(rng, 4, 3, 5, pick(rng, {1.0, 2.0, 4.0, 8.0}), true);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const ClosedFormOutcome cf = hooks.closed_form(eff, sc.jam_budget, sc.noise_power);
        if (!cf.psd_ok)
            continue;
        ++checked;
        const double closed = rate_single(sc, assemble_qz(eff, cf.q_prime, sc.n_z()));
        const SpcaResult sp = spca_iterate(eff, sc.jam_budget);
        const double iterative = rate_single(sc, assemble_qz(eff, sp.q_prime, sc.n_z()));
        if (!c.record(std::abs(closed - iterative), 1e-6, "closed form and SPCA rates differ",
                      serialize(sc)))
            break;
    }
    return c.done();
}

ValidationReport validate_suite(std::uint64_t seed, Scale scale, const SolverHooks& hooks)
{
    const bool full = scale == Scale::full;
    const int n = full ? 100 : 20;
    ValidationReport report;
    auto& p = report.properties;
    p.push_back(scalar_ground_truth());
    p.push_back(check_closed_form_vs_spca(seed, n, hooks));
    p.push_back(unit_trace_kkt(seed, n));
    p.push_back(schur_complement_pd(seed, full ? 200 : 40));
    p.push_back(rank_aware_reduction(seed, n));
    p.push_back(identity_channel(seed, full ? 50 : 10));
    p.push_back(rate_split(seed, n));
    p.push_back(projection(seed, n));
    p.push_back(spca_monotone_and_stationary(seed, n));
    p.push_back(majorization(seed, n));
    p.push_back(suboptimal_contracts(seed, full ? 200 : 30));
    p.push_back(mac_exactness(seed, full ? 20 : 5));
    p.push_back(jamming_never_helps(seed, full ? 20 : 4));
    p.push_back(tdm_cross_check(seed, full ? 20 : 3, full ? 1000 : 200));
    p.push_back(rng_determinism(seed));
    return report;
}

}  // namespace jamcraft
