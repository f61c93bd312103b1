#include "jamcraft/spca.hpp"
#include "jamcraft/spectral.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace jamcraft;
using namespace jamcraft::testing;

namespace {

HermitianMatrix scalar(double v) { return HermitianMatrix::identity(1) * v; }

double reduced(const HermitianMatrix& q, const HermitianMatrix& a, const HermitianMatrix& d0)
{
    return log_det(q + d0 + a) - log_det(q + d0);
}

void expect_monotone(const SpcaTrace& t)
{
    for (std::size_t k = 1; k < t.objective.size(); ++k)
        EXPECT_LE(t.objective[k], t.objective[k - 1] + 1e-12) << "step " << k;
}

}  // namespace

TEST(Spca, OptionsValidate)
{
    SpcaOptions o;
    EXPECT_NO_THROW(o.validate());
    o.step_shrink = 1.0;
    EXPECT_THROW(o.validate(), InvalidInput);
    o = {};
    o.max_outer_iters = 0;
    EXPECT_THROW(o.validate(), InvalidInput);
}

// q/1 - ln(q + 1) is increasing on [0, 1]: the minimizer is 0.
TEST(Spca, SubproblemZeroSignal)
{
    const HermitianMatrix q = subproblem_solve(scalar(0.0), scalar(1.0), 1.0, scalar(0.0));
    EXPECT_NEAR(q(0, 0).real(), 0.0, 1e-8);
}

// G = 1/3: q/3 - ln(q + 1) decreases up to q = 2, so the budget binds at 1.
TEST(Spca, SubproblemClippedByBudget)
{
    const HermitianMatrix q = subproblem_solve(scalar(1.0), scalar(1.0), 1.0, scalar(1.0));
    EXPECT_NEAR(q(0, 0).real(), 1.0, 1e-8);
    double best = std::numeric_limits<double>::infinity(), arg = -1;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        const double v = x / 3 - std::log(x + 1);
        if (v < best) {
            best = v;
            arg = x;
        }
    }
    EXPECT_EQ(arg, 1.0);
}

TEST(Spca, SubproblemSymmetric)
{
    const HermitianMatrix id = HermitianMatrix::identity(2);
    const HermitianMatrix q = subproblem_solve(id, id, 2.0, id);
    EXPECT_NEAR(std::abs(q(0, 1)), 0.0, 1e-8);
    EXPECT_NEAR(q(0, 0).real(), q(1, 1).real(), 1e-8);
    EXPECT_GE(q(0, 0).real(), -1e-12);
}

TEST(Spca, ScalarMatchesClosedForm)
{
    JammingScenario sc;
    sc.h_r = ComplexMatrix::Constant(1, 1, 1.0);
    sc.q_s = HermitianMatrix::identity(1);
    sc.h_z = ComplexMatrix::Constant(1, 1, 1.0);
    sc.jam_budget = 1.0;
    const EffectiveDecomposition eff = *effective_quantities(sc);
    const SpcaResult r = spca_iterate(eff, 1.0);
    EXPECT_TRUE(r.trace.converged);
    EXPECT_NEAR(r.q_prime(0, 0).real(), 1.0, 1e-10);
    EXPECT_NEAR(rate_single(sc, assemble_qz(eff, r.q_prime, 1)), std::log(1.5), 1e-10);
    expect_monotone(r.trace);
    EXPECT_NEAR(kkt_residual(r.q_prime, eff.a_tilde, eff.d0, 1.0), 0.0, 1e-12);
}

TEST(Spca, MatchesClosedFormWhenPsd)
{
    Rng rng(101);
    int checked = 0;
    for (int t = 0; t < 80 && checked < 25; ++t) {
        const double p_z = 2.0 + t % 6;
        const JammingScenario sc = random_scenario(rng, 4, 3, 5, p_z);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const ClosedFormOutcome cf = closed_form_pd(eff, p_z, 1.0);
        if (!cf.psd_ok)
            continue;
        ++checked;
        const SpcaResult r = spca_iterate(eff, p_z);
        expect_monotone(r.trace);
        EXPECT_TRUE(r.trace.converged);
        EXPECT_NEAR(reduced(r.q_prime, eff.a_tilde, eff.d0),
                    reduced(cf.q_prime, eff.a_tilde, eff.d0), 1e-6);
        EXPECT_LT(kkt_residual(r.q_prime, eff.a_tilde, eff.d0, p_z), 1e-6);
    }
    EXPECT_GE(checked, 10);
}

// Starting the subproblem at a converged point leaves it there.
TEST(Spca, AnchorFixedPoint)
{
    Rng rng(55);
    for (int t = 0; t < 10; ++t) {
        const JammingScenario sc = random_scenario(rng, 3, 3, 3, 1.0 + t);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        const SpcaResult r = spca_iterate(eff, sc.jam_budget);
        const HermitianMatrix again =
            subproblem_solve(eff.a_tilde, eff.d0, sc.jam_budget, r.q_prime);
        EXPECT_LT((again - r.q_prime).frobenius_norm(), 1e-7);
    }
}

TEST(Spca, IndefiniteCasesBeatGrid)
{
    Rng rng(7);
    int indefinite = 0;
    for (int t = 0; t < 6; ++t) {
        const double p_z = 0.02 + 0.05 * t;
        const JammingScenario sc = lopsided_scenario(rng, p_z);
        const EffectiveDecomposition eff = *effective_quantities(sc);
        if (closed_form_pd(eff, p_z, 1.0).psd_ok)
            continue;
        ++indefinite;
        const SpcaResult r = spca_iterate(eff, p_z);
        expect_monotone(r.trace);
        const GridBest g = grid_min_reduced_rate(eff.a_tilde, eff.d0, p_z, 30, 20, 12);
        EXPECT_LE(reduced(r.q_prime, eff.a_tilde, eff.d0), g.value + 1e-3);
        EXPECT_TRUE(is_psd(r.q_prime, 1e-9));
        EXPECT_LE(r.q_prime.trace(), p_z + 1e-9);
    }
    EXPECT_GE(indefinite, 2);
}

TEST(Spca, ResidualAwayFromOptimum)
{
    Rng rng(13);
    const JammingScenario sc = random_scenario(rng, 4, 3, 3, 2.0);
    const EffectiveDecomposition eff = *effective_quantities(sc);
    EXPECT_GT(kkt_residual(HermitianMatrix::zero(3), eff.a_tilde, eff.d0, 2.0), 1e-3);
}

TEST(Spca, TangentMajorizes)
{
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const Index n = 2 + t % 3;
        const HermitianMatrix a = random_pd(rng, n, 0.0);
        const HermitianMatrix d0 = random_pd(rng, n, 0.2);
        const HermitianMatrix q = random_pd(rng, n, 0.0) * 0.5;
        const HermitianMatrix anchor = random_pd(rng, n, 0.0) * 0.5;
        const HermitianMatrix at = anchor + d0 + a;
        const double tangent = log_det(at) + inner(inverse_pd(at), q - anchor);
        EXPECT_LE(log_det(q + d0 + a), tangent + 1e-10);
        // and the engine's surrogate is that tangent
        const MajorizationProblem p = reduced_problem(a, d0, 10.0);
        const ConvexModel m = p.surrogate({anchor});
        EXPECT_NEAR(m.value({anchor}), p.objective({anchor}), 1e-10);
        EXPECT_GE(m.value({q}), p.objective({q}) - 1e-10);
    }
}

TEST(Spca, ProjectedGradientDescends)
{
    Rng rng(71);
    const HermitianMatrix a = random_pd(rng, 3, 0.0);
    const HermitianMatrix d0 = random_pd(rng, 3, 0.3);
    const MajorizationProblem p = reduced_problem(a, d0, 1.0);
    const ConvexModel m = p.surrogate({HermitianMatrix::identity(3) * (1.0 / 3)});
    const ProjectedGradientReport rep =
        projected_gradient(m, p.project, {HermitianMatrix::zero(3)}, SpcaOptions{});
    for (std::size_t k = 1; k < rep.values.size(); ++k)
        EXPECT_LE(rep.values[k], rep.values[k - 1] + 1e-12);
    EXPECT_LT(rep.residual, 1e-8);
}

TEST(Spca, NonConvergenceReported)
{
    Rng rng(19);
    const JammingScenario sc = lopsided_scenario(rng, 0.05);
    const EffectiveDecomposition eff = *effective_quantities(sc);
    SpcaOptions o;
    o.max_outer_iters = 1;
    o.inner_max_iters = 1;
    o.polish = false;
    o.extrapolate = false;
    const SpcaResult r = spca_iterate(eff, 0.05, o);
    EXPECT_FALSE(r.trace.converged);
    EXPECT_TRUE(is_psd(r.q_prime, 1e-9));
    EXPECT_LE(r.q_prime.trace(), 0.05 + 1e-12);
}
