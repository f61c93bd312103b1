#include "jamcraft/hermitian.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace jamcraft;
using jamcraft::testing::random_hermitian;
using jamcraft::testing::random_pd;

namespace {

HermitianMatrix diag(std::initializer_list<double> d)
{
    RealVector v(static_cast<Index>(d.size()));
    Index i = 0;
    for (double x : d)
        v(i++) = x;
    return HermitianMatrix::diagonal(v);
}

}  // namespace

TEST(Hermitian, ConstructionSymmetrizes)
{
    ComplexMatrix m(2, 2);
    m << 1.0, Complex(2.0, 1.0), Complex(0.0, 0.0), 3.0;
    const HermitianMatrix h(m);
    EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
    EXPECT_DOUBLE_EQ(h(0, 1).real(), 1.0);
}

TEST(Hermitian, RejectsNonFinite)
{
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(HermitianMatrix{m}, InvalidInput);
    EXPECT_THROW(svd(m), InvalidInput);
}

TEST(Hermitian, EvdOfDiagonal)
{
    const Eigensystem e = evd(diag({-1.0, 2.0}));
    EXPECT_DOUBLE_EQ(e.values(0), 2.0);
    EXPECT_DOUBLE_EQ(e.values(1), -1.0);
    EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);

    const Eigensystem id = evd(HermitianMatrix::identity(3));
    for (Index i = 0; i < 3; ++i)
        EXPECT_DOUBLE_EQ(id.values(i), 1.0);
}

TEST(Hermitian, EvdReconstructsRandom)
{
    Rng rng(11);
    for (Index n = 1; n <= 16; ++n) {
        const HermitianMatrix h = random_hermitian(rng, n);
        const Eigensystem e = evd(h);
        for (Index i = 1; i < n; ++i)
            EXPECT_GE(e.values(i - 1), e.values(i));
        const ComplexMatrix back = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
        EXPECT_LT((back - h.matrix()).norm(), 1e-10) << "n=" << n;
    }
}

TEST(Hermitian, SvdShapesAndReconstruction)
{
    const SingularSystem z = svd(ComplexMatrix::Zero(2, 3));
    ASSERT_EQ(z.sigma.size(), 2);
    EXPECT_EQ(z.sigma(0), 0.0);
    EXPECT_EQ(z.sigma(1), 0.0);

    const SingularSystem id = svd(ComplexMatrix::Identity(2, 2));
    EXPECT_DOUBLE_EQ(id.sigma(0), 1.0);
    EXPECT_DOUBLE_EQ(id.sigma(1), 1.0);

    Rng rng(5);
    for (auto [r, c] : {std::pair{3, 5}, std::pair{5, 3}, std::pair{4, 4}, std::pair{1, 6}}) {
        const ComplexMatrix m = random_channel(rng, r, c, 1.0);
        const SingularSystem s = svd(m);
        ASSERT_EQ(s.u.rows(), r);
        ASSERT_EQ(s.v.rows(), c);
        EXPECT_LT((s.u.adjoint() * s.u - ComplexMatrix::Identity(r, r)).norm(), 1e-10);
        EXPECT_LT((s.v.adjoint() * s.v - ComplexMatrix::Identity(c, c)).norm(), 1e-10);
        ComplexMatrix sigma = ComplexMatrix::Zero(r, c);
        for (Index i = 0; i < s.sigma.size(); ++i) {
            sigma(i, i) = s.sigma(i);
            if (i > 0)
                EXPECT_GE(s.sigma(i - 1), s.sigma(i));
        }
        EXPECT_LT((s.u * sigma * s.v.adjoint() - m).norm(), 1e-10);
    }
}

TEST(Hermitian, PsdPredicate)
{
    EXPECT_TRUE(is_psd(HermitianMatrix::identity(2), 1e-9));
    EXPECT_FALSE(is_psd(diag({1.0, -1e-3}), 1e-9));
    EXPECT_TRUE(is_psd(HermitianMatrix::zero(3), 1e-9));
    // relative: a -1e-9 wobble next to an eigenvalue of 100 is allowed
    EXPECT_TRUE(is_psd(diag({100.0, -5e-8}), 1e-9));
    EXPECT_FALSE(is_psd(diag({100.0, -2e-7}), 1e-9));
    EXPECT_TRUE(is_pd(diag({2.0, 1.0})));
    EXPECT_FALSE(is_pd(diag({2.0, 0.0})));
}

TEST(Hermitian, LogDet)
{
    EXPECT_EQ(log_det(HermitianMatrix::identity(4)), 0.0);
    EXPECT_NEAR(log_det(diag({2.0, 3.0})), std::log(6.0), 1e-15);
    EXPECT_THROW(log_det(diag({1.0, -1.0})), DomainError);
    EXPECT_THROW(log_det(diag({1.0, 0.0})), DomainError);

    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const HermitianMatrix a = random_pd(rng, 3);
        const RealVector ev = evd(a).values;
        const double expect = ev.array().log().sum();
        EXPECT_NEAR(log_det(a), expect, 1e-10 * std::max(1.0, std::abs(expect)));
    }
}

TEST(Hermitian, InverseAndCongruence)
{
    Rng rng(8);
    const HermitianMatrix a = random_pd(rng, 4);
    EXPECT_LT((inverse_pd(a).matrix() * a.matrix() - ComplexMatrix::Identity(4, 4)).norm(), 1e-10);
    const ComplexMatrix m = random_channel(rng, 2, 4, 1.0);
    EXPECT_LT((congruence(m, a).matrix() - m * a.matrix() * m.adjoint()).norm(), 1e-12);
}

TEST(Hermitian, CappedSimplexMatchesSortedThreshold)
{
    RealVector v(4);
    v << 3.0, -1.0, 0.5, 0.2;
    const RealVector p = project_capped_simplex(v, 2.0);
    // threshold θ = 1 keeps only the first coordinate at 2
    EXPECT_NEAR(p(0), 2.0, 1e-15);
    EXPECT_EQ(p(1), 0.0);
    EXPECT_EQ(p(2), 0.0);
    EXPECT_EQ(p(3), 0.0);

    RealVector inside(3);
    inside << 0.1, 0.2, 0.3;
    EXPECT_EQ(project_capped_simplex(inside, 1.0), inside);
}

TEST(Hermitian, TraceProjectionExamples)
{
    EXPECT_LT((psd_trace_projection(diag({0.5, 0.5}), 2.0) - diag({0.5, 0.5})).frobenius_norm(),
              1e-15);
    EXPECT_LT((psd_trace_projection(diag({3.0, -1.0}), 2.0) - diag({2.0, 0.0})).frobenius_norm(),
              1e-15);
    EXPECT_LT(psd_trace_projection(diag({-1.0, -2.0}), 5.0).frobenius_norm(), 1e-15);
    EXPECT_THROW(psd_trace_projection(diag({1.0}), 0.0), InvalidInput);
}

// diag(3, -1) with budget 2: search the real symmetric feasible set directly.
TEST(Hermitian, TraceProjectionAgainstDenseSearch)
{
    const HermitianMatrix h = diag({3.0, -1.0});
    double best = std::numeric_limits<double>::infinity();
    const int n = 200;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            const double a = 2.0 * i / n, d = 2.0 * j / n;
            const double bmax = std::sqrt(a * d);
            for (int k = -20; k <= 20; ++k) {
                const double b = bmax * k / 20.0;
                const double dist = (a - 3) * (a - 3) + (d + 1) * (d + 1) + 2 * b * b;
                best = std::min(best, std::sqrt(dist));
            }
        }
    const double ours = (psd_trace_projection(h, 2.0) - h).frobenius_norm();
    EXPECT_LE(ours, best + 1e-12);
    EXPECT_NEAR(ours, std::sqrt(2.0), 1e-12);
}

TEST(Hermitian, TraceProjectionProperties)
{
    Rng rng(21);
    for (int t = 0; t < 100; ++t) {
        const Index n = 2 + t % 2;
        const HermitianMatrix h = random_hermitian(rng, n) * 2.0;
        const double budget = 0.5 + 0.05 * t;
        const HermitianMatrix p = psd_trace_projection(h, budget);
        EXPECT_TRUE(is_psd(p, 1e-9));
        EXPECT_LE(p.trace(), budget + 1e-9);
        EXPECT_LT((psd_trace_projection(p, budget) - p).frobenius_norm(), 1e-10);

        // No random feasible point is closer.
        const double d = (p - h).frobenius_norm();
        for (int k = 0; k < 200; ++k) {
            const HermitianMatrix g = random_pd(rng, n, 0.0);
            const double scale = budget * (k % 10 + 1) / 10.0 / g.trace();
            EXPECT_GE((g * scale - h).frobenius_norm(), d - 1e-6);
        }
    }
}

TEST(Hermitian, FromSpectrumAndInner)
{
    Rng rng(2);
    const HermitianMatrix h = random_hermitian(rng, 3);
    const Eigensystem e = evd(h);
    EXPECT_LT((from_spectrum(e.vectors, e.values) - h).frobenius_norm(), 1e-12);
    EXPECT_NEAR(inner(h, HermitianMatrix::identity(3)), h.trace(), 1e-12);
    EXPECT_NEAR(inner(h, h), h.frobenius_norm() * h.frobenius_norm(), 1e-12);
}
