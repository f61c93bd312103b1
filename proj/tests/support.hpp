#pragma once

// Scenario generators and brute-force oracles shared by the unit tests and
// the acceptance runner. Nothing here calls the solvers under test.

#include "jamcraft/harness.hpp"
#include "jamcraft/scenario.hpp"

#include <cmath>
#include <limits>

namespace jamcraft::testing {

inline HermitianMatrix random_hermitian(Rng& rng, Index n)
{
    return HermitianMatrix(random_channel(rng, n, n, 1.0));
}

/// G Gᴴ + floor·I with G square Gaussian.
inline HermitianMatrix random_pd(Rng& rng, Index n, double floor = 0.1)
{
    const ComplexMatrix g = random_channel(rng, n, n, 1.0);
    return HermitianMatrix(g * g.adjoint()) + HermitianMatrix::identity(n) * floor;
}

/// n_t >= n_r keeps H_r Q_s H_rᴴ positive definite with probability one.
inline JammingScenario random_scenario(Rng& rng, Index n_t, Index n_r, Index n_z, double budget,
                                       double noise = 1.0)
{
    JammingScenario sc;
    sc.h_r = random_channel(rng, n_r, n_t, 1.0);
    sc.q_s = random_pd(rng, n_t);
    sc.h_z = random_channel(rng, n_r, n_z, 1.0);
    sc.noise_power = noise;
    sc.jam_budget = budget;
    return sc;
}

/// Strongly unequal jamming gains with a small budget: the full-rank closed
/// form asks for negative power on the strong direction.
inline JammingScenario lopsided_scenario(Rng& rng, double budget)
{
    JammingScenario sc;
    sc.h_r = random_channel(rng, 2, 2, 1.0);
    sc.q_s = random_pd(rng, 2);
    ComplexMatrix w = random_channel(rng, 2, 2, 1.0);
    const Eigen::HouseholderQR<ComplexMatrix> qr(w);
    const ComplexMatrix u = qr.householderQ();
    ComplexMatrix omega = ComplexMatrix::Zero(2, 2);
    omega(0, 0) = 1.0;
    omega(1, 1) = 10.0;
    sc.h_z = u * omega;
    sc.noise_power = 1.0;
    sc.jam_budget = budget;
    return sc;
}

/// log det of a 2x2 Hermitian matrix, -inf if it is not positive definite.
inline double log_det2(const Complex& a, const Complex& b, const Complex& d)
{
    const double det = a.real() * d.real() - std::norm(b);
    if (a.real() <= 0.0 || det <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return std::log(det);
}

struct GridBest {
    double value = std::numeric_limits<double>::infinity();
    long points = 0;
};

/// Minimum of log|Q+D0+Ã| - log|Q+D0| over Q = R diag(x, y) Rᴴ, x, y >= 0,
/// x + y <= p_z, R a rotation by angle θ with phase φ on the off-diagonal.
inline GridBest grid_min_reduced_rate(const HermitianMatrix& a_tilde, const HermitianMatrix& d0,
                                      double p_z, int steps, int angles, int phases)
{
    GridBest best;
    const double pi = std::acos(-1.0);
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            const double x = p_z * i / steps;
            const double y = p_z * j / steps;
            const int na = (i == j) ? 1 : angles;
            for (int k = 0; k < na; ++k) {
                const double th = 0.5 * pi * k / angles;
                const double c = std::cos(th), s = std::sin(th);
                const int np = (k == 0) ? 1 : phases;
                for (int l = 0; l < np; ++l) {
                    const Complex ph = std::polar(1.0, 2.0 * pi * l / phases);
                    // R = [[c, -s·ph], [s·conj(ph), c]] applied to diag(x, y)
                    const Complex q00 = c * c * x + s * s * y;
                    const Complex q11 = s * s * x + c * c * y;
                    const Complex q01 = c * s * (x - y) * ph;
                    const Complex n00 = q00 + d0(0, 0), n11 = q11 + d0(1, 1);
                    const Complex n01 = q01 + d0(0, 1);
                    const double v = log_det2(n00 + a_tilde(0, 0), n01 + a_tilde(0, 1),
                                              n11 + a_tilde(1, 1)) -
                                     log_det2(n00, n01, n11);
                    ++best.points;
                    if (v < best.value)
                        best.value = v;
                }
            }
        }
    }
    return best;
}

}  // namespace jamcraft::testing
