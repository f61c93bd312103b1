#pragma once

// Sequential parametric convex approximation (SPCA) for log-det rate
// minimization. The concave "with-signal" log-det is replaced by its tangent
// at an anchor; the resulting convex program is solved by projected gradient
// and the anchor moves to its solution until the rate stops decreasing.
//
// The engine works over a list of Hermitian blocks so that the multi-target
// variants (several covariances under one coupled budget) reuse it.

#include "jamcraft/hermitian.hpp"
#include "jamcraft/scenario.hpp"

#include <functional>
#include <vector>

namespace jamcraft {

struct SpcaOptions {
    int max_outer_iters = 500;
    double outer_tol = 1e-9;     // relative change of the rate between anchors
    int inner_max_iters = 2000;
    double inner_tol = 1e-10;    // projected-gradient norm / (1 + |objective|)
    double step_shrink = 0.5;    // backtracking factor
    bool extrapolate = true;     // safeguarded overshoot between anchors
    bool polish = true;          // projected gradient on the rate after the anchors settle

    void validate() const;
};

struct SpcaTrace {
    std::vector<double> objective;   // rate at the initial and every accepted anchor
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Blocks = std::vector<HermitianMatrix>;

double inner(const Blocks& a, const Blocks& b);
double norm(const Blocks& a);
Blocks axpy(double alpha, const Blocks& x, const Blocks& y);   // alpha*x + y

/// Smooth convex function on the feasible set.
struct ConvexModel {
    std::function<double(const Blocks&)> value;
    std::function<Blocks(const Blocks&)> gradient;
};

using Projection = std::function<Blocks(const Blocks&)>;

/// A rate that is a difference of log-dets: `objective` is the true rate,
/// `surrogate(anchor)` its convex upper model (tangent plane on the concave
/// term, exact at the anchor) and `gradient` the rate's gradient.
struct MajorizationProblem {
    std::function<double(const Blocks&)> objective;
    std::function<Blocks(const Blocks&)> gradient;
    std::function<ConvexModel(const Blocks&)> surrogate;
    Projection project;
};

struct ProjectedGradientReport {
    Blocks x;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> values;   // objective after every accepted step
};

/// Monotone projected gradient: Barzilai-Borwein trial step, Armijo
/// backtracking along the projection arc (slope fraction 1e-4). `start` must
/// be feasible.
ProjectedGradientReport projected_gradient(const ConvexModel& f, const Projection& project,
                                           Blocks start, const SpcaOptions& opts);

/// ||x - P(x - ∇f(x))||_F, zero exactly at stationary points.
double natural_residual(const Blocks& x, const Blocks& grad, const Projection& project);

struct MajorizationResult {
    Blocks x;
    SpcaTrace trace;
};

MajorizationResult run_spca(const MajorizationProblem& problem, Blocks start,
                            const SpcaOptions& opts);

// Single-target reduced problem: minimize R̄(Q') = log|Q'+D0+Ã| - log|Q'+D0|
// over {Q' ⪰ 0, Tr Q' <= p_z}.

/// Minimizes Tr{G Q'} - log|Q' + D0| with G = (Q'† + D0 + Ã)⁻¹.
HermitianMatrix subproblem_solve(const HermitianMatrix& a_tilde, const HermitianMatrix& d0,
                                 double p_z, const HermitianMatrix& q_anchor,
                                 const SpcaOptions& opts = {});

struct SpcaResult {
    HermitianMatrix q_prime;
    SpcaTrace trace;
};

/// Starts from (p_z/r_z)·I. A non-converged run returns its best iterate with
/// trace.converged = false.
SpcaResult spca_iterate(const EffectiveDecomposition& eff, double p_z, const SpcaOptions& opts = {});

/// Projected stationarity residual of R̄ at q_prime.
double kkt_residual(const HermitianMatrix& q_prime, const HermitianMatrix& a_tilde,
                    const HermitianMatrix& d0, double p_z);

/// The problem instance spca_iterate solves; exposed for property checks.
MajorizationProblem reduced_problem(const HermitianMatrix& a_tilde, const HermitianMatrix& d0,
                                    double p_z);

}  // namespace jamcraft
