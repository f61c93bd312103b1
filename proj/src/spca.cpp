#include "jamcraft/spca.hpp"

#include <algorithm>
#include <cmath>

namespace jamcraft {

void SpcaOptions::validate() const
{
    if (max_outer_iters <= 0 || inner_max_iters <= 0)
        throw InvalidInput("SpcaOptions: iteration limits must be positive");
    if (!(outer_tol > 0.0 && outer_tol < 1.0) || !(inner_tol > 0.0 && inner_tol < 1.0))
        throw InvalidInput("SpcaOptions: tolerances must lie in (0, 1)");
    if (!(step_shrink > 0.0 && step_shrink < 1.0))
        throw InvalidInput("SpcaOptions: step_shrink must lie in (0, 1)");
}

double inner(const Blocks& a, const Blocks& b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += inner(a[i], b[i]);
    return acc;
}

double norm(const Blocks& a) { return std::sqrt(std::max(inner(a, a), 0.0)); }

Blocks axpy(double alpha, const Blocks& x, const Blocks& y)
{
    Blocks out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out.push_back(HermitianMatrix(alpha * x[i].matrix() + y[i].matrix()));
    return out;
}

double natural_residual(const Blocks& x, const Blocks& grad, const Projection& project)
{
    return norm(axpy(-1.0, project(axpy(-1.0, grad, x)), x));
}

ProjectedGradientReport projected_gradient(const ConvexModel& f, const Projection& project,
                                           Blocks start, const SpcaOptions& opts)
{
    constexpr double kArmijo = 1e-4;
    ProjectedGradientReport report;
    Blocks x = std::move(start);
    double fx = f.value(x);
    Blocks g = f.gradient(x);
    report.values.push_back(fx);
    double step = 1.0;

    for (int it = 0; it < opts.inner_max_iters; ++it) {
        if (natural_residual(x, g, project) <= opts.inner_tol * (1.0 + std::abs(fx)))
            break;

        bool accepted = false;
        Blocks trial;
        Blocks d;
        double f_trial = 0.0;
        double t = step;
        for (int bt = 0; bt < 80; ++bt, t *= opts.step_shrink) {
            trial = project(axpy(-t, g, x));
            d = axpy(-1.0, x, trial);
            const double slope = inner(g, d);
            f_trial = f.value(trial);
            if (std::isfinite(f_trial) && f_trial <= fx + kArmijo * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted || norm(d) == 0.0)
            break;

        Blocks g_trial = f.gradient(trial);
        const Blocks y = axpy(-1.0, g, g_trial);
        const double sy = inner(d, y);
        const double ss = inner(d, d);
        step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1.0;

        x = std::move(trial);
        g = std::move(g_trial);
        fx = f_trial;
        report.values.push_back(fx);
        ++report.iterations;
    }
    report.residual = natural_residual(x, g, project);
    report.value = fx;
    report.x = std::move(x);
    return report;
}

MajorizationResult run_spca(const MajorizationProblem& problem, Blocks start,
                            const SpcaOptions& opts)
{
    opts.validate();
    MajorizationResult out;
    Blocks x = problem.project(start);
    double obj = problem.objective(x);
    out.trace.objective.push_back(obj);
    double momentum = 0.0;
    double last_change = 0.0;
    int slow_steps = 0;

    for (int it = 0; it < opts.max_outer_iters; ++it) {
        out.trace.iterations = it + 1;
        ProjectedGradientReport step =
            projected_gradient(problem.surrogate(x), problem.project, x, opts);
        double next = problem.objective(step.x);
        // Majorization makes the rate nonincreasing; a rise can only be
        // round-off at the fixed point.
        if (!(next <= obj)) {
            out.trace.converged = true;
            break;
        }
        Blocks candidate = std::move(step.x);
        if (opts.extrapolate && momentum > 0.0) {
            // Overshoot along the last two anchors; kept only if it lowers the rate.
            Blocks pushed = problem.project(
                axpy(momentum, axpy(-1.0, x, candidate), candidate));
            const double pushed_obj = problem.objective(pushed);
            if (std::isfinite(pushed_obj) && pushed_obj < next) {
                candidate = std::move(pushed);
                next = pushed_obj;
                momentum = std::min(momentum + 0.1, 0.9);
            } else {
                momentum = 0.0;
            }
        } else {
            momentum = 0.5;
        }
        x = std::move(candidate);
        out.trace.objective.push_back(next);
        const double change = obj - next;
        obj = next;
        if (change <= opts.outer_tol * std::max(std::abs(obj), 1e-12)) {
            out.trace.converged = true;
            break;
        }
        // A long run of barely shrinking decrements means the tangent model is
        // the bottleneck; hand over to the polish pass.
        slow_steps = change > 0.9 * last_change ? slow_steps + 1 : 0;
        last_change = change;
        if (opts.polish && slow_steps >= 10)
            break;
    }
    if (opts.polish) {
        // The rate itself is smooth on the feasible set; a monotone projected
        // gradient pass finishes directions where the tangent model is too
        // curved for the anchor updates to make progress.
        const ConvexModel exact{problem.objective, problem.gradient};
        ProjectedGradientReport finish = projected_gradient(exact, problem.project, x, opts);
        if (finish.value < obj) {
            for (std::size_t k = 1; k < finish.values.size(); ++k)
                out.trace.objective.push_back(finish.values[k]);
            x = std::move(finish.x);
            obj = finish.value;
        }
        if (finish.residual <= opts.inner_tol * (1.0 + std::abs(obj)))
            out.trace.converged = true;
    }
    out.trace.kkt_residual = natural_residual(x, problem.gradient(x), problem.project);
    out.x = std::move(x);
    return out;
}

MajorizationProblem reduced_problem(const HermitianMatrix& a_tilde, const HermitianMatrix& d0,
                                    double p_z)
{
    if (!(p_z > 0.0))
        throw InvalidInput("reduced problem: p_z must be positive");
    if (a_tilde.dim() != d0.dim())
        throw InvalidInput("reduced problem: a_tilde and d0 differ in dimension");
    if (!is_pd(d0, 0.0))
        throw DomainError("reduced problem: d0 must be positive definite");

    MajorizationProblem p;
    p.objective = [a_tilde, d0](const Blocks& x) {
        const HermitianMatrix shifted = x[0] + d0;
        return log_det(shifted + a_tilde) - log_det(shifted);
    };
    p.gradient = [a_tilde, d0](const Blocks& x) {
        const HermitianMatrix shifted = x[0] + d0;
        return Blocks{inverse_pd(shifted + a_tilde) - inverse_pd(shifted)};
    };
    p.surrogate = [a_tilde, d0](const Blocks& anchor) {
        const HermitianMatrix with_signal = anchor[0] + d0 + a_tilde;
        const HermitianMatrix g = inverse_pd(with_signal);
        const double offset = log_det(with_signal) - inner(g, anchor[0]);
        ConvexModel m;
        m.value = [g, d0, offset](const Blocks& x) {
            return offset + inner(g, x[0]) - log_det(x[0] + d0);
        };
        m.gradient = [g, d0](const Blocks& x) { return Blocks{g - inverse_pd(x[0] + d0)}; };
        return m;
    };
    p.project = [p_z](const Blocks& x) { return Blocks{psd_trace_projection(x[0], p_z)}; };
    return p;
}

HermitianMatrix subproblem_solve(const HermitianMatrix& a_tilde, const HermitianMatrix& d0,
                                 double p_z, const HermitianMatrix& q_anchor,
                                 const SpcaOptions& opts)
{
    opts.validate();
    const MajorizationProblem p = reduced_problem(a_tilde, d0, p_z);
    if (q_anchor.dim() != d0.dim())
        throw InvalidInput("subproblem_solve: q_anchor has the wrong dimension");
    Blocks start = p.project({q_anchor});
    return projected_gradient(p.surrogate({q_anchor}), p.project, std::move(start), opts).x[0];
}

SpcaResult spca_iterate(const EffectiveDecomposition& eff, double p_z, const SpcaOptions& opts)
{
    if (eff.r_z < 1)
        throw InvalidInput("spca_iterate: r_z must be at least 1");
    const MajorizationProblem p = reduced_problem(eff.a_tilde, eff.d0, p_z);
    const HermitianMatrix start = HermitianMatrix::identity(eff.r_z) * (p_z / double(eff.r_z));
    MajorizationResult r = run_spca(p, {start}, opts);
    return {std::move(r.x[0]), std::move(r.trace)};
}

double kkt_residual(const HermitianMatrix& q_prime, const HermitianMatrix& a_tilde,
                    const HermitianMatrix& d0, double p_z)
{
    const MajorizationProblem p = reduced_problem(a_tilde, d0, p_z);
    return natural_residual({q_prime}, p.gradient({q_prime}), p.project);
}

}  // namespace jamcraft
