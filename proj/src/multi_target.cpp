#include "jamcraft/multi_target.hpp"

#include "jamcraft/spectral.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace jamcraft {

namespace {

// weight · log|offset + Σ_k F_k X_b F_kᴴ| for one block b of the variables.
struct LogDetTerm {
    double weight = 1.0;
    std::size_t block = 0;
    HermitianMatrix offset;
    std::vector<ComplexMatrix> maps;

    HermitianMatrix argument(const Blocks& x) const
    {
        HermitianMatrix out = offset;
        for (const ComplexMatrix& f : maps)
            out += congruence(f, x[block]);
        return out;
    }

    // Σ_k F_kᴴ M F_k, the adjoint of the map applied to M.
    HermitianMatrix pullback(const HermitianMatrix& m) const
    {
        HermitianMatrix out = HermitianMatrix::zero(x_dim());
        for (const ComplexMatrix& f : maps)
            out += congruence(f.adjoint(), m);
        return out;
    }

    Index x_dim() const { return maps.front().cols(); }
};

// Σ plus-terms - Σ minus-terms; the plus terms are the concave "with signal"
// log-dets that get linearized.
struct DcModel {
    std::vector<LogDetTerm> plus;
    std::vector<LogDetTerm> minus;
    std::vector<Index> dims;
};

Blocks zero_blocks(const std::vector<Index>& dims)
{
    Blocks out;
    for (Index d : dims)
        out.push_back(HermitianMatrix::zero(d));
    return out;
}

double sum_values(const std::vector<LogDetTerm>& terms, const Blocks& x)
{
    double acc = 0.0;
    for (const LogDetTerm& t : terms)
        acc += t.weight * log_det(t.argument(x));
    return acc;
}

void add_gradients(const std::vector<LogDetTerm>& terms, const Blocks& x, double sign, Blocks& g)
{
    for (const LogDetTerm& t : terms)
        g[t.block] += t.pullback(inverse_pd(t.argument(x))) * (sign * t.weight);
}

MajorizationProblem make_problem(const DcModel& model, Projection project)
{
    MajorizationProblem p;
    p.objective = [model](const Blocks& x) {
        return sum_values(model.plus, x) - sum_values(model.minus, x);
    };
    p.gradient = [model](const Blocks& x) {
        Blocks g = zero_blocks(model.dims);
        add_gradients(model.plus, x, 1.0, g);
        add_gradients(model.minus, x, -1.0, g);
        return g;
    };
    p.surrogate = [model](const Blocks& anchor) {
        Blocks slope = zero_blocks(model.dims);
        add_gradients(model.plus, anchor, 1.0, slope);
        const double offset = sum_values(model.plus, anchor) - inner(slope, anchor);
        ConvexModel m;
        m.value = [model, slope, offset](const Blocks& x) {
            return offset + inner(slope, x) - sum_values(model.minus, x);
        };
        m.gradient = [model, slope](const Blocks& x) {
            Blocks g = slope;
            add_gradients(model.minus, x, -1.0, g);
            return g;
        };
        return m;
    };
    p.project = std::move(project);
    return p;
}

JammerSolution spca_solution(const DcModel& model, double budget, Index n_z,
                             const SpcaOptions& opts)
{
    const MajorizationProblem p = make_problem(
        model, [budget](const Blocks& x) { return Blocks{psd_trace_projection(x[0], budget)}; });
    MajorizationResult r =
        run_spca(p, {HermitianMatrix::identity(n_z) * (budget / double(n_z))}, opts);
    JammerSolution out;
    out.q_z = std::move(r.x[0]);
    out.method = Method::spca;
    out.diagnostics.iterations = r.trace.iterations;
    out.diagnostics.converged = r.trace.converged;
    out.diagnostics.kkt_residual = r.trace.kkt_residual;
    return out;
}

HermitianMatrix gram(const ComplexMatrix& h, const HermitianMatrix& q)
{
    return congruence(h, q);
}

void check_budget(double budget, const char* who)
{
    if (!std::isfinite(budget) || budget < 0.0)
        throw InvalidInput(std::string(who) + ": jam_budget must be finite and nonnegative");
}

void check_qz(const HermitianMatrix& q_z, Index n_z, const char* who)
{
    if (q_z.dim() != n_z)
        throw InvalidInput(std::string(who) + ": q_z has dimension " + std::to_string(q_z.dim()) +
                           ", expected " + std::to_string(n_z));
}

}  // namespace

Blocks shared_budget_projection(const Blocks& x, double budget)
{
    if (!(budget > 0.0))
        throw InvalidInput("shared_budget_projection: budget must be positive");
    std::vector<Eigensystem> parts;
    Index total = 0;
    for (const HermitianMatrix& b : x) {
        parts.push_back(evd(b));
        total += b.dim();
    }
    RealVector all(total);
    Index at = 0;
    for (const Eigensystem& es : parts) {
        all.segment(at, es.values.size()) = es.values;
        at += es.values.size();
    }
    const RealVector projected = project_capped_simplex(all, budget);
    Blocks out;
    at = 0;
    for (const Eigensystem& es : parts) {
        out.push_back(from_spectrum(es.vectors, projected.segment(at, es.values.size())));
        at += es.values.size();
    }
    return out;
}

// ---- multiple access -------------------------------------------------------

void MacScenario::validate() const
{
    if (links.empty())
        throw InvalidInput("mac: at least one link is required");
    for (std::size_t i = 0; i < links.size(); ++i) {
        JammingScenario sc{links[i].h, links[i].q, h_z, noise_power, jam_budget};
        try {
            sc.validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput("mac link " + std::to_string(i) + ": " + e.what());
        }
    }
}

JammingScenario mac_reduce(const MacScenario& mac)
{
    mac.validate();
    HermitianMatrix sum = HermitianMatrix::zero(mac.h_z.rows());
    for (const MacLink& l : mac.links)
        sum += gram(l.h, l.q);
    const Eigensystem es = evd(sum);
    JammingScenario out;
    out.h_r = es.vectors;
    out.q_s = HermitianMatrix::diagonal(es.values.cwiseMax(0.0));
    out.h_z = mac.h_z;
    out.noise_power = mac.noise_power;
    out.jam_budget = mac.jam_budget;
    return out;
}

// ---- broadcast -------------------------------------------------------------

void BcScenario::validate() const
{
    if (receivers.empty())
        throw InvalidInput("bc: at least one receiver is required");
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        const BcReceiver& r = receivers[i];
        if (r.h_z.cols() != n_z())
            throw InvalidInput("bc receiver " + std::to_string(i) +
                               ": h_z column count differs from receiver 0");
        JammingScenario sc{r.h, q_s, r.h_z, r.noise_power, jam_budget};
        try {
            sc.validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput("bc receiver " + std::to_string(i) + ": " + e.what());
        }
    }
}

namespace {

struct StackedBc {
    HermitianMatrix signal;               // H Q_s Hᴴ
    RealVector noise;                     // diagonal of D
    std::vector<ComplexMatrix> embedded;  // H_zi placed in its receiver's rows
};

StackedBc stack(const BcScenario& bc)
{
    Index rows = 0;
    for (const BcReceiver& r : bc.receivers)
        rows += r.h.rows();
    ComplexMatrix h(rows, bc.q_s.dim());
    StackedBc s;
    s.noise.resize(rows);
    Index at = 0;
    for (const BcReceiver& r : bc.receivers) {
        const Index n = r.h.rows();
        h.middleRows(at, n) = r.h;
        s.noise.segment(at, n).setConstant(r.noise_power);
        ComplexMatrix e = ComplexMatrix::Zero(rows, bc.n_z());
        e.middleRows(at, n) = r.h_z;
        s.embedded.push_back(std::move(e));
        at += n;
    }
    s.signal = gram(h, bc.q_s);
    return s;
}

DcModel bc_model(const BcScenario& bc)
{
    const StackedBc s = stack(bc);
    DcModel m;
    m.dims = {bc.n_z()};
    m.plus.push_back({1.0, 0, s.signal + HermitianMatrix::diagonal(s.noise), s.embedded});
    for (const BcReceiver& r : bc.receivers)
        m.minus.push_back(
            {1.0, 0, HermitianMatrix::identity(r.h.rows()) * r.noise_power, {r.h_z}});
    return m;
}

}  // namespace

double bc_rate(const BcScenario& bc, const HermitianMatrix& q_z)
{
    bc.validate();
    check_qz(q_z, bc.n_z(), "bc_rate");
    const DcModel m = bc_model(bc);
    const Blocks x{q_z};
    return std::max(sum_values(m.plus, x) - sum_values(m.minus, x), 0.0);
}

JammerSolution bc_solve(const BcScenario& bc, const SpcaOptions& opts)
{
    bc.validate();
    check_budget(bc.jam_budget, "bc_solve");
    JammerSolution out;
    if (bc.jam_budget == 0.0) {
        out.q_z = HermitianMatrix::zero(bc.n_z());
        out.diagnostics.psd_condition_held = true;
    } else {
        out = spca_solution(bc_model(bc), bc.jam_budget, bc.n_z(), opts);
    }
    out.rate = bc_rate(bc, out.q_z);
    return out;
}

// ---- time-division pairs ---------------------------------------------------

void TdmScenario::validate() const
{
    if (pairs.empty())
        throw InvalidInput("tdm: at least one pair is required");
    check_budget(jam_budget, "tdm");
    double total = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!(pairs[i].beta > 0.0) || !std::isfinite(pairs[i].beta))
            throw InvalidInput("tdm pair " + std::to_string(i) + ": beta must be positive");
        total += pairs[i].beta;
        try {
            pair_scenario(i, 0.0).validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput("tdm pair " + std::to_string(i) + ": " + e.what());
        }
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidInput("tdm: time shares beta must sum to 1");
}

JammingScenario TdmScenario::pair_scenario(std::size_t i, double budget) const
{
    const TdmPair& p = pairs.at(i);
    return JammingScenario{p.h, p.q, p.h_z, p.noise_power, budget};
}

double tdm_rate(const TdmScenario& tdm, const std::vector<HermitianMatrix>& q_z)
{
    tdm.validate();
    if (q_z.size() != tdm.pairs.size())
        throw InvalidInput("tdm_rate: need one jamming covariance per pair");
    double total = 0.0;
    for (std::size_t i = 0; i < q_z.size(); ++i)
        total += tdm.pairs[i].beta * rate_single(tdm.pair_scenario(i, 0.0), q_z[i]);
    return total;
}

namespace {

TdmSolution idle_tdm(const TdmScenario& tdm)
{
    TdmSolution out;
    for (const TdmPair& p : tdm.pairs)
        out.q_z.push_back(HermitianMatrix::zero(p.h_z.cols()));
    out.rho.assign(tdm.pairs.size(), 1.0 / double(tdm.pairs.size()));
    out.sum_rate = tdm_rate(tdm, out.q_z);
    return out;
}

}  // namespace

TdmSolution tdm_solve_grid(const TdmScenario& tdm, int grid_steps, const SpcaOptions& opts)
{
    tdm.validate();
    if (grid_steps < 2)
        throw InvalidInput("tdm_solve_grid: grid_steps must be at least 2");
    if (tdm.jam_budget == 0.0)
        return idle_tdm(tdm);

    const std::size_t m = tdm.pairs.size();
    std::vector<std::vector<JammerSolution>> table(m);
    for (std::size_t i = 0; i < m; ++i)
        for (int k = 0; k <= grid_steps; ++k) {
            const double budget = tdm.jam_budget * k / grid_steps / tdm.pairs[i].beta;
            table[i].push_back(solve_single(tdm.pair_scenario(i, budget), Fallback::spca, opts));
        }

    std::vector<int> share(m, 0);
    std::vector<int> best;
    double best_rate = std::numeric_limits<double>::infinity();
    // Enumerate compositions of grid_steps into m nonnegative parts.
    const std::function<void(std::size_t, int, double)> walk = [&](std::size_t i, int left,
                                                                    double partial) {
        if (i + 1 == m) {
            share[i] = left;
            const double total = partial + tdm.pairs[i].beta * table[i][left].rate;
            if (total < best_rate) {
                best_rate = total;
                best = share;
            }
            return;
        }
        for (int k = 0; k <= left; ++k) {
            share[i] = k;
            walk(i + 1, left - k, partial + tdm.pairs[i].beta * table[i][k].rate);
        }
    };
    walk(0, grid_steps, 0.0);

    TdmSolution out;
    out.sum_rate = best_rate;
    for (std::size_t i = 0; i < m; ++i) {
        const JammerSolution& s = table[i][best[i]];
        out.q_z.push_back(s.q_z);
        out.rho.push_back(double(best[i]) / grid_steps);
        out.iterations += s.diagnostics.iterations;
        out.converged = out.converged && s.diagnostics.converged;
    }
    return out;
}

TdmSolution tdm_solve_joint(const TdmScenario& tdm, const SpcaOptions& opts)
{
    tdm.validate();
    if (tdm.jam_budget == 0.0)
        return idle_tdm(tdm);

    // Variables Y_i = β_i Q_zi turn the weighted budget into Σ Tr Y_i <= P_z.
    DcModel model;
    Blocks start;
    Index total_dim = 0;
    for (const TdmPair& p : tdm.pairs)
        total_dim += p.h_z.cols();
    for (std::size_t i = 0; i < tdm.pairs.size(); ++i) {
        const TdmPair& p = tdm.pairs[i];
        const Index n = p.h.rows();
        const ComplexMatrix f = p.h_z / std::sqrt(p.beta);
        const HermitianMatrix noise = HermitianMatrix::identity(n) * p.noise_power;
        model.dims.push_back(p.h_z.cols());
        model.plus.push_back({p.beta, i, gram(p.h, p.q) + noise, {f}});
        model.minus.push_back({p.beta, i, noise, {f}});
        start.push_back(HermitianMatrix::identity(p.h_z.cols()) *
                        (tdm.jam_budget / double(total_dim)));
    }
    const double budget = tdm.jam_budget;
    const MajorizationProblem problem = make_problem(
        model, [budget](const Blocks& x) { return shared_budget_projection(x, budget); });
    MajorizationResult r = run_spca(problem, std::move(start), opts);

    TdmSolution out;
    double spent = 0.0;
    for (const HermitianMatrix& y : r.x)
        spent += std::max(y.trace(), 0.0);
    for (std::size_t i = 0; i < tdm.pairs.size(); ++i) {
        out.q_z.push_back(r.x[i] * (1.0 / tdm.pairs[i].beta));
        out.rho.push_back(spent > 0.0 ? std::max(r.x[i].trace(), 0.0) / spent
                                      : 1.0 / double(tdm.pairs.size()));
    }
    out.sum_rate = tdm_rate(tdm, out.q_z);
    out.iterations = r.trace.iterations;
    out.converged = r.trace.converged;
    return out;
}

// ---- interference network --------------------------------------------------

void IcScenario::validate() const
{
    if (pairs.empty())
        throw InvalidInput("ic: at least one pair is required");
    const std::size_t m = pairs.size();
    if (!cross.empty() && cross.size() != m)
        throw InvalidInput("ic: cross must have one row per pair");
    for (std::size_t i = 0; i < m; ++i) {
        const IcPair& p = pairs[i];
        if (p.h_z.cols() != n_z())
            throw InvalidInput("ic pair " + std::to_string(i) +
                               ": h_z column count differs from pair 0");
        try {
            JammingScenario{p.h, p.q, p.h_z, p.noise_power, jam_budget}.validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput("ic pair " + std::to_string(i) + ": " + e.what());
        }
        if (cross.empty())
            continue;
        if (cross[i].size() != m)
            throw InvalidInput("ic: cross[" + std::to_string(i) + "] must have one entry per pair");
        for (std::size_t j = 0; j < m; ++j) {
            const ComplexMatrix& c = cross[i][j];
            if (j == i || c.size() == 0)
                continue;
            if (c.rows() != p.h.rows() || c.cols() != pairs[j].q.dim())
                throw InvalidInput("ic: cross[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] must be " + std::to_string(p.h.rows()) + "x" +
                                   std::to_string(pairs[j].q.dim()));
            if (!all_finite(c))
                throw InvalidInput("ic: cross[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] has non-finite entries");
        }
    }
}

HermitianMatrix IcScenario::interference_plus_noise(std::size_t i) const
{
    const IcPair& p = pairs.at(i);
    HermitianMatrix out = HermitianMatrix::identity(p.h.rows()) * p.noise_power;
    if (cross.empty())
        return out;
    for (std::size_t j = 0; j < pairs.size(); ++j)
        if (j != i && cross[i][j].size() != 0)
            out += gram(cross[i][j], pairs[j].q);
    return out;
}

namespace {

DcModel ic_model(const IcScenario& ic)
{
    DcModel m;
    m.dims = {ic.n_z()};
    for (std::size_t i = 0; i < ic.pairs.size(); ++i) {
        const IcPair& p = ic.pairs[i];
        const HermitianMatrix base = ic.interference_plus_noise(i);
        m.plus.push_back({1.0, 0, gram(p.h, p.q) + base, {p.h_z}});
        m.minus.push_back({1.0, 0, base, {p.h_z}});
    }
    return m;
}

}  // namespace

double ic_rate(const IcScenario& ic, const HermitianMatrix& q_z)
{
    ic.validate();
    check_qz(q_z, ic.n_z(), "ic_rate");
    double total = 0.0;
    for (std::size_t i = 0; i < ic.pairs.size(); ++i) {
        const IcPair& p = ic.pairs[i];
        const HermitianMatrix w = ic.interference_plus_noise(i) + congruence(p.h_z, q_z);
        total += std::max(log_det(w + gram(p.h, p.q)) - log_det(w), 0.0);
    }
    return total;
}

JammerSolution ic_solve(const IcScenario& ic, const SpcaOptions& opts)
{
    ic.validate();
    check_budget(ic.jam_budget, "ic_solve");
    JammerSolution out;
    if (ic.jam_budget == 0.0) {
        out.q_z = HermitianMatrix::zero(ic.n_z());
        out.diagnostics.psd_condition_held = true;
    } else {
        out = spca_solution(ic_model(ic), ic.jam_budget, ic.n_z(), opts);
    }
    out.rate = ic_rate(ic, out.q_z);
    return out;
}

}  // namespace jamcraft
