#include "jamcraft/harness.hpp"

#include "jamcraft/suboptimal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace jamcraft {

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
    const auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t state = mix(seed);
    for (std::uint64_t k : keys)
        state = mix(state ^ mix(k));
    return state;
}

double Rng::normal(double stddev)
{
    return std::normal_distribution<double>(0.0, stddev)(engine_);
}

std::size_t Rng::index(std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

ComplexMatrix random_channel(Rng& rng, Index rows, Index cols, double variance)
{
    if (!(variance > 0.0))
        throw InvalidInput("random_channel: variance must be positive");
    const double s = std::sqrt(variance / 2.0);
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double re = rng.normal(s);
            m(i, j) = Complex(re, rng.normal(s));
        }
    return m;
}

const SweepRow& SweepResult::row(const std::vector<double>& coords, const std::string& metric) const
{
    for (const SweepRow& r : rows)
        if (r.coords == coords && r.metric == metric)
            return r;
    throw InvalidInput("sweep result has no row for metric " + metric);
}

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(const SweepResult& r, std::ostream& out)
{
    for (const auto& [key, value] : r.metadata)
        out << "# " << key << "=" << value << "\n";
    out << "experiment";
    for (const std::string& c : r.coord_names)
        out << "," << c;
    out << ",metric,mean,stderr,trials,seed\n";
    for (const SweepRow& row : r.rows) {
        out << r.experiment;
        for (double c : row.coords)
            out << "," << fmt(c);
        out << "," << row.metric << "," << fmt(row.mean) << "," << fmt(row.stderr_) << ","
            << row.trials << "," << r.seed << "\n";
    }
}

void write_csv(const SweepResult& r, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput(path + ": cannot open for writing");
    write_csv(r, out);
    if (!out)
        throw InvalidInput(path + ": write failed");
}

unsigned worker_count()
{
    unsigned n = 0;
    if (const char* env = std::getenv("JAMCRAFT_THREADS"); env && *env) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (*end != '\0' || v > 4096)
            throw ConfigError("JAMCRAFT_THREADS: expected a nonnegative integer");
        n = static_cast<unsigned>(v);
    }
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    const auto work = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (std::thread& t : pool)
            t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);
}

JammingScenario draw_single_link(Rng& rng, const ExperimentConfig& cfg, bool require_pd)
{
    JammingScenario sc;
    sc.noise_power = cfg.noise_power;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        sc.h_r = random_channel(rng, cfg.n_r, cfg.n_t, 1.0);
        sc.h_z = random_channel(rng, cfg.n_r, cfg.n_z, 1.0);
        sc.q_s = waterfilling(sc.h_r, cfg.transmit_power, cfg.noise_power);
        if (!require_pd || is_pd(sc.signal_gram(), kRankTolerance))
            return sc;
    }
    throw ContractViolation("draw_single_link: no draw with a positive definite signal Gram");
}

namespace {

// values[trial][point * metrics + metric]
using TrialTable = std::vector<std::vector<double>>;

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / double(v.size());
}

double stderr_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

SweepRow summarize(std::vector<double> coords, std::string metric, std::vector<double> samples)
{
    SweepRow row;
    row.coords = std::move(coords);
    row.metric = std::move(metric);
    row.mean = mean_of(samples);
    row.stderr_ = stderr_of(samples);
    row.trials = samples.size();
    row.samples = std::move(samples);
    return row;
}

std::vector<double> column(const TrialTable& t, std::size_t index)
{
    std::vector<double> out;
    out.reserve(t.size());
    for (const auto& trial : t)
        out.push_back(trial[index]);
    return out;
}

// 1 - mean(a)/mean(b), with a delta-method standard error.
SweepRow reduction_ratio(std::vector<double> coords, const std::vector<double>& a,
                         const std::vector<double>& b)
{
    const double n = double(a.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    SweepRow row;
    row.coords = std::move(coords);
    row.metric = "r1";
    row.trials = a.size();
    row.mean = mb > 0.0 ? 1.0 - ma / mb : 0.0;
    if (a.size() >= 2 && mb > 0.0) {
        double vaa = 0.0;
        double vbb = 0.0;
        double vab = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            vaa += (a[i] - ma) * (a[i] - ma);
            vbb += (b[i] - mb) * (b[i] - mb);
            vab += (a[i] - ma) * (b[i] - mb);
        }
        vaa /= (n - 1.0) * n;
        vbb /= (n - 1.0) * n;
        vab /= (n - 1.0) * n;
        const double r = ma / mb;
        row.stderr_ = std::sqrt(std::max(vaa - 2.0 * r * vab + r * r * vbb, 0.0)) / mb;
    }
    return row;
}

[[noreturn]] void fail_trial(std::size_t trial, const std::string& what, const std::string& scenario)
{
    throw ContractViolation("trial " + std::to_string(trial) + ": non-finite " + what +
                            "; scenario " + scenario);
}

std::string serialize(const JammingScenario& sc)
{
    return "{h_r: " + describe(sc.h_r) + ", q_s: " + describe(sc.q_s.matrix()) +
           ", h_z: " + describe(sc.h_z) + ", noise_power: " + std::to_string(sc.noise_power) +
           ", jam_budget: " + std::to_string(sc.jam_budget) + "}";
}

SweepResult start_result(const ExperimentConfig& cfg, std::vector<std::string> coords)
{
    SweepResult r;
    r.experiment = cfg.experiment;
    r.coord_names = std::move(coords);
    r.seed = cfg.seed;
    r.metadata = {{"experiment", cfg.experiment},
                  {"config_hash", config_hash(cfg)},
                  {"seed", std::to_string(cfg.seed)},
                  {"trials", std::to_string(cfg.trials)},
                  {"channel_streams", "per trial, shared by all grid points and methods"}};
    return r;
}

double closed_form_rate(const JammingScenario& sc, const EffectiveDecomposition& eff,
                        const ClosedFormOutcome& cf, bool pd, bool clamp)
{
    if (cf.psd_ok)
        return rate_single(sc, assemble_qz(eff, cf.q_prime, sc.n_z()));
    if (!clamp && pd) {
        // The indefinite candidate still leaves Q' + D0 ≻ 0, so its rate is
        // well defined even though it is not a covariance.
        const RateSplit split = reduced_rate(eff, cf.q_prime, sc.noise_power);
        return split.r_bar + split.r0;
    }
    const HermitianMatrix projected = psd_trace_projection(cf.q_prime, sc.jam_budget);
    return rate_single(sc, assemble_qz(eff, projected, sc.n_z()));
}

}  // namespace

SweepResult run_example1(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != "fig1" && cfg.experiment != "fig2" && cfg.experiment != "custom")
        throw ConfigError("experiment: run_example1 handles fig1, fig2 and custom");

    std::vector<std::string> metrics;
    for (const std::string& m : cfg.methods)
        metrics.push_back("rate_" + m);
    metrics.push_back("psd_fraction");
    const std::size_t nm = metrics.size();
    const std::size_t np = cfg.pz_grid.size();

    TrialTable table(std::size_t(cfg.trials));
    parallel_for(table.size(), [&](std::size_t trial) {
        Rng rng(derive_seed(cfg.seed, {trial}));
        JammingScenario sc = draw_single_link(rng, cfg, cfg.require_pd_signal);
        std::vector<double>& out = table[trial];
        out.assign(np * nm, 0.0);
        for (std::size_t g = 0; g < np; ++g) {
            sc.jam_budget = cfg.pz_grid[g];
            double* row = &out[g * nm];
            const std::optional<EffectiveDecomposition> eff = effective_quantities(sc);
            if (!eff || sc.jam_budget == 0.0) {
                const double r = unjammed_rate(sc);
                for (std::size_t m = 0; m + 1 < nm; ++m)
                    row[m] = r;
                row[nm - 1] = 1.0;
                continue;
            }
            const bool pd = eff->signal_is_pd();
            const ClosedFormOutcome cf = pd ? closed_form_pd(*eff, sc.jam_budget, sc.noise_power)
                                            : closed_form_psd(*eff, sc.jam_budget, sc.noise_power);
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                const std::string& method = cfg.methods[m];
                if (method == "closed_form") {
                    row[m] = closed_form_rate(sc, *eff, cf, pd, cfg.clamp_indefinite);
                } else if (method == "spca") {
                    const SpcaResult s = spca_iterate(*eff, sc.jam_budget, cfg.spca);
                    row[m] = rate_single(sc, assemble_qz(*eff, s.q_prime, sc.n_z()));
                } else {
                    const SuboptimalSolution s = pd ? suboptimal_pd(*eff, sc.jam_budget)
                                                    : suboptimal_psd(*eff, sc.jam_budget);
                    row[m] = rate_single(sc, assemble_qz(*eff, s.q_prime, sc.n_z()));
                }
                if (!std::isfinite(row[m]))
                    fail_trial(trial, metrics[m], serialize(sc));
            }
            row[nm - 1] = cf.psd_ok ? 1.0 : 0.0;
        }
    });

    SweepResult r = start_result(cfg, {"pz"});
    r.metadata.emplace_back("closed_form_curve",
                            cfg.clamp_indefinite
                                ? "indefinite candidates projected onto the feasible set"
                                : "indefinite candidates evaluated as-is");
    r.metadata.emplace_back("signal_gram", cfg.require_pd_signal
                                               ? "redrawn until positive definite"
                                               : "as drawn");
    for (std::size_t g = 0; g < np; ++g)
        for (std::size_t m = 0; m < nm; ++m)
            r.rows.push_back(summarize({cfg.pz_grid[g]}, metrics[m], column(table, g * nm + m)));
    return r;
}

SweepResult run_example2(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != "fig3")
        throw ConfigError("experiment: run_example2 handles fig3");
    const std::size_t np = cfg.pz_grid.size();
    constexpr std::size_t nm = 3;   // unjammed, jammed, gap

    TrialTable table(std::size_t(cfg.trials));
    parallel_for(table.size(), [&](std::size_t trial) {
        Rng rng(derive_seed(cfg.seed, {trial}));
        BcScenario bc;
        bc.q_s = HermitianMatrix::identity(cfg.n_t);
        for (const ReceiverSpec& spec : cfg.receivers) {
            BcReceiver rec;
            rec.h = random_channel(rng, spec.n_r, cfg.n_t, 1.0);
            rec.h_z = random_channel(rng, spec.n_r, cfg.n_z, 1.0);
            rec.noise_power = spec.noise_power;
            bc.receivers.push_back(std::move(rec));
        }
        const double unjammed = bc_rate(bc, HermitianMatrix::zero(cfg.n_z));
        std::vector<double>& out = table[trial];
        out.assign(np * nm, 0.0);
        for (std::size_t g = 0; g < np; ++g) {
            bc.jam_budget = cfg.pz_grid[g];
            const double jammed = bc_solve(bc, cfg.spca).rate;
            if (!std::isfinite(jammed) || !std::isfinite(unjammed))
                fail_trial(trial, "broadcast rate", "seed " + std::to_string(cfg.seed));
            out[g * nm + 0] = unjammed;
            out[g * nm + 1] = jammed;
            out[g * nm + 2] = unjammed - jammed;
        }
    });

    SweepResult r = start_result(cfg, {"pz"});
    r.metadata.emplace_back("signal_covariance", "identity");
    static const char* names[nm] = {"rate_unjammed", "rate_jammed", "gap"};
    for (std::size_t g = 0; g < np; ++g)
        for (std::size_t m = 0; m < nm; ++m)
            r.rows.push_back(summarize({cfg.pz_grid[g]}, names[m], column(table, g * nm + m)));
    return r;
}

SweepResult run_example3(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != "fig45")
        throw ConfigError("experiment: run_example3 handles fig45");
    const std::size_t n1 = cfg.p1_grid.size();
    const std::size_t n2 = cfg.v1_grid.size();
    constexpr std::size_t nm = 3;   // jammed, unjammed, rho_1

    TrialTable table(std::size_t(cfg.trials));
    parallel_for(table.size(), [&](std::size_t trial) {
        Rng rng(derive_seed(cfg.seed, {trial}));
        std::vector<ComplexMatrix> h;
        std::vector<ComplexMatrix> g_z;   // unit variance, scaled per grid point
        for (const PairSpec& p : cfg.pairs) {
            h.push_back(random_channel(rng, p.n_r, p.n_t, 1.0));
            g_z.push_back(random_channel(rng, p.n_r, cfg.n_z, 1.0));
        }
        std::vector<double>& out = table[trial];
        out.assign(n1 * n2 * nm, 0.0);
        for (std::size_t a = 0; a < n1; ++a)
            for (std::size_t b = 0; b < n2; ++b) {
                const double p1 = cfg.p1_grid[a];
                const double v1 = cfg.v1_grid[b];
                const double power[2] = {p1, cfg.total_power - p1};
                const double variance[2] = {v1, 2.0 - v1};
                TdmScenario tdm;
                tdm.jam_budget = cfg.jam_budget;
                for (std::size_t i = 0; i < 2; ++i) {
                    const PairSpec& p = cfg.pairs[i];
                    tdm.pairs.push_back(
                        {h[i], HermitianMatrix::identity(p.n_t) * (power[i] / p.n_t),
                         g_z[i] * std::sqrt(variance[i]), p.noise_power, p.beta});
                }
                const TdmSolution s = cfg.tdm_solver == "joint"
                                          ? tdm_solve_joint(tdm, cfg.spca)
                                          : tdm_solve_grid(tdm, cfg.grid_steps, cfg.spca);
                std::vector<HermitianMatrix> idle;
                for (const TdmPair& p : tdm.pairs)
                    idle.push_back(HermitianMatrix::zero(p.h_z.cols()));
                const double unjammed = tdm_rate(tdm, idle);
                if (!std::isfinite(s.sum_rate) || !std::isfinite(unjammed))
                    fail_trial(trial, "tdm rate", "seed " + std::to_string(cfg.seed));
                double* row = &out[(a * n2 + b) * nm];
                row[0] = s.sum_rate;
                row[1] = unjammed;
                row[2] = s.rho[0];
            }
    });

    SweepResult r = start_result(cfg, {"p1", "v1"});
    r.metadata.emplace_back("tdm_solver", cfg.tdm_solver);
    r.metadata.emplace_back("legitimate_covariance", "uniform (P_i / n_t) I");
    r.metadata.emplace_back("r1", "1 - mean(rate_jammed) / mean(rate_unjammed)");
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n2; ++b) {
            const std::vector<double> at{cfg.p1_grid[a], cfg.v1_grid[b]};
            const std::size_t base = (a * n2 + b) * nm;
            std::vector<double> jammed = column(table, base);
            std::vector<double> unjammed = column(table, base + 1);
            SweepRow r1 = reduction_ratio(at, jammed, unjammed);
            r.rows.push_back(summarize(at, "rate_jammed", std::move(jammed)));
            r.rows.push_back(summarize(at, "rate_unjammed", std::move(unjammed)));
            r.rows.push_back(std::move(r1));
            r.rows.push_back(summarize(at, "r2", column(table, base + 2)));
        }
    return r;
}

SweepResult run_experiment(const ExperimentConfig& cfg)
{
    if (cfg.experiment == "fig3")
        return run_example2(cfg);
    if (cfg.experiment == "fig45")
        return run_example3(cfg);
    return run_example1(cfg);
}

}  // namespace jamcraft
