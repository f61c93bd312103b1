#pragma once

// Monte Carlo sweeps over random channels. Every trial draws its channels from
// a stream keyed on (seed, trial), so all grid points and methods see the same
// realizations and results do not depend on the number of worker threads.

#include "jamcraft/config.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace jamcraft {

/// SplitMix64 finalizer applied to a running combination of the keys.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double normal(double stddev);
    /// Uniform in [0, n).
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// i.i.d. circularly-symmetric complex Gaussian entries of the given variance.
ComplexMatrix random_channel(Rng& rng, Index rows, Index cols, double variance);

struct SweepRow {
    std::vector<double> coords;
    std::string metric;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    std::vector<double> samples;   // per-trial values (empty for derived ratios)
};

struct SweepResult {
    std::string experiment;
    std::vector<std::string> coord_names;   // {"pz"} or {"p1", "v1"}
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<SweepRow> rows;

    const SweepRow& row(const std::vector<double>& coords, const std::string& metric) const;
};

/// "# key=value" metadata lines, then the header and one row per
/// (grid point, metric), numbers with 12 significant digits.
void write_csv(const SweepResult& r, std::ostream& out);
void write_csv(const SweepResult& r, const std::string& path);

/// JAMCRAFT_THREADS, or the hardware concurrency when unset or 0.
unsigned worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. The first exception
/// (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// fig1, fig2 and custom: single link, waterfilled Q_s.
SweepResult run_example1(const ExperimentConfig& cfg);
/// fig3: broadcast channel.
SweepResult run_example2(const ExperimentConfig& cfg);
/// fig45: two time-multiplexed pairs over a (P1, v1) grid.
SweepResult run_example3(const ExperimentConfig& cfg);

SweepResult run_experiment(const ExperimentConfig& cfg);

/// One single-link draw: H_r, H_z and the waterfilled Q_s. With
/// require_pd the draw is repeated (same stream) until H_r Q_s H_rᴴ ≻ 0.
JammingScenario draw_single_link(Rng& rng, const ExperimentConfig& cfg, bool require_pd);

}  // namespace jamcraft
