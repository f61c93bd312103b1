#include "jamcraft/config.hpp"
#include "jamcraft/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace jamcraft;
using nlohmann::json;

namespace {

struct Moments {
    double mean_abs = 0.0;
    double variance = 0.0;
};

Moments sample_moments(std::uint64_t seed, double variance, int n)
{
    Rng rng(seed);
    const ComplexMatrix m = random_channel(rng, n, 1, variance);
    const Complex mean = m.mean();
    Moments out;
    out.mean_abs = std::abs(mean);
    out.variance = (m.array() - mean).abs2().sum() / (n - 1);
    return out;
}

std::string csv_of(const ExperimentConfig& cfg)
{
    std::ostringstream s;
    write_csv(run_experiment(cfg), s);
    return s.str();
}

class ThreadsEnv {
public:
    explicit ThreadsEnv(const char* v) { setenv("JAMCRAFT_THREADS", v, 1); }
    ~ThreadsEnv() { unsetenv("JAMCRAFT_THREADS"); }
};

}  // namespace

TEST(Rng, DeterministicStreams)
{
    Rng a(derive_seed(7, {1, 2})), b(derive_seed(7, {1, 2}));
    EXPECT_EQ(random_channel(a, 3, 3, 1.0), random_channel(b, 3, 3, 1.0));
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
    EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(Rng, UnitVarianceStatistics)
{
    const Moments m = sample_moments(123, 1.0, 100000);
    EXPECT_LT(m.mean_abs, 0.02);
    EXPECT_GE(m.variance, 0.97);
    EXPECT_LE(m.variance, 1.03);

    // real and imaginary parts each carry half
    Rng rng(5);
    const ComplexMatrix z = random_channel(rng, 100000, 1, 1.0);
    EXPECT_NEAR(z.real().array().square().mean(), 0.5, 0.015);
    EXPECT_NEAR(z.imag().array().square().mean(), 0.5, 0.015);
}

TEST(Rng, VarianceScales)
{
    const double ratio = sample_moments(9, 2.0, 100000).variance / sample_moments(10, 1.0, 100000).variance;
    EXPECT_NEAR(ratio, 2.0, 0.1);
}

TEST(Rng, IndexInRange)
{
    Rng rng(3);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 5000; ++i)
        ++hits.at(rng.index(5));
    for (int h : hits)
        EXPECT_GT(h, 800);
}

TEST(Harness, WorkerCountFromEnvironment)
{
    {
        ThreadsEnv env("3");
        EXPECT_EQ(worker_count(), 3u);
    }
    {
        ThreadsEnv env("0");
        EXPECT_GE(worker_count(), 1u);
    }
    {
        ThreadsEnv env("lots");
        EXPECT_THROW(worker_count(), ConfigError);
    }
}

TEST(Harness, ParallelForRethrowsLowestIndex)
{
    ThreadsEnv env("4");
    std::vector<int> done(50, 0);
    parallel_for(50, [&](std::size_t i) { done[i] = 1; });
    for (int d : done)
        EXPECT_EQ(d, 1);
    try {
        parallel_for(50, [](std::size_t i) {
            if (i == 10 || i == 40)
                throw DomainError("trial " + std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const DomainError& e) {
        EXPECT_STREQ(e.what(), "trial 10");
    }
}

TEST(Harness, CsvSchemaAndDeterminism)
{
    ExperimentConfig cfg = default_config("fig1");
    cfg.trials = 3;
    cfg.pz_grid = {0.5, 4.0};
    const std::string a = csv_of(cfg);
    const std::string b = csv_of(cfg);
    EXPECT_EQ(a, b);

    std::istringstream in(a);
    std::string line;
    int meta = 0, rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            ++meta;
            EXPECT_NE(line.find('='), std::string::npos);
        } else if (!header) {
            EXPECT_EQ(line, "experiment,pz,metric,mean,stderr,trials,seed");
            header = true;
        } else {
            ++rows;
            EXPECT_EQ(line.rfind("fig1,", 0), 0u);
        }
    }
    EXPECT_GT(meta, 0);
    // three methods plus the PSD fraction per grid point
    EXPECT_EQ(rows, 8);
}

TEST(Harness, ThreadCountDoesNotChangeResults)
{
    ExperimentConfig cfg = default_config("fig1");
    cfg.trials = 6;
    cfg.pz_grid = {1.0};
    std::string one, four;
    {
        ThreadsEnv env("1");
        one = csv_of(cfg);
    }
    {
        ThreadsEnv env("4");
        four = csv_of(cfg);
    }
    EXPECT_EQ(one, four);
}

TEST(Harness, SameDrawsAcrossGridPoints)
{
    ExperimentConfig cfg = default_config("fig3");
    cfg.trials = 4;
    cfg.pz_grid = {0.0, 1.0};
    const SweepResult r = run_experiment(cfg);
    const SweepRow& a = r.row({0.0}, "rate_unjammed");
    const SweepRow& b = r.row({1.0}, "rate_unjammed");
    EXPECT_EQ(a.samples, b.samples);
    const SweepRow& j = r.row({0.0}, "rate_jammed");
    for (std::size_t t = 0; t < a.samples.size(); ++t)
        EXPECT_NEAR(j.samples[t], a.samples[t], 1e-12);
}

TEST(Harness, TimeSharingSinglePoint)
{
    ExperimentConfig cfg = default_config("fig45");
    cfg.trials = 1;
    cfg.p1_grid = {2.5};
    cfg.v1_grid = {1.0};
    const std::string a = csv_of(cfg);
    EXPECT_EQ(a, csv_of(cfg));
    const SweepResult r = run_experiment(cfg);
    const double r2 = r.row({2.5, 1.0}, "r2").mean;
    EXPECT_GE(r2, 0.0);
    EXPECT_LE(r2, 1.0);
    const double r1 = r.row({2.5, 1.0}, "r1").mean;
    EXPECT_GT(r1, 0.0);
    EXPECT_LT(r1, 1.0);
}

TEST(Config, DefaultsValidate)
{
    for (const char* e : {"fig1", "fig2", "fig3", "fig45", "custom"})
        EXPECT_NO_THROW(default_config(e).validate()) << e;
    EXPECT_THROW(default_config("fig9"), ConfigError);
}

TEST(Config, RoundTripAndHash)
{
    ExperimentConfig cfg = default_config("fig1");
    cfg.trials = 17;
    cfg.spca.outer_tol = 1e-8;
    const ExperimentConfig back = parse_experiment(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    cfg.seed = 2;
    EXPECT_NE(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(back).size(), 16u);
}

TEST(Config, ErrorsNameTheField)
{
    const auto message = [](const json& doc) {
        try {
            parse_experiment(doc);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message({{"experiment", "fig1"}, {"trails", 3}}).find("trails: unknown field"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig1"}, {"trials", "many"}}).find("trials"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig1"}, {"pz_grid", {1.0, -2.0}}}).find("pz_grid[1]"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig1"}, {"methods", {"magic"}}}).find("methods[0]"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig1"}, {"spca", {{"step_shrink", 2.0}}}}).find("spca"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig1"}, {"spca", {{"speed", 2}}}}).find("spca.speed"),
              std::string::npos);
    EXPECT_NE(message({{"experiment", "fig45"}, {"tdm_solver", "guess"}}).find("tdm_solver"),
              std::string::npos);
    EXPECT_NE(message(json::array()).find("expected an object"), std::string::npos);
}

TEST(Config, ProblemSingle)
{
    const json doc = {{"h_r", {{1.0}}},
                      {"q_s", {{1.0}}},
                      {"h_z", {{json::array({1.0, 0.0})}}},
                      {"jam_budget", 1.0},
                      {"fallback", "suboptimal"}};
    const ProblemConfig p = parse_problem(doc);
    const auto& single = std::get<SingleProblem>(p.problem);
    EXPECT_EQ(single.fallback, Fallback::suboptimal);
    EXPECT_EQ(single.scenario.jam_budget, 1.0);

    json both = doc;
    both["transmit_power"] = 2.0;
    EXPECT_THROW(parse_problem(both), ConfigError);
    json ragged = doc;
    ragged["h_r"] = {{1.0, 2.0}, {1.0}};
    EXPECT_THROW(parse_problem(ragged), ConfigError);
    json bad_kind = doc;
    bad_kind["kind"] = "mesh";
    EXPECT_THROW(parse_problem(bad_kind), ConfigError);
}

TEST(Config, ProblemWaterfilledAndMultiTarget)
{
    const json single = {{"h_r", {{1.0, 0.0}, {0.0, 2.0}}},
                         {"transmit_power", 2.0},
                         {"h_z", {{1.0}, {1.0}}},
                         {"jam_budget", 1.0}};
    const ProblemConfig ps = parse_problem(single);
    const auto& s = std::get<SingleProblem>(ps.problem);
    EXPECT_NEAR(s.scenario.q_s.trace(), 2.0, 1e-12);

    const json tdm = {{"kind", "tdm"},
                      {"jam_budget", 2.0},
                      {"solver", "grid"},
                      {"grid_steps", 10},
                      {"pairs",
                       {{{"h", {{1.0}}}, {"q", {{1.0}}}, {"h_z", {{1.0}}}, {"beta", 0.5}},
                        {{"h", {{2.0}}}, {"q", {{1.0}}}, {"h_z", {{0.5}}}, {"beta", 0.5}}}}};
    const ProblemConfig pt = parse_problem(tdm);
    const auto& t = std::get<TdmProblem>(pt.problem);
    EXPECT_EQ(t.solver, "grid");
    EXPECT_EQ(t.scenario.pairs.size(), 2u);

    const json ic = {{"kind", "ic"},
                     {"jam_budget", 1.0},
                     {"pairs",
                      {{{"h", {{1.0}}}, {"q", {{1.0}}}, {"h_z", {{1.0}}}},
                       {{"h", {{1.0}}}, {"q", {{1.0}}}, {"h_z", {{1.0}}}}}},
                     {"cross", {{{"to", 0}, {"from", 1}, {"h", {{0.3}}}}}}};
    const ProblemConfig pc = parse_problem(ic);
    const auto& c = std::get<IcScenario>(pc.problem);
    EXPECT_EQ(c.cross[0][1].rows(), 1);
    EXPECT_EQ(c.cross[1][0].size(), 0);
}

TEST(Config, MatrixJsonRoundTrip)
{
    ComplexMatrix m(2, 2);
    m << Complex(1, 2), 3, Complex(0, -1), 4;
    const json doc = {{"h_r", matrix_to_json(m)},
                      {"q_s", {{1.0, 0.0}, {0.0, 1.0}}},
                      {"h_z", matrix_to_json(m)},
                      {"jam_budget", 0.5}};
    const ProblemConfig p = parse_problem(doc);
    EXPECT_EQ(std::get<SingleProblem>(p.problem).scenario.h_r, m);
}
