#include "jamcraft/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace jamcraft {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that the rest
// can be reported as unknown.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ConfigError(where() + ": expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string at(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    void read(const std::string& key, double& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number())
                throw ConfigError(at(key) + ": expected a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                throw ConfigError(at(key) + ": must be finite");
        }
    }

    void read(const std::string& key, int& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_integer())
                throw ConfigError(at(key) + ": expected an integer");
            out = v->get<int>();
        }
    }

    void read(const std::string& key, std::uint64_t& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned())
                throw ConfigError(at(key) + ": expected a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void read(const std::string& key, bool& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_boolean())
                throw ConfigError(at(key) + ": expected true or false");
            out = v->get<bool>();
        }
    }

    void read(const std::string& key, std::string& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_string())
                throw ConfigError(at(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    void read(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_array())
                throw ConfigError(at(key) + ": expected a list of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    throw ConfigError(at(key) + "[" + std::to_string(i) + "]: expected a number");
                out.push_back((*v)[i].get<double>());
            }
        }
    }

    void read(const std::string& key, std::vector<std::string>& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_array())
                throw ConfigError(at(key) + ": expected a list of strings");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_string())
                    throw ConfigError(at(key) + "[" + std::to_string(i) + "]: expected a string");
                out.push_back((*v)[i].get<std::string>());
            }
        }
    }

    const json& require(const std::string& key)
    {
        const json* v = get(key);
        if (!v)
            throw ConfigError(at(key) + ": required field is missing");
        return *v;
    }

    void finish() const
    {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key()))
                throw ConfigError(at(item.key()) + ": unknown field");
    }

    std::string where() const { return path_.empty() ? "config" : path_; }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string index_path(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

void read_spca(Fields& f, SpcaOptions& opts)
{
    const json* v = f.get("spca");
    if (!v)
        return;
    Fields s(*v, f.at("spca"));
    s.read("max_outer_iters", opts.max_outer_iters);
    s.read("outer_tol", opts.outer_tol);
    s.read("inner_max_iters", opts.inner_max_iters);
    s.read("inner_tol", opts.inner_tol);
    s.read("step_shrink", opts.step_shrink);
    s.read("extrapolate", opts.extrapolate);
    s.read("polish", opts.polish);
    s.finish();
    try {
        opts.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(f.at("spca") + ": " + e.what());
    }
}

void check_grid(const std::vector<double>& grid, const std::string& path, double lo,
                bool lo_open, double hi = INFINITY, bool hi_open = true)
{
    if (grid.empty())
        throw ConfigError(path + ": grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid[i];
        const bool low_ok = lo_open ? g > lo : g >= lo;
        const bool high_ok = hi_open ? g < hi : g <= hi;
        if (!std::isfinite(g) || !low_ok || !high_ok)
            throw ConfigError(index_path(path, i) + ": value out of range");
        if (i > 0 && !(g > grid[i - 1]))
            throw ConfigError(path + ": grid must be strictly increasing");
    }
}

void check_positive(double v, const std::string& path)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(path + ": must be positive");
}

void check_count(int v, const std::string& path)
{
    if (v < 1)
        throw ConfigError(path + ": must be at least 1");
}

std::vector<double> arange(double start, double stop, double step)
{
    std::vector<double> out;
    for (int k = 0; start + k * step < stop + 1e-9; ++k)
        out.push_back(std::round((start + k * step) * 1e9) / 1e9);
    return out;
}

}  // namespace

void ExperimentConfig::validate() const
{
    static const std::set<std::string> kinds{"fig1", "fig2", "fig3", "fig45", "custom"};
    if (!kinds.count(experiment))
        throw ConfigError("experiment: must be one of fig1, fig2, fig3, fig45, custom");
    check_count(trials, "trials");
    check_count(n_t, "n_t");
    check_count(n_z, "n_z");
    check_positive(jam_budget, "jam_budget");
    try {
        spca.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("spca: ") + e.what());
    }

    if (experiment == "fig45") {
        if (pairs.size() != 2)
            throw ConfigError("pairs: fig45 needs exactly two pairs");
        double beta = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const std::string p = index_path("pairs", i);
            check_count(pairs[i].n_t, p + ".n_t");
            check_count(pairs[i].n_r, p + ".n_r");
            check_positive(pairs[i].beta, p + ".beta");
            check_positive(pairs[i].noise_power, p + ".noise_power");
            beta += pairs[i].beta;
        }
        if (std::abs(beta - 1.0) > 1e-12)
            throw ConfigError("pairs: beta values must sum to 1");
        check_positive(total_power, "total_power");
        check_grid(p1_grid, "p1_grid", 0.0, true, total_power, true);
        check_grid(v1_grid, "v1_grid", 0.0, true, 2.0, true);
        if (tdm_solver != "joint" && tdm_solver != "grid")
            throw ConfigError("tdm_solver: must be joint or grid");
        if (grid_steps < 2)
            throw ConfigError("grid_steps: must be at least 2");
        return;
    }

    check_grid(pz_grid, "pz_grid", 0.0, false);
    if (experiment == "fig3") {
        if (receivers.empty())
            throw ConfigError("receivers: at least one receiver is required");
        for (std::size_t i = 0; i < receivers.size(); ++i) {
            check_count(receivers[i].n_r, index_path("receivers", i) + ".n_r");
            check_positive(receivers[i].noise_power, index_path("receivers", i) + ".noise_power");
        }
        return;
    }

    check_count(n_r, "n_r");
    check_positive(transmit_power, "transmit_power");
    check_positive(noise_power, "noise_power");
    static const std::set<std::string> known{"closed_form", "spca", "suboptimal"};
    std::set<std::string> seen;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (!known.count(methods[i]))
            throw ConfigError(index_path("methods", i) +
                              ": must be closed_form, spca or suboptimal");
        if (!seen.insert(methods[i]).second)
            throw ConfigError(index_path("methods", i) + ": listed twice");
    }
}

ExperimentConfig default_config(const std::string& experiment)
{
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "fig1" || experiment == "custom") {
        c.trials = experiment == "fig1" ? 800 : 100;
        c.pz_grid = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 50.0};
        c.methods = {"closed_form", "spca", "suboptimal"};
    } else if (experiment == "fig2") {
        c.pz_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
        c.methods = {"closed_form"};
    } else if (experiment == "fig3") {
        c.trials = 400;
        c.n_t = 4;
        c.n_z = 4;
        c.pz_grid = {0.0, 1.0, 2.0, 4.0, 8.0};
        c.receivers = {{3, 0.5}, {4, 0.5}, {4, 1.0}};
    } else if (experiment == "fig45") {
        c.trials = 400;
        c.n_z = 4;
        c.pairs = {{4, 4, 0.5, 1.0}, {3, 3, 0.5, 1.0}};
        c.p1_grid = arange(0.25, 4.75, 0.5);
        c.v1_grid = arange(0.1, 1.9, 0.2);
    } else {
        throw ConfigError("experiment: must be one of fig1, fig2, fig3, fig45, custom");
    }
    return c;
}

ExperimentConfig parse_experiment(const json& doc)
{
    Fields f(doc, "");
    std::string experiment = "custom";
    f.read("experiment", experiment);
    ExperimentConfig c = default_config(experiment);
    f.read("seed", c.seed);
    f.read("trials", c.trials);
    f.read("n_t", c.n_t);
    f.read("n_r", c.n_r);
    f.read("n_z", c.n_z);
    f.read("transmit_power", c.transmit_power);
    f.read("noise_power", c.noise_power);
    f.read("pz_grid", c.pz_grid);
    f.read("methods", c.methods);
    f.read("clamp_indefinite", c.clamp_indefinite);
    f.read("require_pd_signal", c.require_pd_signal);
    if (const json* v = f.get("receivers")) {
        if (!v->is_array())
            throw ConfigError("receivers: expected a list");
        c.receivers.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            Fields r((*v)[i], index_path("receivers", i));
            ReceiverSpec spec;
            r.read("n_r", spec.n_r);
            r.read("noise_power", spec.noise_power);
            r.finish();
            c.receivers.push_back(spec);
        }
    }
    if (const json* v = f.get("pairs")) {
        if (!v->is_array())
            throw ConfigError("pairs: expected a list");
        c.pairs.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            Fields p((*v)[i], index_path("pairs", i));
            PairSpec spec;
            p.read("n_t", spec.n_t);
            p.read("n_r", spec.n_r);
            p.read("beta", spec.beta);
            p.read("noise_power", spec.noise_power);
            p.finish();
            c.pairs.push_back(spec);
        }
    }
    f.read("jam_budget", c.jam_budget);
    f.read("total_power", c.total_power);
    f.read("p1_grid", c.p1_grid);
    f.read("v1_grid", c.v1_grid);
    f.read("tdm_solver", c.tdm_solver);
    f.read("grid_steps", c.grid_steps);
    read_spca(f, c.spca);
    f.finish();
    c.validate();
    return c;
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["experiment"] = c.experiment;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["n_t"] = c.n_t;
    j["n_z"] = c.n_z;
    j["spca"] = {{"max_outer_iters", c.spca.max_outer_iters},
                 {"outer_tol", c.spca.outer_tol},
                 {"inner_max_iters", c.spca.inner_max_iters},
                 {"inner_tol", c.spca.inner_tol},
                 {"step_shrink", c.spca.step_shrink},
                 {"extrapolate", c.spca.extrapolate},
                 {"polish", c.spca.polish}};
    if (c.experiment == "fig45") {
        json pairs = json::array();
        for (const PairSpec& p : c.pairs)
            pairs.push_back({{"n_t", p.n_t}, {"n_r", p.n_r}, {"beta", p.beta},
                             {"noise_power", p.noise_power}});
        j["pairs"] = pairs;
        j["jam_budget"] = c.jam_budget;
        j["total_power"] = c.total_power;
        j["p1_grid"] = c.p1_grid;
        j["v1_grid"] = c.v1_grid;
        j["tdm_solver"] = c.tdm_solver;
        j["grid_steps"] = c.grid_steps;
        return j;
    }
    j["pz_grid"] = c.pz_grid;
    if (c.experiment == "fig3") {
        json receivers = json::array();
        for (const ReceiverSpec& r : c.receivers)
            receivers.push_back({{"n_r", r.n_r}, {"noise_power", r.noise_power}});
        j["receivers"] = receivers;
        return j;
    }
    j["n_r"] = c.n_r;
    j["transmit_power"] = c.transmit_power;
    j["noise_power"] = c.noise_power;
    j["methods"] = c.methods;
    j["clamp_indefinite"] = c.clamp_indefinite;
    j["require_pd_signal"] = c.require_pd_signal;
    return j;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : to_json(cfg).dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

// ---- single problems -------------------------------------------------------

namespace {

ComplexMatrix read_matrix(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty())
        throw ConfigError(path + ": expected a nonempty list of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    ComplexMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = v[i];
        const std::string rp = index_path(path, i);
        if (!row.is_array() || row.empty())
            throw ConfigError(rp + ": expected a nonempty row");
        if (i == 0) {
            cols = row.size();
            m.resize(Index(rows), Index(cols));
        } else if (row.size() != cols) {
            throw ConfigError(rp + ": row length differs from row 0");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const json& e = row[j];
            const std::string ep = index_path(rp, j);
            if (e.is_number()) {
                m(Index(i), Index(j)) = Complex(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(Index(i), Index(j)) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(ep + ": expected a number or a [re, im] pair");
            }
        }
    }
    if (!all_finite(m))
        throw ConfigError(path + ": entries must be finite");
    return m;
}

ComplexMatrix required_matrix(Fields& f, const std::string& key)
{
    return read_matrix(f.require(key), f.at(key));
}

HermitianMatrix read_covariance(const json& v, const std::string& path)
{
    const ComplexMatrix m = read_matrix(v, path);
    if (m.rows() != m.cols())
        throw ConfigError(path + ": covariance must be square");
    if ((m - m.adjoint()).norm() > 1e-9 * std::max(1.0, m.norm()))
        throw ConfigError(path + ": covariance must be Hermitian");
    return HermitianMatrix(m);
}

void wrap(const std::string& path, const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<const json*> read_list(Fields& f, const std::string& key)
{
    const json& v = f.require(key);
    if (!v.is_array() || v.empty())
        throw ConfigError(f.at(key) + ": expected a nonempty list");
    std::vector<const json*> out;
    for (const json& e : v)
        out.push_back(&e);
    return out;
}

SingleProblem read_single(Fields& f)
{
    SingleProblem p;
    JammingScenario& sc = p.scenario;
    sc.h_r = required_matrix(f, "h_r");
    sc.h_z = required_matrix(f, "h_z");
    f.read("noise_power", sc.noise_power);
    f.require("jam_budget");
    f.read("jam_budget", sc.jam_budget);
    const bool has_q = f.has("q_s");
    const bool has_power = f.has("transmit_power");
    if (has_q == has_power)
        throw ConfigError("q_s: give exactly one of q_s or transmit_power (waterfilling)");
    if (has_q) {
        sc.q_s = read_covariance(*f.get("q_s"), "q_s");
    } else {
        double power = 0.0;
        f.read("transmit_power", power);
        check_positive(power, "transmit_power");
        check_positive(sc.noise_power, "noise_power");
        sc.q_s = waterfilling(sc.h_r, power, sc.noise_power);
    }
    std::string fallback = "spca";
    f.read("fallback", fallback);
    if (fallback == "spca")
        p.fallback = Fallback::spca;
    else if (fallback == "suboptimal")
        p.fallback = Fallback::suboptimal;
    else
        throw ConfigError("fallback: must be spca or suboptimal");
    wrap("scenario", [&] { sc.validate(); });
    return p;
}

MacScenario read_mac(Fields& f)
{
    MacScenario mac;
    const auto links = read_list(f, "links");
    for (std::size_t i = 0; i < links.size(); ++i) {
        Fields l(*links[i], index_path("links", i));
        MacLink link{required_matrix(l, "h"), read_covariance(l.require("q"), l.at("q"))};
        l.finish();
        mac.links.push_back(std::move(link));
    }
    mac.h_z = required_matrix(f, "h_z");
    f.read("noise_power", mac.noise_power);
    f.read("jam_budget", mac.jam_budget);
    wrap("scenario", [&] { mac.validate(); });
    return mac;
}

BcScenario read_bc(Fields& f)
{
    BcScenario bc;
    bc.q_s = read_covariance(f.require("q_s"), "q_s");
    const auto receivers = read_list(f, "receivers");
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        Fields r(*receivers[i], index_path("receivers", i));
        BcReceiver rec{required_matrix(r, "h"), required_matrix(r, "h_z"), 1.0};
        r.read("noise_power", rec.noise_power);
        r.finish();
        bc.receivers.push_back(std::move(rec));
    }
    f.read("jam_budget", bc.jam_budget);
    wrap("scenario", [&] { bc.validate(); });
    return bc;
}

TdmProblem read_tdm(Fields& f)
{
    TdmProblem p;
    const auto pairs = read_list(f, "pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Fields r(*pairs[i], index_path("pairs", i));
        TdmPair pair{required_matrix(r, "h"), read_covariance(r.require("q"), r.at("q")),
                     required_matrix(r, "h_z"), 1.0, 1.0};
        r.read("noise_power", pair.noise_power);
        r.read("beta", pair.beta);
        r.finish();
        p.scenario.pairs.push_back(std::move(pair));
    }
    f.read("jam_budget", p.scenario.jam_budget);
    f.read("solver", p.solver);
    f.read("grid_steps", p.grid_steps);
    if (p.solver != "joint" && p.solver != "grid")
        throw ConfigError("solver: must be joint or grid");
    if (p.grid_steps < 2)
        throw ConfigError("grid_steps: must be at least 2");
    wrap("scenario", [&] { p.scenario.validate(); });
    return p;
}

IcScenario read_ic(Fields& f)
{
    IcScenario ic;
    const auto pairs = read_list(f, "pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Fields r(*pairs[i], index_path("pairs", i));
        IcPair pair{required_matrix(r, "h"), read_covariance(r.require("q"), r.at("q")),
                    required_matrix(r, "h_z"), 1.0};
        r.read("noise_power", pair.noise_power);
        r.finish();
        ic.pairs.push_back(std::move(pair));
    }
    // cross: list of {"to": i, "from": j, "h": matrix}
    ic.cross.assign(ic.pairs.size(), std::vector<ComplexMatrix>(ic.pairs.size()));
    if (const json* v = f.get("cross")) {
        if (!v->is_array())
            throw ConfigError("cross: expected a list");
        for (std::size_t k = 0; k < v->size(); ++k) {
            Fields c((*v)[k], index_path("cross", k));
            int to = -1;
            int from = -1;
            c.read("to", to);
            c.read("from", from);
            const int m = int(ic.pairs.size());
            if (to < 0 || to >= m || from < 0 || from >= m || to == from)
                throw ConfigError(c.where() + ": to/from must be distinct pair indices");
            ic.cross[std::size_t(to)][std::size_t(from)] = required_matrix(c, "h");
            c.finish();
        }
    }
    f.read("jam_budget", ic.jam_budget);
    wrap("scenario", [&] { ic.validate(); });
    return ic;
}

}  // namespace

ProblemConfig parse_problem(const json& doc)
{
    Fields f(doc, "");
    std::string kind = "single";
    f.read("kind", kind);
    ProblemConfig out;
    if (kind == "single")
        out.problem = read_single(f);
    else if (kind == "mac")
        out.problem = read_mac(f);
    else if (kind == "bc")
        out.problem = read_bc(f);
    else if (kind == "tdm")
        out.problem = read_tdm(f);
    else if (kind == "ic")
        out.problem = read_ic(f);
    else
        throw ConfigError("kind: must be single, mac, bc, tdm or ic");
    read_spca(f, out.spca);
    f.finish();
    return out;
}

json matrix_to_json(const ComplexMatrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace jamcraft
