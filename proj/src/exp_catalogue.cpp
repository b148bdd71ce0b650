#include <charconv>
#include <fstream>
#include <sstream>

#include "exp_internal.hpp"

namespace gibbsflow {

using nlohmann::json;

std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}
std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string Table::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_cell(columns[i]);
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw std::logic_error("table " + name + ": ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
    return os.str();
}

void Table::write(const std::filesystem::path& file) const {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::filesystem::filesystem_error("cannot write", file, std::make_error_code(std::errc::io_error));
    os << to_csv();
    if (!os) throw std::filesystem::filesystem_error("write failed", file, std::make_error_code(std::errc::io_error));
}

void ExperimentOutput::add(const std::string& case_, const std::string& quantity, double value, double se,
                           std::uint64_t n) {
    results.rows.push_back({case_, quantity, fmt(value), fmt(se), fmt(n)});
}

void ExperimentOutput::check(const std::string& property, bool pass, const std::string& detail) {
    verdicts.push_back({property, pass, detail});
}

bool ExperimentOutput::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return !verdicts.empty();
}

namespace {


std::vector<ParamSpec> lattice_grid(double horizon) {
    return {{"cells", json{1, 4, 6}, "lattice sizes"},
            {"betas", json{0.3, 1.0}, "inverse temperatures"},
            {"alphas", json{1.0, -1.0}, "area coefficients (both signs)"},
            {"cell_width", 0.5, "cell width"},
            {"range", 1.0, "interaction range"},
            {"horizon", horizon, "time horizon"}};
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<Experiment> build_catalogue() {
    std::vector<Experiment> c;
    c.push_back({"debruijn", "A1", "entropy identity I(mu T_T) + int_0^T J = I(mu) on lattice surrogates",
                 concat(lattice_grid(3.0), {{"n_grid", 401, "quadrature nodes (odd)"},
                                            {"grading", 3.0, "node grading exponent towards t = 0 (1 is uniform)"},
                                            {"tolerance", 1e-7, "max residual"}}),
                 detail::run_debruijn});
    c.push_back({"dissipation", "A2", "dI/dt = -J by central differences",
                 concat(lattice_grid(3.0), {{"n_times", 20, "evaluation times in (0, horizon]"},
                                            {"step", 1e-5, "difference step"},
                                            {"tolerance", 1e-6, "max |dI/dt + J|"}}),
                 detail::run_dissipation});
    c.push_back({"strict-decrease", "A3", "entropy strictly decreasing off equilibrium",
                 {{"cells", json{4}, "lattice sizes"},
                  {"betas", json{1.0}, "inverse temperatures"},
                  {"alphas", json{1.0, -1.0}, "area coefficients"},
                  {"cell_width", 0.5, "cell width"},
                  {"range", 1.0, "interaction range"},
                  {"horizon", 5.0, "time horizon"},
                  {"n_grid", 50, "time grid points"},
                  {"n_initial", 100, "random initial laws per model"},
                  {"entropy_floor", 1e-10, "stop comparing below this entropy"},
                  {"margin", 1e-12, "required drop per step"}},
                 detail::run_strict_decrease});
    c.push_back({"decay", "A4", "entropy decay under the kappa envelope and asymptotic rate",
                 {{"cells", 6, "lattice size"},
                  {"cell_width", 0.5, "cell width"},
                  {"range", 1.0, "interaction range"},
                  {"alpha", -1.0, "area coefficient"},
                  {"betas", json{1.0, 0.5, 0.3, 0.2, 0.1, 0.05}, "inverse temperatures"},
                  {"limit_betas", json{0.2, 0.1, 0.05}, "decreasing betas for the kappa limit"},
                  {"n_initial", 100, "random initial laws per beta"},
                  {"n_grid", 50, "time grid points"},
                  {"horizon", 5.0, "time horizon"},
                  {"perturbation", 1e-3, "size of the near-equilibrium perturbation"},
                  {"fit_start", 30.0, "start of the rate fit, in units of 1 / gap"},
                  {"fit_end", 60.0, "end of the rate fit, in units of 1 / gap"},
                  {"slope_tolerance", 0.05, "relative tolerance on the asymptotic rate"}},
                 detail::run_decay});
    c.push_back({"series", "A5", "truncated generator series against the semigroup",
                 {{"cell_width", 0.5, "oracle cell width"},
                  {"range", 1.0, "interaction range"},
                  {"oracle_cells", json{4, 6}, "oracle lattice sizes"},
                  {"oracle_alphas", json{1.0, -1.0}, "oracle area coefficients"},
                  {"oracle_times", json{0.1, 0.25, 0.5}, "oracle times"},
                  {"oracle_terms", 40, "oracle series terms"},
                  {"oracle_tolerance", 1e-10, "oracle tolerance"},
                  {"window_length", 1.0, "observation window length"},
                  {"buffer", 6.0, "buffer in units of R"},
                  {"initial_intensity", 0.5, "Poisson intensity of the initial law"},
                  {"time", 0.05, "continuum time"},
                  {"replicas", 100000, "continuum replicas per side"},
                  {"quadrature_n", 4, "uniform draws per birth integral"},
                  {"ideal_z", 1.0, "activity of the ideal model"},
                  {"area_alpha", 1.0, "area coefficient of the interacting model"},
                  {"area_beta", 1.0, "inverse temperature of the interacting model"},
                  {"se_multiplier", 3.0, "tolerance in combined standard errors"}},
                 detail::run_series});
    c.push_back({"reversibility", "A6", "nu[(T_t f) g] = nu[f (T_t g)]",
                 {{"cell_width", 0.5, "oracle cell width"},
                  {"range", 1.0, "interaction range"},
                  {"oracle_cells", 6, "oracle lattice size"},
                  {"oracle_alpha", 1.0, "oracle area coefficient"},
                  {"oracle_beta", 1.0, "oracle inverse temperature"},
                  {"oracle_times", json{0.1, 0.5, 1.0, 2.0}, "oracle times"},
                  {"window_length", 4.0, "continuum window length"},
                  {"alpha", 1.0, "continuum area coefficient"},
                  {"beta", 0.5, "continuum inverse temperature"},
                  {"chains", 8, "independent Gibbs chains"},
                  {"samples_per_chain", 2500, "samples per chain"},
                  {"burn_in", 20.0, "burn-in time"},
                  {"spacing", 5.0, "time between samples"},
                  {"time", 0.5, "continuum time"},
                  {"se_multiplier", 3.0, "tolerance in standard errors"}},
                 detail::run_reversibility});
    c.push_back({"finite-time-gibbs", "A7", "no finite-time convergence to equilibrium",
                 {{"cells", 4, "lattice size"},
                  {"cell_width", 0.5, "cell width"},
                  {"range", 1.0, "interaction range"},
                  {"alpha", 1.0, "area coefficient"},
                  {"beta", 1.0, "inverse temperature"},
                  {"horizon", 10.0, "time horizon"},
                  {"n_grid", 200, "time grid points"},
                  {"tv_floor", 1e-9, "lower bound on the distance"}},
                 detail::run_finite_time_gibbs});
    c.push_back({"ideal-gas", "A8", "ideal-gas count law Poisson(z (1 - e^{-t}) |window|)",
                 {{"window_length", 4.0, "window length"},
                  {"intensities", json{0.5, 1.0, 2.0}, "activities"},
                  {"times", json{0.5, 1.0}, "times"},
                  {"replicas", 10000, "replicas per (z, t)"},
                  {"level", 0.01, "minimum p-value"}},
                 detail::run_ideal_gas});
    c.push_back({"gnz", "A9", "GNZ residuals of Gibbs samples",
                 {{"window_length", 8.0, "window length"},
                  {"range", 1.0, "interaction range"},
                  {"samples", 2000, "samples per chain"},
                  {"burn_in", 20.0, "burn-in time"},
                  {"spacing", 5.0, "time between samples"},
                  {"pair_max_neighbors", 50, "neighbour cap of the pair model"},
                  {"se_multiplier", 3.0, "tolerance in standard errors"}},
                 detail::run_gnz});
    c.push_back({"finite-speed", "A10", "disagreement probability against buffer width",
                 {{"window_length", 1.0, "observation window length"},
                  {"range", 1.0, "interaction range"},
                  {"alpha", -1.5, "area coefficient"},
                  {"beta", 2.0, "inverse temperature"},
                  {"horizon", 1.0, "time horizon"},
                  {"big_buffer", 12.0, "reference buffer in units of R"},
                  {"buffers", json{1.0, 2.0, 4.0, 8.0}, "buffers in units of R"},
                  {"replicas", 10000, "replicas"},
                  {"separation_threshold", 0.05, "minimum disagreement at the smallest buffer for the separation check"},
                  {"se_multiplier", 3.0, "tolerance in standard errors"}},
                 detail::run_finite_speed});
    c.push_back({"correlations", "A11", "correlation functions, Janossy densities and void density",
                 {{"intensities", json{0.5, 1.0, 2.0}, "ideal-gas activities"},
                  {"times", json{0.5, 1.0}, "ideal-gas times"},
                  {"box_side", 0.05, "box side for correlation estimates"},
                  {"replicas", 100000, "samples per setting"},
                  {"janossy_intensity", 0.6, "Poisson intensity for the Janossy check"},
                  {"janossy_box_side", 0.1, "box side for Janossy estimates"},
                  {"long_time", 8.0, "time for the near-stationary void check"},
                  {"se_multiplier", 3.0, "tolerance in standard errors"}},
                 detail::run_correlations});
    c.push_back({"variable-change", "A12", "two constructions of (omega, zeta, chi) agree in law",
                 {{"volume", 1.0, "window volume"},
                  {"times", json{0.5, 1.0}, "times"},
                  {"replicas", 100000, "replicas per construction"},
                  {"level", 0.01, "minimum p-value"}},
                 detail::run_variable_change});
    c.push_back({"moments", "A13", "empirical moments below the moment bound",
                 {{"window_length", 4.0, "window length"},
                  {"range", 1.0, "interaction range"},
                  {"volumes", json{0.5, 1.0, 2.0}, "volumes of the counting box"},
                  {"k_max", 4, "largest moment order"},
                  {"c1", 1.0, "bound constant c1"},
                  {"c2", 1.0, "bound constant c2"},
                  {"c3", 1.0, "bound constant c3"},
                  {"time", 1.0, "evolution time"},
                  {"buffer", 4.0, "buffer in units of R"},
                  {"area_alpha", -1.0, "area coefficient of the evolved interacting law"},
                  {"area_beta", 1.0, "inverse temperature of the evolved interacting law"},
                  {"replicas", 10000, "samples per law"}},
                 detail::run_moments});
    c.push_back({"ergodic", "A14", "spatial averages converge to Palm expectations",
                 {{"dims", json{1, 2}, "dimensions"},
                  {"intensity", 1.0, "Poisson intensity"},
                  {"range", 1.0, "neighbour radius"},
                  {"sides_1d", json{10.0, 20.0, 40.0, 80.0, 160.0}, "window sides in d = 1"},
                  {"sides_2d", json{4.0, 8.0, 16.0}, "window sides in d = 2"},
                  {"replicas", 2000, "replicas"},
                  {"slope_tolerance", 0.15, "tolerance on the log-log variance slope"},
                  {"se_multiplier", 3.0, "tolerance in standard errors"}},
                 detail::run_ergodic});
    c.push_back({"boundary-fisher", "", "Fisher information with free and collar-averaged boundary",
                 {{"cell_width", 0.5, "cell width"},
                  {"range", 1.0, "interaction range"},
                  {"alpha", 1.0, "area coefficient"},
                  {"beta", 1.0, "inverse temperature"},
                  {"p", 0.3, "occupation probability of the product initial law"},
                  {"collar", 2, "collar cells per side"},
                  {"interiors", json{4, 6, 8, 10}, "interior sizes"}},
                 detail::run_boundary_fisher});
    return c;
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) {
        // Integer defaults only accept integers; float defaults accept both.
        return a.is_number_float() || !b.is_number_float();
    }
    if (a.is_array() && b.is_array()) {
        if (a.empty() || b.empty()) return true;
        for (const auto& e : b)
            if (!same_kind(a.front(), e)) return false;
        return true;
    }
    return a.type() == b.type();
}

}  // namespace

const std::vector<Experiment>& experiment_catalogue() {
    static const std::vector<Experiment> cat = build_catalogue();
    return cat;
}

const Experiment* find_experiment(const std::string& name) {
    for (const auto& e : experiment_catalogue())
        if (e.name == name) return &e;
    return nullptr;
}

json resolve_params(const Experiment& exp, const json& given) {
    json out = json::object();
    for (const auto& p : exp.params) out[p.key] = p.default_value;
    if (given.is_null()) return out;
    if (!given.is_object()) throw ConfigError("params must be a table");
    for (const auto& [key, value] : given.items()) {
        if (!out.contains(key)) throw ConfigError("unknown parameter '" + key + "' for experiment " + exp.name);
        if (!same_kind(out[key], value))
            throw ConfigError("parameter '" + key + "' expects " + out[key].dump() + "-like value, got " + value.dump());
        out[key] = value;
    }
    return out;
}

}  // namespace gibbsflow
