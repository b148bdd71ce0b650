#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gibbsflow/dynamics.hpp"
#include "gibbsflow/equilibrium.hpp"
#include "gibbsflow/experiments.hpp"
#include "gibbsflow/lattice.hpp"

namespace py = pybind11;
using namespace gibbsflow;

namespace {

using Coords = std::vector<double>;

Point to_point(const Coords& c) {
    if (c.empty() || c.size() > 2) throw std::invalid_argument("points have 1 or 2 coordinates");
    return c.size() == 1 ? Point(c[0]) : Point(c[0], c[1]);
}

std::vector<Point> to_points(const std::vector<Coords>& cs) {
    std::vector<Point> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(to_point(c));
    return out;
}

std::vector<Coords> from_points(std::span<const Point> pts, int dim) {
    std::vector<Coords> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(dim == 1 ? Coords{p[0]} : Coords{p[0], p[1]});
    return out;
}

std::vector<Coords> sorted_coords(const Configuration& c) {
    const auto pts = c.sorted_points();
    return from_points(pts, c.dim());
}

SeedSpec seed_of(std::uint64_t root, std::uint64_t replica, const std::string& tag) { return {root, replica, tag}; }

py::dict run_experiment(const std::string& name, const std::string& params_json, std::uint64_t seed,
                        unsigned threads) {
    const Experiment* exp = find_experiment(name);
    if (!exp) throw ConfigError("unknown experiment '" + name + "'");
    const auto params = resolve_params(*exp, nlohmann::json::parse(params_json));
    ExperimentOutput out;
    {
        py::gil_scoped_release release;
        out = exp->run(params, RunContext{seed, threads});
    }
    py::dict d;
    d["criterion"] = exp->criterion;
    d["params"] = params.dump();
    d["results"] = out.results.to_csv();
    py::list verdicts;
    for (const auto& v : out.verdicts) verdicts.append(py::make_tuple(v.property, v.pass, v.detail));
    d["verdicts"] = verdicts;
    py::dict curves;
    for (const auto& t : out.curves) curves[py::str(t.name)] = t.to_csv();
    d["curves"] = curves;
    d["passed"] = out.all_pass();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Window>(m, "Window")
        .def_static("interval", &Window::interval)
        .def_static("rectangle", &Window::rectangle)
        .def_static("cube", &Window::cube)
        .def_property_readonly("dim", &Window::dim)
        .def_property_readonly("volume", &Window::volume)
        .def("contains", [](const Window& w, const Coords& c) { return w.contains(to_point(c)); })
        .def("dilate", [](const Window& w, double r) { return dilate(w, r); })
        .def("__repr__", [](const Window& w) {
            std::string s = "Window(";
            for (int a = 0; a < w.dim(); ++a) s += (a ? ", [" : "[") + fmt(w.lo()[a]) + ", " + fmt(w.hi()[a]) + ")";
            return s + ")";
        });

    py::class_<InteractionSpec>(m, "InteractionSpec")
        .def_static("ideal", &InteractionSpec::ideal, py::arg("dim"), py::arg("z"), py::arg("range") = 1.0)
        .def_static("area", &InteractionSpec::area, py::arg("dim"), py::arg("alpha"), py::arg("beta"),
                    py::arg("range"))
        .def_static(
            "pair_step",
            [](int dim, double value, double beta, double range, int max_neighbors) {
                return InteractionSpec::pair(dim, PairPotential::step(value, range), beta, range, max_neighbors);
            },
            py::arg("dim"), py::arg("value"), py::arg("beta"), py::arg("range"), py::arg("max_neighbors"))
        .def_readonly("dim", &InteractionSpec::dim)
        .def_readonly("range", &InteractionSpec::range)
        .def_readonly("beta", &InteractionSpec::beta)
        .def("__repr__", &InteractionSpec::describe);

    m.def("birth_rate", [](const InteractionSpec& s, const Coords& x, const std::vector<Coords>& eta) {
        const auto pts = to_points(eta);
        return birth_rate(s, to_point(x), std::span<const Point>(pts));
    });
    m.def("rate_bounds", [](const InteractionSpec& s) {
        const auto b = rate_bounds(s);
        return py::make_tuple(b.inf, b.sup);
    });
    m.def("philox4x32", &philox4x32);

    m.def(
        "sample_poisson",
        [](double z, const Window& w, std::uint64_t seed, std::uint64_t replica, const std::string& tag) {
            return sorted_coords(sample_poisson(z, w, seed_of(seed, replica, tag)));
        },
        py::arg("z"), py::arg("window"), py::arg("seed"), py::arg("replica") = 0, py::arg("tag") = "poisson");

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("horizon", &Trajectory::horizon)
        .def_property_readonly("proposals", &Trajectory::proposals)
        .def("births", [](const Trajectory& t) {
            py::list out;
            for (const auto& b : t.births())
                out.append(py::make_tuple(from_points(std::span<const Point>(&b.x, 1), t.window().dim())[0],
                                          b.birth, b.death));
            return out;
        })
        .def("state_at", [](const Trajectory& tr, double t) {
            const auto s = tr.state_at(t);
            py::dict d;
            d["full"] = sorted_coords(s.full);
            d["survivors"] = sorted_coords(s.survivors);
            d["born"] = sorted_coords(s.born);
            return d;
        });

    m.def(
        "simulate",
        [](const InteractionSpec& spec, const Window& observe, double buffer, double horizon,
           const std::vector<Coords>& initial, std::uint64_t seed, std::uint64_t replica) {
            const SimOptions opts = SimOptions::buffered(observe, buffer, horizon);
            const SeedSpec s = seed_of(seed, replica, "noise");
            const auto stream = propose_events(opts.sim_window, horizon, rate_bounds(spec).sup, s);
            return simulate(InitialCondition::exponential(to_points(initial), s.with_tag("lifespans")), spec, opts,
                            stream);
        },
        py::arg("spec"), py::arg("observe"), py::arg("buffer"), py::arg("horizon"), py::arg("initial"),
        py::arg("seed"), py::arg("replica") = 0);

    py::class_<LatticeModel>(m, "LatticeModel")
        .def_static("line", &LatticeModel::line, py::arg("spec"), py::arg("cells"), py::arg("cell_width"),
                    py::arg("origin") = 0.0)
        .def_property_readonly("cells", &LatticeModel::cells)
        .def_property_readonly("states", &LatticeModel::states);

    py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
        .def(py::init<const LatticeModel&>())
        .def("dense", &GeneratorMatrix::dense)
        .def_property_readonly("max_exit_rate", &GeneratorMatrix::max_exit_rate);

    m.def("stationary", &stationary);
    m.def("evolve", [](const StateDist& x, const GeneratorMatrix& q, double t) { return evolve(x, q, t); });
    m.def("rel_entropy", [](const StateDist& mu, const StateDist& nu) { return rel_entropy(mu, nu); });
    m.def("fisher",
          [](const StateDist& mu, const StateDist& nu, const GeneratorMatrix& q) { return fisher(mu, nu, q); });
    m.def("entropy_production", [](const StateDist& mu, const StateDist& nu, const GeneratorMatrix& q) {
        return entropy_production(mu, nu, q);
    });
    m.def("spectral_gap", [](const GeneratorMatrix& q, const StateDist& nu) { return spectral_gap(q, nu); });
    m.def(
        "kappa_bound",
        [](const LatticeModel& model, double beta) {
            const auto k = kappa_bound(model, beta);
            return py::make_tuple(k.epsilon, k.kappa);
        },
        py::arg("model"), py::arg("beta"));
    m.def(
        "de_bruijn_check",
        [](const StateDist& mu0, const LatticeModel& model, double T, int n_grid) {
            const auto c = de_bruijn_check(mu0, model, build_generator(model), T, n_grid);
            py::dict d;
            d["t"] = c.t;
            d["entropy"] = c.entropy;
            d["fisher"] = c.fisher;
            d["max_residual"] = c.max_residual;
            d["regularised"] = c.regularised;
            return d;
        },
        py::arg("mu0"), py::arg("model"), py::arg("horizon"), py::arg("n_grid") = 401);

    m.def("list_experiments", []() {
        py::list out;
        for (const auto& e : experiment_catalogue()) {
            nlohmann::json defaults = nlohmann::json::object();
            for (const auto& p : e.params) defaults[p.key] = p.default_value;
            out.append(py::make_tuple(e.name, e.criterion, e.summary, defaults.dump()));
        }
        return out;
    });
    m.def("run_experiment", &run_experiment, py::arg("name"), py::arg("params_json") = "{}",
          py::arg("seed") = 0x5EED, py::arg("threads") = 1);
    m.def("version", &tool_version);
}
