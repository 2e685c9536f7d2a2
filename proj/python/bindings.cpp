#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "asynet/algebra.hpp"
#include "asynet/checks.hpp"
#include "asynet/models.hpp"
#include "asynet/scenario.hpp"

namespace py = pybind11;
using namespace asynet;

namespace {

py::array_t<double> matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    py::array_t<double> out({rows.size(), cols});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    return out;
}

py::dict state_dict(const NetworkState& s) {
    py::dict d;
    d["t"] = s.t;
    d["x"] = s.x;
    d["tau"] = s.tau;
    return d;
}

// Trajectory as plain Python data: arrays for samples, dicts for events.
py::dict trajectory_dict(const Network& net, const Trajectory& tr) {
    std::vector<double> t;
    std::vector<std::vector<double>> x, tau;
    std::vector<std::string> alpha;
    for (const auto& s : tr.samples) {
        t.push_back(s.t);
        x.push_back(s.x);
        tau.push_back(s.tau);
        alpha.push_back(s.alpha >= 0 ? net.structure_name(s.alpha) : "");
    }
    py::list events;
    for (const auto& e : tr.events) {
        py::dict d;
        d["t"] = e.t;
        d["from"] = e.from >= 0 ? py::object(py::str(net.structure_name(e.from))) : py::object(py::none());
        d["to"] = e.to >= 0 ? py::object(py::str(net.structure_name(e.to))) : py::object(py::none());
        d["cause"] = to_string(e.cause);
        d["state"] = state_dict(e.state);
        events.append(d);
    }
    py::dict out;
    out["t"] = py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
    out["x"] = matrix(x, static_cast<std::size_t>(net.dim()));
    out["tau"] = matrix(tau, static_cast<std::size_t>(net.clock_count()));
    out["alpha"] = alpha;
    out["labels"] = net.coordinate_labels();
    out["events"] = events;
    out["status"] = to_string(tr.status);
    out["error"] = to_string(tr.error);
    out["message"] = tr.message;
    out["final_state"] = state_dict(tr.final_state);
    return out;
}

Scenario scenario_for(const std::string& model, const std::map<std::string, double>& params) {
    Scenario s = parse_scenario("{\"preset\": " + nlohmann::json(model).dump() + "}", model);
    if (!params.empty()) {
        auto j = scenario_to_json(s);
        for (const auto& [k, v] : params) j["params"][k] = v;
        s = parse_scenario(j.dump(), model);
    }
    return s;
}

py::dict run(const Scenario& sc, std::optional<std::uint64_t> seed, std::optional<double> t_max) {
    Scenario s = sc;
    if (t_max) {
        s.config.t_max = *t_max;
        s.config.validate();
    }
    Network net = build_network(s);
    Trajectory tr;
    {
        py::gil_scoped_release nogil;
        tr = run_scenario(s, net, seed);
    }
    return trajectory_dict(net, tr);
}

py::dict verdict_dict(const DecompVerdict& v) {
    py::dict d;
    d["pass"] = v.pass;
    d["samples"] = v.samples;
    d["message"] = v.message;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "asynchronous network simulation and structural checks";

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("description", &Scenario::description)
        .def_readonly("preset", &Scenario::preset)
        .def_readonly("params", &Scenario::params)
        .def_property_readonly("t_max", [](const Scenario& s) { return s.config.t_max; })
        .def_property_readonly("h", [](const Scenario& s) { return s.config.h; })
        .def("to_json", &print_scenario)
        .def("run", &run, py::arg("seed") = py::none(), py::arg("t_max") = py::none());

    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<scenario>");
    m.def("load_scenario", &load_scenario, py::arg("path"));

    m.def("list_models", [] {
        py::list out;
        for (const auto& p : presets()) {
            py::dict d;
            d["name"] = p.name;
            d["description"] = p.description;
            d["params"] = p.defaults;
            out.append(d);
        }
        return out;
    });

    m.def(
        "run_model",
        [](const std::string& name, const std::map<std::string, double>& params, std::optional<std::uint64_t> seed, std::optional<double> t_max) {
            return run(scenario_for(name, params), seed, t_max);
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("seed") = py::none(), py::arg("t_max") = py::none());

    m.def(
        "check",
        [](const std::string& name, const std::map<std::string, double>& params, int samples, std::uint64_t seed) {
            Network net = build_network(scenario_for(name, params));
            py::dict out;
            out["problems"] = validate_network(net);
            py::dict adm;
            for (int a = 0; a < net.structure_count(); ++a) {
                if (!net.has_field(a)) continue;
                auto rep = check_admissibility(net, a, samples, seed + static_cast<std::uint64_t>(a));
                std::vector<std::string> msgs;
                for (const auto& v : rep.violations) msgs.push_back(v.message);
                adm[py::str(rep.structure)] = msgs;
            }
            out["admissibility"] = adm;
            out["regular"] = check_constraint_regularity(net, samples, 1e-6, seed).ok();
            return out;
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("samples") = 10000, py::arg("seed") = 1);

    m.def(
        "decompose",
        [](const std::string& name, const std::map<std::string, double>& params, int samples, std::uint64_t seed) {
            Network net = build_network(scenario_for(name, params));
            Factorization f = factorize(net, samples, seed);
            py::dict out;
            out["decomposed"] = f.decomposed;
            out["partition"] = f.partition;
            py::list st, dy, names;
            for (const auto& v : f.structural) st.append(verdict_dict(v));
            for (const auto& v : f.dynamical) dy.append(verdict_dict(v));
            for (const auto& fac : f.factors) names.append(fac.spec().name);
            out["structural"] = st;
            out["dynamical"] = dy;
            out["factors"] = names;
            out["reason"] = f.reason;
            return out;
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("samples") = 10000, py::arg("seed") = 1);

    m.def(
        "compare_filippov",
        [](double a, double b, double x1, double x2, double t_end, int points) {
            TrainsParams p;
            p.a = a;
            p.b = b;
            p.S = 0;
            auto c = compare_filippov(p, {x1, x2}, t_end, points);
            py::dict d;
            d["sup_deviation"] = c.sup_deviation;
            d["worst_t"] = c.worst_t;
            d["pass"] = c.pass;
            return d;
        },
        py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("x1") = -0.5, py::arg("x2") = 0.5, py::arg("t_end") = 3.0, py::arg("points") = 301);
}
