#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "projtrac/homogeneous.hpp"
#include "projtrac/suite.hpp"

namespace py = pybind11;
using namespace projtrac;

namespace {

std::vector<Rational> rationals(const std::vector<std::string>& xs) {
    std::vector<Rational> out;
    for (const auto& x : xs) out.emplace_back(x);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "projective tractor checks";

    py::register_exception<Error>(m, "ProjtracError", PyExc_RuntimeError);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readwrite("model", &RunConfig::model)
        .def_readwrite("chart", &RunConfig::chart)
        .def_readwrite("n", &RunConfig::n)
        .def_readwrite("mass", &RunConfig::mass)
        .def_readwrite("order", &RunConfig::order)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("anchors", &RunConfig::anchors)
        .def_readwrite("tolerances", &RunConfig::tolerances)
        .def_readwrite("homogeneous", &RunConfig::homogeneous)
        .def_readwrite("global_tolerance", &RunConfig::global_tolerance);

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def(
        "verify",
        [](const RunConfig& cfg) {
            SuiteReport r;
            {
                py::gil_scoped_release release;
                r = run_suite(cfg);
            }
            return to_json(r);
        },
        py::arg("config"), "run the check battery; returns the JSON report");
    m.def(
        "expand",
        [](const RunConfig& cfg, const std::string& quantity, int order, const std::string& anchor) {
            ExpansionTable t = expand_quantity(cfg, quantity, order, anchor);
            py::list rows;
            for (const auto& r : t.rows) rows.append(py::make_tuple(r.component, r.order, r.rho, r.sigma));
            py::dict d;
            d["quantity"] = t.quantity;
            d["anchor"] = t.anchor;
            d["order_kind"] = t.order_kind;
            d["rows"] = rows;
            d["diagnostic"] = t.diagnostic;
            return d;
        },
        py::arg("config"), py::arg("quantity"), py::arg("order"), py::arg("anchor") = "");
    m.def(
        "orbit",
        [](int n, const std::vector<std::string>& point) {
            HomogeneousModel hm = homogeneous_model(n);
            const Orbit o = orbit_classify(hm, rationals(point));
            return py::make_tuple(orbit_name(o), base_orbit_name(base_of(o)));
        },
        py::arg("n"), py::arg("point"), "orbit and base orbit of a point given by rational strings");
}
