#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finsheaf/cli.hpp"

namespace py = pybind11;
using namespace finsheaf;

namespace {

// pybind11 holders must be non-const; the library hands out const pointers.
template <class T>
std::shared_ptr<T> held(std::shared_ptr<const T> p) {
  return std::const_pointer_cast<T>(std::move(p));
}

using SpaceHolder = std::shared_ptr<FinSpace>;
using RingHolder = std::shared_ptr<FinRing>;
using AlgebraHolder = std::shared_ptr<AlgebraSheaf>;

std::vector<std::vector<std::string>> open_names(const FinSpace& s) {
  std::vector<std::vector<std::string>> out;
  for (OpenSet u : s.opens()) {
    std::vector<std::string> names;
    for (Point x : u.points()) names.push_back(s.name(x));
    out.push_back(std::move(names));
  }
  return out;
}

std::optional<std::vector<Element>> ring_isomorphism(const RingHolder& r, const RingHolder& s) {
  auto iso = find_ring_isomorphism(r, s);
  if (!iso) return std::nullopt;
  return iso->assignment();
}

std::size_t count_subspaces(int q, int n, int k) { return enumerate_free_submodules(make_field(q), n, k).size(); }

std::size_t section_count(const AlgebraHolder& a, int k, int n) {
  return enumerate_sections(build_grassmann_presheaf(a, k, n), a->space().whole()).size();
}

py::dict classify_dict(const AlgebraHolder& a, int n, int truncation) {
  const Classification c = classify(a, n, truncation);
  py::dict d;
  d["sections"] = c.sections;
  d["subsheaves"] = c.subsheaves;
  d["bijection"] = c.bijection;
  d["round_trip"] = c.round_trip;
  d["pairs"] = c.pairs;
  return d;
}

std::pair<int, std::optional<std::string>> run_command(const std::string& command, const py::kwargs& kwargs) {
  auto cmd = parse_command(command);
  if (!cmd) throw py::value_error("unknown command " + command);
  RunConfig config;
  config.command = *cmd;
  for (const auto& [key, value] : kwargs) {
    const auto name = key.cast<std::string>();
    if (name == "space") config.space = value.cast<std::string>();
    else if (name == "ring") config.ring = value.cast<std::string>();
    else if (name == "presheaf") config.presheaf = value.cast<std::string>();
    else if (name == "cocycle") config.cocycle = value.cast<std::string>();
    else if (name == "weights") config.weights = value.cast<std::string>();
    else if (name == "map") config.map = value.cast<std::string>();
    else if (name == "algebras") config.algebras = value.cast<std::string>();
    else if (name == "k") config.k = value.cast<int>();
    else if (name == "n") config.n = value.cast<int>();
    else if (name == "N") config.N = value.cast<int>();
    else if (name == "budget") config.budget = value.cast<std::size_t>();
    else throw py::type_error("unexpected option " + name);
  }
  const RunResult r = execute(config);
  std::optional<std::string> report;
  if (r.report) report = r.report->dump(2);
  return {r.exit_code, report};
}

}  // namespace

PYBIND11_MODULE(finsheaf, m) {
  m.doc() = "Sheaves, vector sheaves and Grassmann sheaves on finite T0 spaces";

  static py::exception<Error> error(m, "FinsheafError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<FinSpace, SpaceHolder>(m, "FinSpace")
      .def_static(
          "build",
          [](const std::vector<std::string>& points, const std::map<std::string, std::vector<std::string>>& min_open) {
            return held(FinSpace::build(points, min_open));
          },
          py::arg("points"), py::arg("min_open"))
      .def_property_readonly("size", &FinSpace::size)
      .def_property_readonly("names", &FinSpace::names)
      .def_property_readonly("open_count", &FinSpace::open_count)
      .def("opens", &open_names)
      .def("is_connected", [](const FinSpace& s) { return is_connected(s); });

  m.def("point_space", [](const std::string& name) { return held(point_space(name)); }, py::arg("name") = "p");
  m.def("discrete_space", [](const std::vector<std::string>& names) { return held(discrete_space(names)); });
  m.def("sierpinski_space", [] { return held(sierpinski_space()); });
  m.def("chain_space", [](int length) { return held(chain_space(length)); });
  m.def("pseudo_circle", [] { return held(pseudo_circle()); });

  py::class_<FinRing, RingHolder>(m, "FinRing")
      .def_property_readonly("name", &FinRing::name)
      .def_property_readonly("size", &FinRing::size)
      .def("add", &FinRing::add)
      .def("mul", &FinRing::mul)
      .def("is_unit", &FinRing::is_unit)
      .def("is_field", &FinRing::is_field);

  m.def("make_field", [](int p) { return held(make_field(p)); });
  m.def("make_mod_ring", [](int n) { return held(make_mod_ring(n)); });
  m.def("make_quotient", [](int p, const std::vector<int>& poly) { return held(make_quotient(p, poly)); },
        py::arg("p"), py::arg("poly"));
  m.def("make_product", [](const RingHolder& l, const RingHolder& r) { return held(make_product(l, r)); });
  m.def("find_ring_isomorphism", &ring_isomorphism,
        "Assignment of the lexicographically least unital isomorphism, or None.");
  m.def("count_subspaces", &count_subspaces, py::arg("q"), py::arg("n"), py::arg("k"));

  py::class_<AlgebraSheaf, AlgebraHolder>(m, "AlgebraSheaf")
      .def_static("constant",
                  [](const SpaceHolder& s, const RingHolder& r) { return held(AlgebraSheaf::constant(s, r)); })
      .def("has_field_stalks", &AlgebraSheaf::has_field_stalks);

  m.def("grassmann_section_count", &section_count, py::arg("algebra"), py::arg("k"), py::arg("n"),
        "Global sections of the Grassmann sheaf of rank-k subsheaves of A^n.");
  m.def("classify", &classify_dict, py::arg("algebra"), py::arg("n"), py::arg("truncation"));
  m.def("demo_counterexample", [] { return demo_counterexample().dump(2); });
  m.def("run", &run_command, py::arg("command"),
        "Runs a CLI command; returns (exit_code, report JSON or None).");
}
