// Python module: grid operators on numpy arrays, diagnostics, and scenario runs.
// A 1D field is an array of shape (n,), a 2D field has shape (n, n) indexed [y, x].

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "locsense/batch.hpp"
#include "locsense/config.hpp"
#include "locsense/diagnostics.hpp"
#include "locsense/mesh.hpp"
#include "locsense/models.hpp"

namespace py = pybind11;
using namespace locsense;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const Array& a) {
  int dim = static_cast<int>(a.ndim());
  if (dim != 1 && dim != 2) throw std::invalid_argument("field must be a 1D or 2D array");
  const int n = static_cast<int>(a.shape(0));
  if (dim == 2 && a.shape(1) != n) throw std::invalid_argument("2D field must be square");
  if (n < 2) throw std::invalid_argument("field needs at least 2 cells per axis");
  const Grid g(dim, n);
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Field& f) {
  const auto n = static_cast<py::ssize_t>(f.grid.n());
  Array out = f.grid.dim() == 1 ? Array({n}) : Array({n, n});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::dict result_dict(const ScenarioResult& r) {
  py::dict d;
  d["name"] = r.name;
  d["group"] = r.group;
  d["model"] = std::string(to_string(r.model));
  d["status"] = std::string(to_string(r.run.status));
  d["blowup_time"] = r.run.blowup_time;
  d["steps"] = r.run.steps;
  d["rejected"] = r.run.rejected;
  d["message"] = r.run.message;

  py::dict cols;
  const auto& names = csv_columns();
  for (std::size_t c = 0; c < names.size(); ++c) {
    Array col(std::vector<py::ssize_t>{static_cast<py::ssize_t>(r.run.trajectory.size())});
    auto view = col.mutable_unchecked<1>();
    for (std::size_t k = 0; k < r.run.trajectory.size(); ++k)
      view(static_cast<py::ssize_t>(k)) = csv_value(r.run.trajectory[k], c);
    cols[py::str(names[c])] = col;
  }
  d["columns"] = cols;
  d["u_final"] = to_array(r.run.final_state.u);
  d["v_final"] = to_array(r.run.final_state.v);

  py::list checks;
  for (const auto& a : r.assertions) checks.append(py::make_tuple(a.name, a.pass, a.detail));
  d["assertions"] = checks;
  d["ok"] = r.ok();
  return d;
}

py::dict batch_dict(const BatchReport& rep) {
  py::dict d;
  py::list scenarios;
  for (const auto& s : rep.scenarios) scenarios.append(result_dict(s));
  d["scenarios"] = scenarios;
  py::list groups;
  for (const auto& g : rep.groups) {
    py::dict gd;
    gd["name"] = g.name;
    gd["kind"] = std::string(to_string(g.kind));
    py::list checks;
    for (const auto& a : g.assertions) checks.append(py::make_tuple(a.name, a.pass, a.detail));
    gd["assertions"] = checks;
    gd["ok"] = g.ok();
    groups.append(gd);
  }
  d["groups"] = groups;
  d["ok"] = rep.ok();
  d["out_dir"] = rep.out_dir.string();
  return d;
}

py::dict run_text(const std::string& text, const std::string& out_dir, bool strict, int parallel) {
  const Batch b = parse_config(text, strict);
  BatchOptions o;
  o.out_dir = out_dir;
  o.force_out = true;
  o.parallel = parallel;
  BatchReport rep;
  {
    py::gil_scoped_release nogil;
    rep = run_batch(b, o);
  }
  return batch_dict(rep);
}

}  // namespace

PYBIND11_MODULE(_locsense, m) {
  m.doc() = "Local-sensing chemotaxis solver";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("laplacian", [](const Array& f) { return to_array(laplacian_neumann(to_field(f))); }, py::arg("f"),
        "Discrete Neumann Laplacian.");
  m.def("apply_K", [](const Array& f) { return to_array(apply_K(to_field(f))); }, py::arg("f"),
        "Zero-mean inverse of -Laplacian applied to f - mean(f).");
  m.def("apply_lambda_nu", [](const Array& f, double nu) { return to_array(apply_lambda_nu(to_field(f), nu)); },
        py::arg("f"), py::arg("nu"), "(I - nu Laplacian)^-1 f.");
  m.def("apply_L_nu", [](const Array& f, double nu) { return to_array(apply_L_nu(to_field(f), nu)); }, py::arg("f"),
        py::arg("nu"), "Mollifier: (I - nu Laplacian)^-d f.");

  m.def("entropy", [](const Array& u, const Array& v, double eps, double beta) {
    return entropy(to_field(u), to_field(v), eps, beta);
  }, py::arg("u"), py::arg("v"), py::arg("epsilon"), py::arg("beta"));
  m.def("entropy_nu", [](const Array& u, const Array& v, double eps, double beta, double nu) {
    return entropy_nu(to_field(u), to_field(v), eps, beta, nu);
  }, py::arg("u"), py::arg("v"), py::arg("epsilon"), py::arg("beta"), py::arg("nu"));
  m.def("dual_norm_sq", [](const Array& u, double mass) { return dual_norm_sq(to_field(u), mass); }, py::arg("u"),
        py::arg("mass"), "<u - m, K(u - m)>.");

  m.def("critical_mass", &critical_mass, py::arg("epsilon"));
  m.def("jump_rate", &jump_rate, py::arg("theta"), py::arg("h"), py::arg("vi"), py::arg("vj"));
  m.def("motility", &motility, py::arg("v"));

  m.def("preset_names", &preset_names);
  m.def("preset_text", [](const std::string& name) { return preset_text(name); }, py::arg("name"));
  m.def("run_config", &run_text, py::arg("text"), py::arg("out_dir"), py::arg("strict") = true,
        py::arg("parallel") = 1, "Runs every scenario of an INI config; returns a dict of results.");
  m.def("run_preset", [](const std::string& name, const std::string& out_dir, int parallel) {
    return run_text(preset_text(name), out_dir, true, parallel);
  }, py::arg("name"), py::arg("out_dir"), py::arg("parallel") = 1);
}
