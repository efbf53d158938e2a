#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "halfcell/runner.hpp"

namespace py = pybind11;
using namespace halfcell;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(json_to_py(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

py::dict run(const std::string& cmd, const std::string& config_text,
             const std::string& out_dir,
             const std::vector<std::string>& overrides) {
  RunConfig cfg = RunConfig::parse_text(config_text);
  for (const std::string& o : overrides) cfg.apply_override(o);
  RunResult r = run_subcommand(cmd, cfg, out_dir);
  py::dict out;
  out["exit_code"] = r.exit_code;
  out["summary"] = r.summary;
  out["result"] = json_to_py(r.result);
  return out;
}

py::dict run_file(const std::string& cmd, const std::string& config_path,
                  const std::string& out_dir,
                  const std::vector<std::string>& overrides) {
  RunConfig cfg = RunConfig::parse_file(config_path);
  for (const std::string& o : overrides) cfg.apply_override(o);
  RunResult r = run_subcommand(cmd, cfg, out_dir);
  py::dict out;
  out["exit_code"] = r.exit_code;
  out["summary"] = r.summary;
  out["result"] = json_to_py(r.result);
  return out;
}

double eval_expr(const std::string& text, const py::dict& vars) {
  Expr e = Expr::parse(text);
  Bindings b;
  for (auto item : vars)
    b[item.first.cast<std::string>()] = item.second.cast<double>();
  return e.eval(b);
}

}  // namespace

PYBIND11_MODULE(_halfcell, m) {
  m.doc() = "half-space homogenization solvers";

  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("run", &run, py::arg("subcommand"), py::arg("config_text"),
        py::arg("out_dir") = "out",
        py::arg("overrides") = std::vector<std::string>{},
        "Run a solver subcommand on an INI config string; returns "
        "{exit_code, summary, result}.");
  m.def("run_file", &run_file, py::arg("subcommand"), py::arg("config_path"),
        py::arg("out_dir") = "out",
        py::arg("overrides") = std::vector<std::string>{},
        "Run a solver subcommand on an INI config file.");
  m.def("eval_expr", &eval_expr, py::arg("text"), py::arg("vars") = py::dict(),
        "Evaluate a coefficient expression with variable bindings.");
}
