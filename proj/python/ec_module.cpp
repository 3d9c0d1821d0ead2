// Python bindings. Structured values cross the boundary as JSON so the
// Python side sees plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ec/direct_solve.hpp"
#include "ec/dsl.hpp"
#include "ec/lower.hpp"
#include "ec/metrics.hpp"
#include "ec/pipeline.hpp"
#include "ec/problems.hpp"
#include "ec/scripted_adapter.hpp"

namespace py = pybind11;

namespace {

py::object to_py(const nlohmann::ordered_json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ec::problems::ProblemKind kind_of(const std::string& s) {
  auto k = ec::problems::parse_kind(s);
  if (!k) throw ec::Error("UnknownKind", "unknown problem kind '" + s + "'");
  return *k;
}

ec::pipeline::PipelineConfig pipeline_config(std::size_t samples, std::size_t max_debug, long timeout_ms) {
  ec::pipeline::PipelineConfig cfg;
  cfg.samples = samples;
  cfg.max_debug = max_debug;
  cfg.adapter_timeout = std::chrono::milliseconds(timeout_ms);
  cfg.check();
  return cfg;
}

/// A scripted conversation held on the Python side.
class Conversation {
 public:
  Conversation(const py::object& script, std::size_t samples, std::size_t max_debug)
      : adapter_(from_py(script)), cfg_(pipeline_config(samples, max_debug, 0)),
        session_(ec::pipeline::new_session("py")) {}

  std::string send(const std::string& text) { return ec::pipeline::respond(session_, text, adapter_, cfg_); }
  std::string phase() const { return ec::pipeline::to_string(session_.phase); }
  py::object session(bool canonical) const { return to_py(ec::pipeline::to_json(session_, canonical)); }

 private:
  ec::pipeline::ScriptedAdapter adapter_;
  ec::pipeline::PipelineConfig cfg_;
  ec::pipeline::Session session_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy concierge engine";

  static py::exception<ec::Error> ec_error(m, "EcError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ec::dsl::DslError& e) {
      py::tuple args = py::make_tuple(e.code(), e.what(), ec::dsl::to_string(e.category()), e.span().line,
                                      e.span().column);
      PyErr_SetObject(ec_error.ptr(), args.ptr());
    } catch (const ec::Error& e) {
      py::tuple args = py::make_tuple(e.code(), e.what());
      PyErr_SetObject(ec_error.ptr(), args.ptr());
    }
  });

  m.def("schemas", [] { return to_py(ec::problems::all_schemas_json()); }, "Parameter schemas of every kind");
  m.def(
      "solve",
      [](const std::string& kind, const py::object& params) {
        return to_py(ec::pipeline::direct_solve_json(ec::problems::params_from_json(kind_of(kind), from_py(params))));
      },
      py::arg("kind"), py::arg("params"), "Build and solve an instance from complete parameters");
  m.def(
      "oracle",
      [](const std::string& kind, const py::object& params) {
        return to_py(
            ec::lp::to_json(ec::problems::oracle(ec::problems::params_from_json(kind_of(kind), from_py(params)))));
      },
      py::arg("kind"), py::arg("params"), "Optimum computed without the LP solver");
  m.def(
      "reference_params",
      [](const std::string& kind) { return to_py(ec::problems::to_json(ec::problems::reference_params(kind_of(kind)))); },
      py::arg("kind"));
  m.def(
      "golden_document",
      [](const std::string& kind, const py::object& params) {
        return ec::problems::golden_document(ec::problems::params_from_json(kind_of(kind), from_py(params)));
      },
      py::arg("kind"), py::arg("params"));
  m.def(
      "format_document",
      [](const std::string& text) { return ec::dsl::print(ec::dsl::parse(text)); }, py::arg("text"),
      "Canonical form of an ecdsl document");
  m.def(
      "compile",
      [](const std::string& text) { return to_py(ec::ir::to_json(ec::dsl::compile_text(text))); }, py::arg("text"),
      "Compile an ecdsl document (fenced or plain) to instance JSON");
  m.def(
      "solve_document",
      [](const std::string& text) { return to_py(ec::lp::to_json(ec::ir::solve(ec::dsl::compile_text(text)))); },
      py::arg("text"));

  m.def("optimality_gap", &ec::metrics::optimality_gap, py::arg("v"), py::arg("v_star"));
  m.def("improvement_over_baseline", &ec::metrics::improvement_over_baseline, py::arg("v_b"), py::arg("v"));
  m.def("expected_generations", &ec::metrics::expected_generations, py::arg("p"));
  m.def("estimate_p", &ec::metrics::estimate_p, py::arg("z"));
  m.def("estimate_q", &ec::metrics::estimate_q, py::arg("y"));
  m.def("battery_sizing_closed_form", &ec::problems::battery_sizing_closed_form, py::arg("unit_cost"),
        py::arg("rate"), py::arg("years"), py::arg("demand"), py::arg("solar"), py::arg("efficiency"));

  m.def(
      "run_benchmark",
      [](const std::string& script, std::vector<std::string> kinds, std::size_t n, std::uint64_t seed,
         std::size_t samples, std::size_t max_debug) {
        ec::metrics::BenchmarkConfig cfg;
        for (const auto& k : kinds) cfg.kinds.push_back(kind_of(k));
        cfg.n_per_kind = n;
        cfg.script = script;
        cfg.seed = seed;
        cfg.pipeline = pipeline_config(samples, max_debug, 0);
        ec::metrics::BenchmarkResult r;
        {
          py::gil_scoped_release release;
          r = ec::metrics::run_benchmark(cfg);
        }
        nlohmann::ordered_json records = nlohmann::ordered_json::array();
        for (const auto& rec : r.records) records.push_back(ec::metrics::to_json(rec));
        return py::make_tuple(ec::metrics::summary_csv(r.summary), to_py(records),
                              to_py(ec::metrics::estimates_json(r)));
      },
      py::arg("script"), py::arg("kinds") = std::vector<std::string>{}, py::arg("n") = 20, py::arg("seed") = 1,
      py::arg("samples") = 5, py::arg("max_debug") = 5);

  py::class_<Conversation>(m, "Conversation")
      .def(py::init<const py::object&, std::size_t, std::size_t>(), py::arg("script"), py::arg("samples") = 5,
           py::arg("max_debug") = 5)
      .def("send", &Conversation::send, py::arg("text"))
      .def_property_readonly("phase", &Conversation::phase)
      .def("session", &Conversation::session, py::arg("canonical") = false);
}
