#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pgplan/bench.hpp"
#include "pgplan/expert.hpp"
#include "pgplan/json_io.hpp"
#include "pgplan/search.hpp"
#include "pgplan/validate.hpp"

namespace py = pybind11;
using namespace pgplan;

namespace {

// Structured values cross the boundary as JSON text; the Python side decodes.
std::string plan_json(const std::string& domain_text, const std::string& problem_text, const std::string& strategy,
                      const std::string& oracle, const std::string& prefs, const std::string& params_json) {
  Domain d = parse_domain(domain_text);
  Problem p = parse_problem(problem_text, d);
  json pj = json::parse(params_json);
  SearchParams sp;
  sp.entropy_threshold = pj.value("entropy_threshold", sp.entropy_threshold);
  sp.rollout_depth = pj.value("rollout_depth", sp.rollout_depth);
  sp.temperature = pj.value("temperature", sp.temperature);
  sp.seed = pj.value("seed", sp.seed);
  sp.max_nodes = pj.value("max_nodes", sp.max_nodes);
  sp.max_queries = pj.value("max_queries", sp.max_queries);
  sp.max_depth = pj.value("max_depth", sp.max_depth);
  sp.random_query_prob = pj.value("random_query_prob", sp.random_query_prob);
  if (pj.contains("time_limit_s")) {
    sp.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(pj["time_limit_s"].get<double>() * 1000));
  }
  sp.validate();
  Strategy s = parse_strategy(strategy);
  PreferenceStore store = parse_upfront(prefs, d);
  SilentChannel silent;
  UpfrontChannel upfront;
  ScriptedOracle scripted(parse_oracle(oracle, d));
  ExpertChannel* expert = &silent;
  if (s == Strategy::upfront) expert = &upfront;
  if ((s == Strategy::active || s == Strategy::random) && !oracle.empty()) expert = &scripted;

  SearchResult r;
  {
    py::gil_scoped_release release;
    r = pg_search(d, p, *expert, store, sp, s);
  }
  json out = to_json(r);
  out["valid"] = !r.solved() || validate_plan(d, p, r.plan).ok;
  out["elicited"] = format_elicited(store);
  return out.dump();
}

std::string suite_json(const std::string& config_path, bool with_timing) {
  SuiteConfig c = load_suite_config(config_path);
  SuiteReport r;
  {
    py::gil_scoped_release release;
    r = run_suite(c);
  }
  return to_json(r, with_timing).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Preference-guided HTN planner";

  static py::exception<Error> error(m, "PlannerError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("boltzmann", [](const std::vector<double>& s, double t) { return boltzmann(s, t); }, py::arg("scores"),
        py::arg("temperature") = 1.0);
  m.def("entropy", [](const std::vector<double>& p) { return entropy(p); });
  m.def("kl_divergence", [](const std::vector<double>& p, const std::vector<double>& q) { return kl_divergence(p, q); });
  m.def("score_method", &score_method, py::arg("rollout_cost"), py::arg("goal_distance"), py::arg("adherence"));
  m.def("check_domain", [](const std::string& text) { return parse_domain(text).name; });
  m.def("plan_json", &plan_json, py::arg("domain"), py::arg("problem"), py::arg("strategy"), py::arg("oracle"),
        py::arg("prefs"), py::arg("params"));
  m.def("suite_json", &suite_json, py::arg("config_path"), py::arg("with_timing") = true);
}
