// SPDX-License-Identifier: Apache-2.0
// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the pure-Python wrapper, so both sides share one serializer.

#include "htkit/assess/assess.hpp"
#include "htkit/errors.hpp"
#include "htkit/forge/sanitize.hpp"
#include "htkit/forge/trojan.hpp"
#include "htkit/llm/bridge.hpp"
#include "htkit/ops/signal_ops.hpp"
#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string top_or_last(const htkit::rtl::RtlDesign& d, const std::string& top) {
  if (!top.empty()) return top;
  if (d.modules.empty()) throw htkit::Error(htkit::ErrorCode::UnknownTop, "design has no modules");
  return d.modules.back().name;
}

std::string lint_json(const std::string& source) {
  auto d = htkit::rtl::parse_verilog(source);
  json out = json::array();
  for (const auto& m : d.modules) {
    for (const auto& f : htkit::rtl::lint(m)) {
      out.push_back({{"module", m.name},
                     {"rule", htkit::rtl::to_string(f.rule)},
                     {"net", f.net},
                     {"line", f.location.line},
                     {"message", f.message}});
    }
  }
  return out.dump();
}

py::tuple insert(const std::string& source, const std::string& top, const std::string& trigger,
                 const std::string& effect, const std::string& target, const std::string& prefix) {
  auto d = htkit::rtl::parse_verilog(source);
  htkit::forge::InsertOptions o;
  o.prefix = prefix;
  auto ins = htkit::forge::insert_trojan(d, top_or_last(d, top), htkit::forge::parse_trigger(trigger),
                                         htkit::forge::parse_effect(effect, target), o);
  return py::make_tuple(htkit::rtl::emit_verilog(ins.design), htkit::forge::manifest_to_json(ins.manifest).dump());
}

std::string assess(const std::string& source, const std::string& top, int metrics_cycles, std::uint64_t seed) {
  auto d = htkit::rtl::parse_verilog(source, "design.v");
  auto elab = htkit::rtl::elaborate(d, top_or_last(d, top));
  auto report = htkit::assess::assess(elab, "design.v");
  if (metrics_cycles > 0) report.metrics = htkit::assess::rare_net_metrics(elab, seed, metrics_cycles);
  return htkit::assess::report_to_json(report);
}

std::string simulate(const std::string& source, const std::string& top, const std::string& stimulus, int cycles,
                     const std::vector<std::string>& record) {
  auto d = htkit::rtl::parse_verilog(source);
  auto stim = htkit::sim::parse_stimulus(stimulus);
  htkit::sim::SimOptions o;
  o.record = record;
  auto trace = htkit::sim::simulate(htkit::rtl::elaborate(d, top_or_last(d, top)), stim,
                                    cycles > 0 ? cycles : stim.cycles, o);
  return htkit::sim::trace_to_json(trace);
}

std::vector<int> activations(const std::string& source, const std::string& top, const std::string& stimulus,
                             int cycles, const std::string& net) {
  auto d = htkit::rtl::parse_verilog(source);
  auto stim = htkit::sim::parse_stimulus(stimulus);
  auto trace = htkit::sim::simulate(htkit::rtl::elaborate(d, top_or_last(d, top)), stim,
                                    cycles > 0 ? cycles : stim.cycles, {{net}});
  return htkit::sim::activation_cycles(trace, net);
}

std::string compare(const std::string& golden, const std::string& suspect, const std::string& top,
                    const std::string& stimulus, int cycles) {
  auto g = htkit::rtl::parse_verilog(golden);
  auto s = htkit::rtl::parse_verilog(suspect);
  auto t = top_or_last(g, top);
  auto ge = htkit::rtl::elaborate(g, t);
  auto se = htkit::rtl::elaborate(s, t);
  auto stim = htkit::sim::parse_stimulus(stimulus);
  int n = cycles > 0 ? cycles : stim.cycles;
  auto r = htkit::sim::compare_traces(htkit::sim::simulate(ge, stim, n), htkit::sim::simulate(se, stim, n),
                                      ge.outputs);
  return htkit::sim::divergence_to_json(r);
}

py::tuple sanitize(const std::string& source) {
  auto d = htkit::rtl::parse_verilog(source);
  json fixes = json::array();
  json unresolved = json::array();
  for (auto& m : d.modules) {
    auto r = htkit::forge::sanitize_fsm_partial(m);
    for (const auto& f : r.fixes) {
      fixes.push_back({{"module", m.name}, {"line", f.line}, {"net", f.net}, {"kind", f.kind}, {"hold", f.hold}});
    }
    for (const auto& n : r.unresolved) unresolved.push_back({{"module", m.name}, {"net", n}});
    m = std::move(r.module);
  }
  std::string text = fixes.empty() ? source : htkit::rtl::emit_verilog(d);
  return py::make_tuple(text, fixes.dump(), unresolved.dump());
}

py::tuple apply_edits(const std::string& source, const std::string& edits) {
  auto run = htkit::ops::apply_edits(htkit::rtl::parse_verilog(source),
                                     htkit::ops::edits_from_json(json::parse(edits)));
  return py::make_tuple(htkit::rtl::emit_verilog(run.design), htkit::ops::edits_to_json(run.log).dump());
}

std::string generation_prompt(const std::string& trigger, const std::string& effect, const std::string& target,
                              const std::string& spec_text, const std::string& alert) {
  auto b = htkit::llm::build_generation_prompt(spec_text, htkit::forge::parse_trigger(trigger),
                                               htkit::forge::parse_effect(effect, target), alert);
  return json{{"purpose", htkit::llm::to_string(b.purpose)}, {"system", b.system_text}, {"user", b.user_text}}.dump();
}

std::string generate_mock(const std::string& trigger, const std::string& effect, const std::string& target) {
  htkit::llm::MockBackend mock;
  auto b = htkit::llm::build_generation_prompt("", htkit::forge::parse_trigger(trigger),
                                               htkit::forge::parse_effect(effect, target));
  return htkit::llm::invoke(htkit::llm::BackendConfig{}, b, mock);
}

std::string validate(const std::string& source, const std::optional<std::string>& trigger, const std::string& alert) {
  std::optional<htkit::forge::TriggerSpec> t;
  if (trigger) t = htkit::forge::parse_trigger(*trigger);
  return htkit::llm::validation_to_json(htkit::llm::validate_generated(source, t, alert)).dump();
}

}  // namespace

PYBIND11_MODULE(_htkit, m) {
  m.doc() = "Native core of the htkit hardware Trojan toolkit";

  // Error(code, message); the type lives for the life of the interpreter.
  static PyObject* error_type = PyErr_NewException("htkit._htkit.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const htkit::Error& e) {
      py::object exc = py::handle(error_type)(htkit::error_code_name(e.code()), e.what());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("format", [](const std::string& s) { return htkit::rtl::emit_verilog(htkit::rtl::parse_verilog(s)); },
        py::arg("source"));
  m.def("lint", &lint_json, py::arg("source"));
  m.def("insert", &insert, py::arg("source"), py::arg("top"), py::arg("trigger"), py::arg("effect"),
        py::arg("target"), py::arg("prefix") = "Tj_");
  m.def("assess", &assess, py::arg("source"), py::arg("top") = "", py::arg("metrics_cycles") = 0,
        py::arg("seed") = 1);
  m.def("simulate", &simulate, py::arg("source"), py::arg("top"), py::arg("stimulus"), py::arg("cycles") = 0,
        py::arg("record") = std::vector<std::string>{});
  m.def("activations", &activations, py::arg("source"), py::arg("top"), py::arg("stimulus"), py::arg("cycles"),
        py::arg("net"));
  m.def("compare", &compare, py::arg("golden"), py::arg("suspect"), py::arg("top"), py::arg("stimulus"),
        py::arg("cycles") = 0);
  m.def("sanitize", &sanitize, py::arg("source"));
  m.def("apply_edits", &apply_edits, py::arg("source"), py::arg("edits"));
  m.def("generation_prompt", &generation_prompt, py::arg("trigger"), py::arg("effect"), py::arg("target") = "out",
        py::arg("spec_text") = "", py::arg("alert") = "Tj_Trig");
  m.def("generate_mock", &generate_mock, py::arg("trigger"), py::arg("effect"), py::arg("target") = "out");
  m.def("extract_verilog", &htkit::llm::extract_verilog, py::arg("completion"));
  m.def("validate_generated", &validate, py::arg("source"), py::arg("trigger") = py::none(),
        py::arg("alert") = "Tj_Trig");
}
