// SPDX-License-Identifier: Apache-2.0
#include "htkit/cli/cli.hpp"

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
#include "htkit/sim/vcd.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace htkit::cli {

namespace {

using nlohmann::json;

std::shared_ptr<llm::Backend>& backend_override() {
  static std::shared_ptr<llm::Backend> b;
  return b;
}

// File-system failure; reported as an input error.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad option value discovered after parsing; reported as a usage error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FileError("cannot write '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Globals {
  std::optional<std::uint64_t> seed;
  bool json_out = false;
  bool quiet = false;
};

struct Ctx {
  Globals g;
  std::ostream& out;
  std::ostream& err;

  void say(const std::string& s) const {
    if (!g.quiet && !g.json_out) out << s << "\n";
  }
  void result(const std::string& json_text) const {
    if (g.json_out) out << json_text;
  }
};

rtl::RtlDesign load_design(const std::string& path) { return rtl::parse_verilog(read_file(path), path); }

std::string pick_top(const rtl::RtlDesign& d, const std::string& top) {
  if (!top.empty()) return top;
  if (d.modules.empty()) throw Error(ErrorCode::UnknownTop, "design has no modules");
  return d.modules.back().name;
}

std::shared_ptr<llm::Backend> make_backend(bool mock) {
  if (auto b = backend_override()) return b;
  if (mock) return std::make_shared<llm::MockBackend>();
  return std::make_shared<llm::HttpBackend>();
}

forge::TriggerSpec usage_trigger(const std::string& text) {
  try {
    return forge::parse_trigger(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

forge::PayloadSpec usage_effect(const std::string& text, const std::string& target) {
  try {
    return forge::parse_effect(text, target);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// --- insert ------------------------------------------------------------------

struct InsertArgs {
  std::string design, top, trigger, effect, target, out, manifest, prefix = "Tj_";
  bool allow_dirty = false;
};

int cmd_insert(const Ctx& c, const InsertArgs& a) {
  auto trigger = usage_trigger(a.trigger);
  auto design = load_design(a.design);
  std::string top = pick_top(design, a.top);
  const rtl::RtlModule* host = design.find_module(top);
  std::string target = a.target;
  if (target.empty() && host) {
    for (const auto& p : host->ports) {
      if (p.direction == rtl::Direction::Output) {
        target = p.name;
        break;
      }
    }
  }
  auto payload = usage_effect(a.effect, target);
  forge::InsertOptions opt;
  opt.prefix = a.prefix;
  auto ins = forge::insert_trojan(design, top, trigger, payload, opt);
  std::vector<rtl::LintFinding> findings;
  for (const auto& m : ins.design.modules) {
    auto f = rtl::lint(m);
    findings.insert(findings.end(), f.begin(), f.end());
  }
  if (!findings.empty() && !a.allow_dirty) {
    for (const auto& f : findings) c.err << "lint: " << rtl::to_string(f.rule) << ": " << f.message << "\n";
    c.err << "refusing to write a design with lint findings (use --allow-dirty)\n";
    return kInput;
  }
  std::string rtl_text = rtl::emit_verilog(ins.design);
  std::string man = dump(forge::manifest_to_json(ins.manifest));
  if (!a.out.empty()) write_file(a.out, rtl_text);
  if (!a.manifest.empty()) write_file(a.manifest, man);
  if (a.out.empty() && !c.g.json_out) c.out << rtl_text;
  c.say("inserted " + std::string(forge::to_string(trigger.cls)) + "/" +
        forge::to_string(payload.effect) + " into " + top);
  c.result(man);
  return kOk;
}

// --- assess ------------------------------------------------------------------

struct AssessArgs {
  std::string design, top, out;
  int metrics_cycles = 0;
  bool llm = false;
  bool mock = false;
};

int cmd_assess(const Ctx& c, const AssessArgs& a) {
  std::string source = read_file(a.design);
  auto design = rtl::parse_verilog(source, a.design);
  std::string top = pick_top(design, a.top);
  auto elab = rtl::elaborate(design, top);
  auto report = assess::assess(elab, a.design);
  if (a.metrics_cycles > 0) report.metrics = assess::rare_net_metrics(elab, c.g.seed.value_or(1), a.metrics_cycles);
  json j = json::parse(assess::report_to_json(report));
  if (a.llm) {
    auto backend = make_backend(a.mock);
    auto cfg = llm::BackendConfig::from_env();
    auto res = llm::assess_with_llm(cfg, *backend, source);
    json lf = json::array();
    for (const auto& f : res.findings) {
      lf.push_back({{"category", f.category},
                    {"nets", f.nets},
                    {"line_start", f.line_start},
                    {"line_end", f.line_end},
                    {"rationale", f.rationale}});
    }
    j["llm"] = {{"findings", lf}, {"failed", res.failed}, {"config", llm::config_to_json(cfg)}};
  }
  std::string text = dump(j);
  if (!a.out.empty()) write_file(a.out, text);
  auto f = report.flags();
  auto mark = [](bool b) { return b ? "yes" : "no"; };
  c.say(std::string("io=") + mark(f.io) + " fsm=" + mark(f.fsm) + " logic=" + mark(f.logic) +
        " signal=" + mark(f.signal) + " findings=" + std::to_string(report.findings.size()));
  c.result(text);
  return (f.io || f.fsm || f.logic || f.signal) ? kFindings : kOk;
}

// --- sim ---------------------------------------------------------------------

struct SimArgs {
  std::string design, top, stimulus, out, vcd, trace;
  int cycles = 0;
  std::vector<std::string> watch;
};

sim::StimulusProgram load_stimulus(const std::string& path, const Globals& g) {
  auto stim = sim::parse_stimulus(read_file(path));
  if (g.seed && stim.random) stim.random->seed = *g.seed;
  return stim;
}

int cmd_sim(const Ctx& c, const SimArgs& a) {
  auto design = load_design(a.design);
  std::string top = pick_top(design, a.top);
  auto elab = rtl::elaborate(design, top);
  auto stim = load_stimulus(a.stimulus, c.g);
  int cycles = a.cycles > 0 ? a.cycles : stim.cycles;
  if (cycles < 1) throw UsageError("cycle count must be at least 1");
  auto trace = sim::simulate(elab, stim, cycles);
  json j;
  j["design"] = a.design;
  j["top"] = top;
  j["cycles"] = cycles;
  j["final"] = json::object();
  for (const auto& o : elab.outputs) j["final"][o] = trace.at(cycles - 1, o).to_json_string();
  j["watch"] = json::object();
  for (const auto& w : a.watch) {
    auto act = sim::activation_cycles(trace, w);
    j["watch"][w] = act;
    std::string line = w + ":";
    for (int x : act) line += " " + std::to_string(x);
    c.say(line);
  }
  if (!a.vcd.empty()) write_file(a.vcd, sim::emit_vcd(trace, top));
  if (!a.trace.empty()) write_file(a.trace, sim::trace_to_json(trace) + "\n");
  std::string text = dump(j);
  if (!a.out.empty()) write_file(a.out, text);
  c.result(text);
  return kOk;
}

// --- sanitize ----------------------------------------------------------------

struct SanitizeArgs {
  std::string design, out, fixes;
};

int cmd_sanitize(const Ctx& c, const SanitizeArgs& a) {
  std::string source = read_file(a.design);
  auto design = rtl::parse_verilog(source, a.design);
  json fixes = json::array();
  json unresolved = json::array();
  for (auto& m : design.modules) {
    auto r = forge::sanitize_fsm_partial(m);
    for (const auto& f : r.fixes) {
      fixes.push_back({{"module", m.name}, {"line", f.line}, {"net", f.net}, {"kind", f.kind}, {"hold", f.hold}});
    }
    for (const auto& n : r.unresolved) unresolved.push_back({{"module", m.name}, {"net", n}});
    m = std::move(r.module);
  }
  // A clean design is passed through byte for byte.
  std::string text = fixes.empty() ? source : rtl::emit_verilog(design);
  if (!a.out.empty()) {
    write_file(a.out, text);
  } else if (!c.g.json_out) {
    c.out << text;
  }
  json j = {{"design", a.design}, {"fix_count", fixes.size()}, {"fixes", fixes}, {"unresolved", unresolved}};
  std::string jt = dump(j);
  if (!a.fixes.empty()) write_file(a.fixes, jt);
  if (!a.out.empty()) c.say(std::to_string(fixes.size()) + " fix(es) applied");
  c.result(jt);
  if (!unresolved.empty()) {
    for (const auto& u : unresolved) {
      c.err << "CannotInferHoldValue: " << u["module"].get<std::string>() << "."
            << u["net"].get<std::string>() << " left incomplete\n";
    }
    return kInput;
  }
  return kOk;
}

// --- diff --------------------------------------------------------------------

struct DiffArgs {
  std::string golden, suspect, top, stimulus, out;
  int cycles = 0;
};

int cmd_diff(const Ctx& c, const DiffArgs& a) {
  auto gd = load_design(a.golden);
  auto sd = load_design(a.suspect);
  std::string gtop = pick_top(gd, a.top);
  std::string stop = sd.find_module(gtop) ? gtop : pick_top(sd, "");
  auto ge = rtl::elaborate(gd, gtop);
  auto se = rtl::elaborate(sd, stop);
  auto port_width = [](const rtl::ElaboratedDesign& e, const std::string& n) {
    const auto* f = e.find_net(n);
    return f ? f->width : -1;
  };
  auto ins_g = ge.inputs;
  auto ins_s = se.inputs;
  std::sort(ins_g.begin(), ins_g.end());
  std::sort(ins_s.begin(), ins_s.end());
  bool same = ins_g == ins_s;
  for (const auto& i : ins_g) same = same && port_width(ge, i) == port_width(se, i);
  for (const auto& o : ge.outputs) {
    const auto* f = se.find_net(o);
    same = same && f && f->top_output && f->width == port_width(ge, o);
  }
  if (!same) throw Error(ErrorCode::UnknownNet, "designs do not share a top-level interface");
  auto stim = load_stimulus(a.stimulus, c.g);
  int cycles = a.cycles > 0 ? a.cycles : stim.cycles;
  if (cycles < 1) throw UsageError("cycle count must be at least 1");
  sim::SimOptions opt;
  opt.record = ge.outputs;
  auto report = sim::compare_traces(sim::simulate(ge, stim, cycles, opt), sim::simulate(se, stim, cycles, opt),
                                    ge.outputs);
  std::string text = sim::divergence_to_json(report) + "\n";
  if (!a.out.empty()) write_file(a.out, text);
  c.say(report.diverged() ? "diverged at cycle " + std::to_string(*report.first_divergence_cycle)
                          : std::string("no divergence"));
  c.result(text);
  return report.diverged() ? kFindings : kOk;
}

// --- llm-gen -----------------------------------------------------------------

struct GenArgs {
  std::string trigger, effect, target = "out", spec, alert = "Tj_Trig", out, validation, log;
  bool mock = false;
};

int cmd_llm_gen(const Ctx& c, const GenArgs& a) {
  auto trigger = usage_trigger(a.trigger);
  auto payload = usage_effect(a.effect, a.target);
  std::string spec_text = a.spec.empty() ? "" : read_file(a.spec);
  auto bundle = llm::build_generation_prompt(spec_text, trigger, payload, a.alert);
  auto cfg = llm::BackendConfig::from_env();
  auto backend = make_backend(a.mock);
  if (!a.log.empty()) {
    write_file(a.log, dump({{"purpose", llm::to_string(bundle.purpose)},
                            {"system", bundle.system_text},
                            {"user", bundle.user_text},
                            {"config", llm::config_to_json(cfg)}}));
  }
  std::string completion = llm::invoke(cfg, bundle, *backend);
  llm::ValidationResult v;
  std::string code;
  try {
    code = llm::extract_verilog(completion);
    v = llm::validate_generated(code, trigger, a.alert);
  } catch (const Error& e) {
    v.reason = "parse";
    v.detail = e.what();
  }
  std::string vt = dump(llm::validation_to_json(v));
  if (!a.validation.empty()) write_file(a.validation, vt);
  if (v.accepted && !a.out.empty()) write_file(a.out, code);
  c.say(v.accepted ? "accepted" : "rejected (" + v.reason + "): " + v.detail);
  c.result(vt);
  return v.accepted ? kOk : kFindings;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_report(const Ctx& c, const ReportArgs& a) {
  json reports = json::array();
  json flags = {{"io", false}, {"fsm", false}, {"logic", false}, {"signal", false}};
  int assessments = 0, divergent = 0, rejected = 0;
  for (const auto& path : a.inputs) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw FileError("'" + path + "' is not JSON");
    std::string kind = "unknown";
    if (j.contains("flags") && j.contains("findings")) {
      kind = "assessment";
      ++assessments;
      for (auto& [k, v] : flags.items()) v = v.get<bool>() || j["flags"].value(k, false);
    } else if (j.contains("first_divergence_cycle")) {
      kind = "divergence";
      divergent += j["first_divergence_cycle"].is_null() ? 0 : 1;
    } else if (j.contains("host_module")) {
      kind = "manifest";
    } else if (j.contains("fix_count")) {
      kind = "sanitize";
    } else if (j.contains("verdict")) {
      kind = "validation";
      rejected += j["verdict"] == "rejected" ? 1 : 0;
    } else if (j.contains("watch")) {
      kind = "simulation";
    }
    reports.push_back({{"file", path}, {"kind", kind}, {"data", j}});
  }
  json s = {{"reports", reports},
            {"summary",
             {{"assessments", assessments}, {"flags", flags}, {"divergent", divergent}, {"rejected", rejected}}}};
  std::string text = dump(s);
  if (!a.out.empty()) write_file(a.out, text);
  c.say(std::to_string(a.inputs.size()) + " report(s) merged");
  c.result(text);
  return kOk;
}

// --- edit --------------------------------------------------------------------

struct EditArgs {
  std::string design, edits, out, log;
};

int cmd_edit(const Ctx& c, const EditArgs& a) {
  auto design = load_design(a.design);
  json script = json::parse(read_file(a.edits), nullptr, false);
  if (script.is_discarded()) throw FileError("'" + a.edits + "' is not JSON");
  auto edits = ops::edits_from_json(script);
  auto run = ops::apply_edits(design, edits);
  for (const auto& m : run.design.modules) {
    for (const auto& f : rtl::lint(m)) c.err << "lint: " << m.name << ": " << f.message << "\n";
  }
  std::string text = rtl::emit_verilog(run.design);
  if (!a.out.empty()) {
    write_file(a.out, text);
  } else if (!c.g.json_out) {
    c.out << text;
  }
  std::string lt = dump(ops::edits_to_json(run.log));
  if (!a.log.empty()) write_file(a.log, lt);
  c.result(lt);
  return kOk;
}

}  // namespace

void set_backend_override(std::shared_ptr<llm::Backend> backend) { backend_override() = std::move(backend); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hardware Trojan insertion, simulation and assessment toolkit", "htkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random stimulus and metrics");
  app.add_flag("--json", g.json_out, "Print the JSON result on stdout");
  app.add_flag("--quiet", g.quiet, "Suppress human-readable output");

  InsertArgs ia;
  auto* insert = app.add_subcommand("insert", "Insert a trigger and payload into a design");
  insert->add_option("--design", ia.design, "Input Verilog")->required();
  insert->add_option("--top", ia.top, "Host module (default: last module)");
  insert->add_option("--trigger", ia.trigger, "time:LO:HI | logic:NET:LO:HI | addr:NET:LO:HI | seq:NET:V,V,... | count:NET:N")
      ->required();
  insert->add_option("--effect", ia.effect, "dos | perf[:P:W] | leak:SRC[:PORT]")->required();
  insert->add_option("--target", ia.target, "Output to attack (default: first output)");
  insert->add_option("-o,--out", ia.out, "Infected Verilog");
  insert->add_option("-m,--manifest", ia.manifest, "Manifest JSON");
  insert->add_option("--prefix", ia.prefix, "Prefix for inserted names");
  insert->add_flag("--allow-dirty", ia.allow_dirty, "Write even if lint reports findings");

  AssessArgs aa;
  auto* assess_cmd = app.add_subcommand("assess", "Structural Trojan assessment");
  assess_cmd->add_option("--design", aa.design, "Input Verilog")->required();
  assess_cmd->add_option("--top", aa.top, "Top module (default: last module)");
  assess_cmd->add_option("-o,--out", aa.out, "Report JSON");
  assess_cmd->add_option("--metrics", aa.metrics_cycles, "Cycles for rare-net metrics (0: none)")
      ->check(CLI::NonNegativeNumber);
  assess_cmd->add_flag("--llm", aa.llm, "Add findings from the language-model backend");
  assess_cmd->add_flag("--mock", aa.mock, "Use the offline mock backend");

  SimArgs sa;
  auto* sim_cmd = app.add_subcommand("sim", "Cycle simulation");
  sim_cmd->add_option("--design", sa.design, "Input Verilog")->required();
  sim_cmd->add_option("--top", sa.top, "Top module (default: last module)");
  sim_cmd->add_option("--stimulus", sa.stimulus, "Stimulus JSON")->required();
  sim_cmd->add_option("--cycles", sa.cycles, "Cycle count (default: from stimulus)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--watch", sa.watch, "1-bit net whose activation cycles are printed");
  sim_cmd->add_option("--vcd", sa.vcd, "VCD output");
  sim_cmd->add_option("--trace", sa.trace, "Full trace JSON output");
  sim_cmd->add_option("-o,--out", sa.out, "Summary JSON");

  SanitizeArgs za;
  auto* san = app.add_subcommand("sanitize", "Complete combinational processes that infer latches");
  san->add_option("--design", za.design, "Input Verilog")->required();
  san->add_option("-o,--out", za.out, "Repaired Verilog");
  san->add_option("--fixes", za.fixes, "Fix list JSON");

  DiffArgs da;
  auto* diff = app.add_subcommand("diff", "Simulate two designs under one stimulus and compare outputs");
  diff->add_option("--golden", da.golden, "Reference Verilog")->required();
  diff->add_option("--suspect", da.suspect, "Verilog under test")->required();
  diff->add_option("--top", da.top, "Top module (default: last module)");
  diff->add_option("--stimulus", da.stimulus, "Stimulus JSON")->required();
  diff->add_option("--cycles", da.cycles, "Cycle count (default: from stimulus)")->check(CLI::PositiveNumber);
  diff->add_option("-o,--out", da.out, "Divergence JSON");

  GenArgs ga;
  auto* gen = app.add_subcommand("llm-gen", "Generate a Trojan module with the language model and validate it");
  gen->add_option("--trigger", ga.trigger, "Trigger spec, as for insert")->required();
  gen->add_option("--effect", ga.effect, "Effect spec, as for insert")->required();
  gen->add_option("--target", ga.target, "Output the payload acts on");
  gen->add_option("--spec", ga.spec, "Text file describing the design");
  gen->add_option("--alert", ga.alert, "Alert signal name");
  gen->add_option("-o,--out", ga.out, "Accepted Verilog");
  gen->add_option("--validation", ga.validation, "Validation JSON");
  gen->add_option("--log", ga.log, "Prompt log JSON");
  gen->add_flag("--mock", ga.mock, "Use the offline mock backend");

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "Merge JSON outputs into one summary");
  rep->add_option("inputs", ra.inputs, "JSON files")->required();
  rep->add_option("-o,--out", ra.out, "Summary JSON");

  EditArgs ea;
  auto* edit = app.add_subcommand("edit", "Apply a signal-surgery edit script");
  edit->add_option("--design", ea.design, "Input Verilog")->required();
  edit->add_option("--edits", ea.edits, "Edit script JSON")->required();
  edit->add_option("-o,--out", ea.out, "Edited Verilog");
  edit->add_option("--log", ea.log, "Applied edit log JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  if (*seed_opt) g.seed = seed;
  Ctx c{g, out, err};
  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == insert) return cmd_insert(c, ia);
    if (active == assess_cmd) return cmd_assess(c, aa);
    if (active == sim_cmd) return cmd_sim(c, sa);
    if (active == san) return cmd_sanitize(c, za);
    if (active == diff) return cmd_diff(c, da);
    if (active == gen) return cmd_llm_gen(c, ga);
    if (active == rep) return cmd_report(c, ra);
    if (active == edit) return cmd_edit(c, ea);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << active->help();
    return kUsage;
  } catch (const Error& e) {
    err << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kInput;
  } catch (const FileError& e) {
    err << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace htkit::cli
