// SPDX-License-Identifier: Apache-2.0
#include "htkit/forge/trojan.hpp"

#include "htkit/errors.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace htkit::forge {

using namespace htkit::rtl;

void Fragment::append(const Fragment& o) {
  ports.insert(ports.end(), o.ports.begin(), o.ports.end());
  nets.insert(nets.end(), o.nets.begin(), o.nets.end());
  params.insert(params.end(), o.params.begin(), o.params.end());
  assigns.insert(assigns.end(), o.assigns.begin(), o.assigns.end());
  processes.insert(processes.end(), o.processes.begin(), o.processes.end());
}

std::vector<std::string> TrojanManifest::touched_names() const {
  std::vector<std::string> out;
  for (const auto& p : added_ports) out.push_back(p.name);
  for (const auto& n : added_nets) out.push_back(n.name);
  out.insert(out.end(), added_params.begin(), added_params.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

ExprPtr id(const std::string& n) { return make_ident(n); }
ExprPtr num(int width, const BitVec& v, char radix = 'd') {
  return make_const(v.resized(width), true, radix);
}
ExprPtr num(int width, std::uint64_t v, char radix = 'd') { return make_const(width, v, radix); }
ExprPtr bin(BinaryOp op, ExprPtr a, ExprPtr b) { return make_binary(op, std::move(a), std::move(b)); }
StmtPtr nb(const std::string& lhs, ExprPtr rhs) { return make_assign(id(lhs), std::move(rhs), true); }
StmtPtr bl(const std::string& lhs, ExprPtr rhs) { return make_assign(id(lhs), std::move(rhs), false); }

AlwaysBlock clocked(const std::string& clk, StmtPtr body) {
  AlwaysBlock b;
  b.kind = AlwaysKind::Clocked;
  b.clock = clk;
  b.body = make_block({std::move(body)});
  return b;
}

NetDecl reg(const std::string& n, int w) { return {n, NetKind::Reg, w, {}}; }
NetDecl wire(const std::string& n, int w) { return {n, NetKind::Wire, w, {}}; }
ContinuousAssign assign(const std::string& lhs, ExprPtr rhs) { return {id(lhs), std::move(rhs), {}}; }

int width_of(const RtlModule& host, const std::string& net) {
  auto w = host.signal_width(net);
  if (!w) throw Error(ErrorCode::UnknownNet, "module '" + host.name + "' has no net '" + net + "'");
  return *w;
}

void require_clock_reset(const RtlModule& host, const InsertOptions& o) {
  for (const auto& n : {o.clock, o.reset}) {
    const auto* p = host.find_port(n);
    if (!p || p->direction != Direction::Input || p->width != 1) {
      throw Error(ErrorCode::HostUnsupported,
                  "module '" + host.name + "' lacks a 1-bit input '" + n + "'");
    }
  }
}

void require_fits(const BitVec& v, int width, const std::string& net) {
  if (v.bit_length() > width) {
    throw Error(ErrorCode::WidthMismatch, "constant " + v.to_dec() + " does not fit " +
                                              std::to_string(width) + "-bit '" + net + "'");
  }
}

// Saturating counter: if (rst) c <= 0; else if (guard && c != max) c <= c + 1;
AlwaysBlock saturating_counter(const InsertOptions& o, const std::string& cnt, int w,
                               const BitVec& max, ExprPtr guard) {
  ExprPtr cond = bin(BinaryOp::Ne, id(cnt), num(w, max));
  if (guard) cond = bin(BinaryOp::LogAnd, std::move(guard), cond);
  return clocked(o.clock, make_if(id(o.reset), nb(cnt, num(w, 0)),
                                  make_if(cond, nb(cnt, bin(BinaryOp::Add, id(cnt), num(w, 1))))));
}

}  // namespace

TriggerFragment make_trigger(const TriggerSpec& spec, const RtlModule& host,
                             const InsertOptions& o) {
  validate(spec);
  TriggerFragment tf;
  Fragment& f = tf.fragment;
  tf.trigger_net = o.trigger();
  const std::string& trig = tf.trigger_net;

  switch (spec.cls) {
    case TriggerClass::Time: {
      require_clock_reset(host, o);
      BitVec max = spec.hi.resized(65) + BitVec(65, 1);
      int w = max.bit_length();
      std::string cnt = o.name("cnt");
      f.nets = {reg(cnt, w), wire(trig, 1)};
      f.processes.push_back(saturating_counter(o, cnt, w, max, nullptr));
      f.assigns.push_back(assign(trig, bin(BinaryOp::LogAnd, bin(BinaryOp::Ge, id(cnt), num(w, spec.lo)),
                                           bin(BinaryOp::Le, id(cnt), num(w, spec.hi)))));
      break;
    }
    case TriggerClass::Logic:
    case TriggerClass::Address: {
      int w = width_of(host, spec.net);
      require_fits(spec.lo, w, spec.net);
      require_fits(spec.hi, w, spec.net);
      f.nets = {wire(trig, 1)};
      f.assigns.push_back(
          assign(trig, bin(BinaryOp::LogAnd, bin(BinaryOp::Ge, id(spec.net), num(w, spec.lo)),
                           bin(BinaryOp::Le, id(spec.net), num(w, spec.hi)))));
      break;
    }
    case TriggerClass::StateSequence: {
      require_clock_reset(host, o);
      int w = width_of(host, spec.net);
      for (const auto& v : spec.sequence) require_fits(v, w, spec.net);
      const int n = static_cast<int>(spec.sequence.size());
      // 2^sw > n + 2 keeps the default arm reachable.
      const int sw = BitVec(32, static_cast<std::uint64_t>(n + 2)).bit_length();
      std::vector<std::string> states = {o.name("IDLE")};
      for (int i = 1; i <= n; ++i) states.push_back(o.name("SEQ" + std::to_string(i)));
      states.push_back(o.name("TRIGGER"));
      LocalParamGroup g;
      g.width = sw;
      for (std::size_t i = 0; i < states.size(); ++i) {
        g.entries.push_back({states[i], num(sw, i, 'b'), {}});
      }
      f.params.push_back(std::move(g));

      std::string state = o.name("state");
      std::string next = o.name("next");
      f.nets = {reg(state, sw), reg(next, sw), reg(trig, 1)};

      std::vector<CaseArm> arms;
      for (int i = 0; i < n; ++i) {
        ExprPtr hit = bin(BinaryOp::Eq, id(spec.net), num(w, spec.sequence[i], 'h'));
        arms.push_back({{id(states[i])},
                        make_if(hit, bl(next, id(states[i + 1])), bl(next, id(states[0]))),
                        {}});
      }
      arms.push_back({{id(states[n])}, bl(next, id(states[n + 1])), {}});
      arms.push_back({{id(states[n + 1])}, bl(next, id(states[0])), {}});
      arms.push_back({{}, bl(next, id(states[0])), {}});

      AlwaysBlock comb;
      comb.kind = AlwaysKind::Combinational;
      comb.body = make_block({make_case(id(state), std::move(arms))});
      f.processes.push_back(std::move(comb));
      f.processes.push_back(
          clocked(o.clock, make_if(id(o.reset), nb(state, id(states[0])), nb(state, id(next)))));
      AlwaysBlock out;
      out.kind = AlwaysKind::Combinational;
      out.sensitivity = {state};
      out.body = make_block({bl(trig, make_ternary(bin(BinaryOp::Eq, id(state), id(states[n + 1])),
                                                   num(1, 1, 'b'), num(1, 0, 'b')))});
      f.processes.push_back(std::move(out));
      break;
    }
    case TriggerClass::InputCount: {
      require_clock_reset(host, o);
      int ew = width_of(host, spec.net);
      if (ew != 1) {
        throw Error(ErrorCode::WidthMismatch, "event net '" + spec.net + "' must be 1 bit wide");
      }
      BitVec t(64, spec.threshold);
      int w = t.bit_length();
      std::string cnt = o.name("cnt");
      f.nets = {reg(cnt, w), wire(trig, 1)};
      f.processes.push_back(saturating_counter(o, cnt, w, t, id(spec.net)));
      f.assigns.push_back(assign(trig, bin(BinaryOp::Ge, id(cnt), num(w, t))));
      break;
    }
  }
  return tf;
}

PayloadFragment make_payload(const PayloadSpec& spec, const std::string& en,
                             bool enable_from_inputs, const RtlModule& host,
                             const InsertOptions& o) {
  validate(spec);
  const auto* port = host.find_port(spec.target_output);
  if (!port || port->direction != Direction::Output) {
    throw Error(ErrorCode::TargetNotOutput,
                "'" + spec.target_output + "' is not an output of '" + host.name + "'");
  }
  PayloadFragment pf;
  Fragment& f = pf.fragment;
  pf.target_output = spec.target_output;
  const int w = port->width;

  switch (spec.effect) {
    case PayloadEffect::Dos: {
      pf.original_net = o.name(spec.target_output + "_orig");
      f.nets.push_back({pf.original_net, port->kind, w, {}});
      f.assigns.push_back(
          assign(spec.target_output, make_ternary(id(en), num(w, 0), id(pf.original_net))));
      break;
    }
    case PayloadEffect::InfoLeak: {
      int sw = width_of(host, spec.source_net);
      if (host.declares(spec.leak_port)) {
        throw Error(ErrorCode::LeakPortNameCollision,
                    "'" + spec.leak_port + "' already exists in '" + host.name + "'");
      }
      f.ports.push_back({spec.leak_port, Direction::Output, NetKind::Wire, sw, {}});
      f.assigns.push_back(
          assign(spec.leak_port, make_ternary(id(en), id(spec.source_net), num(sw, 0))));
      break;
    }
    case PayloadEffect::PerfDegrade: {
      require_clock_reset(host, o);
      pf.original_net = o.name(spec.target_output + "_orig");
      const int pw = BitVec(32, static_cast<std::uint64_t>(spec.period - 1)).bit_length();
      std::string phase = o.name("phase");
      std::string armed = o.name("armed");
      std::string gate = o.name("gate");
      f.nets = {{pf.original_net, port->kind, w, {}}, reg(phase, pw), reg(armed, 1), wire(gate, 1)};

      // The phase is 0 on the first enabled sample and then free-runs mod P.
      ExprPtr wrap = make_ternary(bin(BinaryOp::Eq, id(phase), num(pw, spec.period - 1)), num(pw, 0),
                                  bin(BinaryOp::Add, id(phase), num(pw, 1)));
      ExprPtr advance = enable_from_inputs ? id(armed) : bin(BinaryOp::LogOr, id(armed), id(en));
      StmtPtr run = make_block({make_if(id(en), nb(armed, num(1, 1, 'b'))),
                                make_if(advance, nb(phase, wrap))});
      StmtPtr body = make_if(id(o.reset),
                             make_block({nb(phase, num(pw, 0)), nb(armed, num(1, 0, 'b'))}), run);
      f.processes.push_back(clocked(o.clock, body));
      f.assigns.push_back(assign(
          gate, bin(BinaryOp::LogAnd, id(en),
                    bin(BinaryOp::Lt, id(phase), num(pw, static_cast<std::uint64_t>(spec.width))))));
      f.assigns.push_back(
          assign(spec.target_output, make_ternary(id(gate), num(w, 0), id(pf.original_net))));
      break;
    }
  }
  return pf;
}

namespace {

Fragment make_enable(const TriggerSpec& t, const std::string& trig, const InsertOptions& o) {
  Fragment f;
  const std::string en = o.enable();
  if (!t.is_pulse()) {
    f.nets = {wire(en, 1)};
    f.assigns.push_back(assign(en, id(trig)));
    return f;
  }
  std::string latch = o.name("latch");
  f.nets = {reg(latch, 1), wire(en, 1)};
  f.processes.push_back(clocked(o.clock, make_if(id(o.reset), nb(latch, num(1, 0, 'b')),
                                                 make_if(id(trig), nb(latch, num(1, 1, 'b'))))));
  f.assigns.push_back(assign(en, bin(BinaryOp::Or, id(trig), id(latch))));
  return f;
}

void check_names(const RtlModule& host, const Fragment& f) {
  std::set<std::string> taken;
  for (const auto& p : host.ports) taken.insert(p.name);
  for (const auto& n : host.nets) taken.insert(n.name);
  for (const auto& g : host.params) {
    for (const auto& e : g.entries) taken.insert(e.name);
  }
  for (const auto& i : host.instances) taken.insert(i.instance_name);
  auto claim = [&](const std::string& n) {
    if (!taken.insert(n).second) {
      throw Error(ErrorCode::NameCollision, "name '" + n + "' already exists in '" + host.name + "'");
    }
  };
  for (const auto& p : f.ports) claim(p.name);
  for (const auto& n : f.nets) claim(n.name);
  for (const auto& g : f.params) {
    for (const auto& e : g.entries) claim(e.name);
  }
}

// Points every use of `from` in the host at `to`.
std::vector<Modification> reroute(RtlModule& m, const std::string& from, const std::string& to) {
  std::vector<Modification> mods;
  RenameFn fn = [&](const std::string& n) { return n == from ? to : n; };
  auto mentions = [&](const std::vector<std::string>& names) {
    return std::find(names.begin(), names.end(), from) != names.end();
  };
  for (auto& a : m.assigns) {
    std::vector<std::string> names = reads_of(a.rhs);
    names.push_back(lhs_net(a.lhs));
    if (!mentions(names)) continue;
    a.lhs = rename_expr(a.lhs, fn);
    a.rhs = rename_expr(a.rhs, fn);
    mods.push_back({"assign", lhs_net(a.lhs), "uses of '" + from + "' now refer to '" + to + "'"});
  }
  for (auto& b : m.processes) {
    std::vector<std::string> names;
    collect_writes(b.body, names);
    collect_stmt_reads(b.body, names);
    if (!mentions(names) && std::find(b.sensitivity.begin(), b.sensitivity.end(), from) ==
                                b.sensitivity.end()) {
      continue;
    }
    b.body = rename_stmt(b.body, fn);
    for (auto& s : b.sensitivity) s = fn(s);
    std::vector<std::string> writes;
    collect_writes(b.body, writes);
    mods.push_back({"always", writes.empty() ? "" : writes.front(),
                    "uses of '" + from + "' now refer to '" + to + "'"});
  }
  for (auto& inst : m.instances) {
    bool touched = false;
    for (auto& c : inst.connections) {
      if (!c.expr || !mentions(reads_of(c.expr))) continue;
      c.expr = rename_expr(c.expr, fn);
      touched = true;
    }
    if (touched) {
      mods.push_back({"instance", inst.instance_name,
                      "connection to '" + from + "' now drives '" + to + "'"});
    }
  }
  return mods;
}

SpanRecord span_record(const char* construct, const std::string& target, const SourceSpan& s) {
  return {construct, target, s.line, s.end_line};
}

}  // namespace

Insertion insert_trojan(const RtlDesign& design, const std::string& module_name,
                        const TriggerSpec& trigger, const PayloadSpec& payload,
                        const InsertOptions& o) {
  const RtlModule* host = design.find_module(module_name);
  if (!host) {
    throw Error(ErrorCode::HostUnsupported, "design has no module '" + module_name + "'");
  }
  validate(trigger);
  validate(payload);

  TriggerFragment tf = make_trigger(trigger, *host, o);
  Fragment all = tf.fragment;
  all.append(make_enable(trigger, tf.trigger_net, o));
  PayloadFragment pf =
      make_payload(payload, o.enable(), trigger.is_input_derived(), *host, o);
  all.append(pf.fragment);
  check_names(*host, all);

  TrojanManifest man;
  man.host_module = module_name;
  man.trigger = trigger;
  man.payload = payload;
  man.trigger_net = tf.trigger_net;
  man.enable_net = o.enable();
  man.enable_semantics = trigger.is_pulse() ? "sticky" : "level";

  RtlDesign out = design;
  RtlModule& m = *out.find_module(module_name);
  if (!pf.original_net.empty()) {
    man.modified = reroute(m, pf.target_output, pf.original_net);
    for (auto& p : m.ports) {
      if (p.name == pf.target_output && p.kind == NetKind::Reg) {
        p.kind = NetKind::Wire;
        man.modified.push_back({"port", p.name, "output reg becomes output wire"});
      }
    }
    man.modified.push_back({"driver", pf.target_output,
                            "driven by the payload; original driver moved to '" +
                                pf.original_net + "'"});
  }
  const std::size_t first_assign = m.assigns.size();
  const std::size_t first_process = m.processes.size();
  m.ports.insert(m.ports.end(), all.ports.begin(), all.ports.end());
  m.nets.insert(m.nets.end(), all.nets.begin(), all.nets.end());
  m.params.insert(m.params.end(), all.params.begin(), all.params.end());
  m.assigns.insert(m.assigns.end(), all.assigns.begin(), all.assigns.end());
  m.processes.insert(m.processes.end(), all.processes.begin(), all.processes.end());

  man.added_ports = all.ports;
  man.added_nets = all.nets;
  for (const auto& g : all.params) {
    for (const auto& e : g.entries) man.added_params.push_back(e.name);
  }

  Insertion ins;
  ins.design = parse_verilog(emit_verilog(out), design.source_name);
  const RtlModule& fresh = *ins.design.find_module(module_name);
  for (std::size_t i = first_assign; i < fresh.assigns.size(); ++i) {
    const auto& a = fresh.assigns[i];
    man.added_assigns.push_back(span_record("assign", lhs_net(a.lhs), a.span));
  }
  for (std::size_t i = first_process; i < fresh.processes.size(); ++i) {
    const auto& b = fresh.processes[i];
    std::vector<std::string> writes;
    collect_writes(b.body, writes);
    man.added_processes.push_back(span_record("always", writes.empty() ? "" : writes.front(), b.span));
  }
  ins.manifest = std::move(man);
  return ins;
}

nlohmann::json manifest_to_json(const TrojanManifest& m) {
  using nlohmann::json;
  json j;
  j["host_module"] = m.host_module;
  j["trigger_spec"] = to_json(m.trigger);
  j["payload_spec"] = to_json(m.payload);
  j["trigger_net"] = m.trigger_net;
  j["enable_net"] = m.enable_net;
  j["enable_semantics"] = m.enable_semantics;
  j["added_ports"] = json::array();
  for (const auto& p : m.added_ports) {
    j["added_ports"].push_back({{"name", p.name},
                                {"direction", p.direction == Direction::Input ? "input" : "output"},
                                {"width", p.width}});
  }
  j["added_nets"] = json::array();
  for (const auto& n : m.added_nets) {
    j["added_nets"].push_back(
        {{"name", n.name}, {"kind", n.kind == NetKind::Reg ? "reg" : "wire"}, {"width", n.width}});
  }
  j["added_params"] = m.added_params;
  auto spans = [](const std::vector<SpanRecord>& v) {
    json a = json::array();
    for (const auto& s : v) {
      a.push_back({{"construct", s.construct},
                   {"target", s.target},
                   {"line_start", s.line_start},
                   {"line_end", s.line_end}});
    }
    return a;
  };
  j["added_assigns"] = spans(m.added_assigns);
  j["added_processes"] = {{"count", m.added_processes.size()}, {"spans", spans(m.added_processes)}};
  j["modified"] = json::array();
  for (const auto& mod : m.modified) {
    j["modified"].push_back(
        {{"construct", mod.construct}, {"name", mod.name}, {"detail", mod.detail}});
  }
  return j;
}

TrojanManifest manifest_from_json(const nlohmann::json& j) {
  TrojanManifest m;
  try {
    m.host_module = j.at("host_module").get<std::string>();
    m.trigger = trigger_from_json(j.at("trigger_spec"));
    m.payload = payload_from_json(j.at("payload_spec"));
    m.trigger_net = j.at("trigger_net").get<std::string>();
    m.enable_net = j.at("enable_net").get<std::string>();
    m.enable_semantics = j.at("enable_semantics").get<std::string>();
    for (const auto& p : j.at("added_ports")) {
      m.added_ports.push_back({p.at("name").get<std::string>(),
                               p.at("direction") == "input" ? Direction::Input : Direction::Output,
                               NetKind::Wire, p.at("width").get<int>(), {}});
    }
    for (const auto& n : j.at("added_nets")) {
      m.added_nets.push_back({n.at("name").get<std::string>(),
                              n.at("kind") == "reg" ? NetKind::Reg : NetKind::Wire,
                              n.at("width").get<int>(), {}});
    }
    m.added_params = j.at("added_params").get<std::vector<std::string>>();
    auto spans = [](const nlohmann::json& a) {
      std::vector<SpanRecord> v;
      for (const auto& s : a) {
        v.push_back({s.at("construct").get<std::string>(), s.at("target").get<std::string>(),
                     s.at("line_start").get<int>(), s.at("line_end").get<int>()});
      }
      return v;
    };
    m.added_assigns = spans(j.at("added_assigns"));
    m.added_processes = spans(j.at("added_processes").at("spans"));
    for (const auto& mod : j.at("modified")) {
      m.modified.push_back({mod.at("construct").get<std::string>(),
                            mod.at("name").get<std::string>(), mod.at("detail").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("manifest JSON: ") + e.what());
  }
  return m;
}

}  // namespace htkit::forge
