// SPDX-License-Identifier: Apache-2.0
#include "htkit/ops/signal_ops.hpp"

#include "htkit/errors.hpp"
#include "htkit/rtl/primitives.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <regex>
#include <set>

namespace htkit::ops {

using namespace htkit::rtl;

const char* to_string(EditKind k) {
  switch (k) {
    case EditKind::AddPort: return "add_port";
    case EditKind::AddNet: return "add_net";
    case EditKind::Join: return "join";
    case EditKind::Route: return "route";
    case EditKind::RenameModule: return "rename_module";
    case EditKind::RenameSignal: return "rename_signal";
  }
  return "?";
}

namespace {

void check_identifier(const std::string& n) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
  if (!std::regex_match(n, re)) throw Error(ErrorCode::InvalidSpec, "'" + n + "' is not an identifier");
}

void check_width(int w) {
  if (w < 1) throw Error(ErrorCode::InvalidSpec, "width must be at least 1");
}

RtlModule& module_of(RtlDesign& d, const std::string& name) {
  RtlModule* m = d.find_module(name);
  if (!m) throw Error(ErrorCode::UnknownModule, "design has no module '" + name + "'");
  return *m;
}

bool taken(const RtlModule& m, const std::string& n) {
  if (m.declares(n)) return true;
  return std::any_of(m.instances.begin(), m.instances.end(),
                     [&](const ModuleInst& i) { return i.instance_name == n; });
}

void claim(const RtlModule& m, const std::string& n) {
  check_identifier(n);
  if (taken(m, n)) throw Error(ErrorCode::NameCollision, "'" + n + "' already exists in '" + m.name + "'");
}

std::string unique_name(const RtlModule& m, const std::string& base) {
  if (!taken(m, base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_r" + std::to_string(i);
    if (!taken(m, n)) return n;
  }
}

// Directions of the ports of a child module or primitive.
std::optional<Direction> port_direction(const RtlDesign& d, const std::string& module,
                                        const std::string& port) {
  if (const auto* m = d.find_module(module)) {
    if (const auto* p = m->find_port(port)) return p->direction;
    return std::nullopt;
  }
  if (const auto* p = find_primitive(module)) {
    if (std::find(p->inputs.begin(), p->inputs.end(), port) != p->inputs.end()) return Direction::Input;
    if (std::find(p->outputs.begin(), p->outputs.end(), port) != p->outputs.end()) return Direction::Output;
  }
  return std::nullopt;
}

}  // namespace

RtlDesign add_port(const RtlDesign& d, const std::string& module, const std::string& name,
                   Direction dir, int width) {
  check_width(width);
  RtlDesign out = d;
  RtlModule& m = module_of(out, module);
  claim(m, name);
  m.ports.push_back({name, dir, NetKind::Wire, width, {}});
  for (auto& parent : out.modules) {
    for (auto& inst : parent.instances) {
      if (inst.module_name != module) continue;
      ExprPtr e = dir == Direction::Input ? make_const(width, 0) : nullptr;
      inst.connections.push_back({name, e, {}});
    }
  }
  return out;
}

RtlDesign add_net(const RtlDesign& d, const std::string& module, const std::string& name,
                  NetKind kind, int width) {
  check_width(width);
  RtlDesign out = d;
  RtlModule& m = module_of(out, module);
  claim(m, name);
  m.nets.push_back({name, kind, width, {}});
  return out;
}

RtlDesign join_signals(const RtlDesign& d, const std::string& module,
                       const std::vector<std::string>& originals, const std::string& joint) {
  RtlDesign out = d;
  RtlModule& m = module_of(out, module);
  if (originals.empty()) throw Error(ErrorCode::InvalidSpec, "join needs at least one signal");
  std::vector<std::string> srcs;
  for (const auto& o : originals) {
    if (std::find(srcs.begin(), srcs.end(), o) == srcs.end()) srcs.push_back(o);
  }
  int width = 0;
  for (const auto& o : srcs) {
    auto w = m.signal_width(o);
    if (!w || m.find_param(o)) throw Error(ErrorCode::UnknownNet, "'" + module + "' has no net '" + o + "'");
    if (width && *w != width) {
      throw Error(ErrorCode::WidthMismatch, "cannot join signals of width " + std::to_string(width) +
                                                " and " + std::to_string(*w));
    }
    width = *w;
  }
  claim(m, joint);

  SubstFn to_joint = [&](const std::string& n) -> ExprPtr {
    return std::find(srcs.begin(), srcs.end(), n) != srcs.end() ? make_ident(joint) : nullptr;
  };
  auto subst_target = [&](const ExprPtr& lhs) {
    if (lhs->kind != ExprKind::BitSelect) return lhs;
    return make_bit_select(lhs->name, substitute_expr(lhs->operands[0], to_joint));
  };
  // Reads inside the combinational fan-in of an original keep the original;
  // rewriting them would feed the joint back into itself.
  std::set<std::string> cone(srcs.begin(), srcs.end());
  auto instance_drives = [&](const ModuleInst& inst, const std::set<std::string>& nets) {
    for (const auto& c : inst.connections) {
      if (!c.expr || port_direction(out, inst.module_name, c.port) != Direction::Output) continue;
      if (nets.count(lhs_net(c.expr))) return true;
    }
    return false;
  };
  for (bool grew = true; grew;) {
    grew = false;
    auto add = [&](const std::vector<std::string>& reads) {
      for (const auto& r : reads) grew = cone.insert(r).second || grew;
    };
    for (const auto& a : m.assigns) {
      if (cone.count(lhs_net(a.lhs))) add(reads_of(a.rhs));
    }
    for (const auto& b : m.processes) {
      if (b.kind != AlwaysKind::Combinational) continue;
      std::vector<std::string> w;
      collect_writes(b.body, w);
      if (std::none_of(w.begin(), w.end(), [&](const auto& n) { return cone.count(n) > 0; })) continue;
      std::vector<std::string> r;
      collect_stmt_reads(b.body, r);
      add(r);
    }
    for (const auto& inst : m.instances) {
      if (!instance_drives(inst, cone)) continue;
      for (const auto& c : inst.connections) {
        if (c.expr && port_direction(out, inst.module_name, c.port) == Direction::Input) add(reads_of(c.expr));
      }
    }
  }
  for (auto& a : m.assigns) {
    if (cone.count(lhs_net(a.lhs))) continue;
    a.lhs = subst_target(a.lhs);
    a.rhs = substitute_expr(a.rhs, to_joint);
  }
  for (auto& b : m.processes) {
    if (b.kind == AlwaysKind::Combinational) {
      std::vector<std::string> w;
      collect_writes(b.body, w);
      if (std::any_of(w.begin(), w.end(), [&](const auto& n) { return cone.count(n) > 0; })) continue;
    }
    b.body = substitute_stmt(b.body, to_joint);
    std::vector<std::string> sens;
    for (const auto& s : b.sensitivity) {
      std::string n = to_joint(s) ? joint : s;
      if (std::find(sens.begin(), sens.end(), n) == sens.end()) sens.push_back(n);
    }
    b.sensitivity = std::move(sens);
  }
  for (auto& inst : m.instances) {
    if (instance_drives(inst, cone)) continue;
    for (auto& c : inst.connections) {
      if (!c.expr || port_direction(out, inst.module_name, c.port) != Direction::Input) continue;
      c.expr = substitute_expr(c.expr, to_joint);
    }
  }

  ExprPtr rhs = make_ident(srcs.back());
  for (auto it = std::next(srcs.rbegin()); it != srcs.rend(); ++it) {
    if (width == 1) {
      rhs = make_binary(BinaryOp::Or, make_ident(*it), rhs);
    } else {
      rhs = make_ternary(make_binary(BinaryOp::Ne, make_ident(*it), make_const(width, 0)),
                         make_ident(*it), rhs);
    }
  }
  m.nets.push_back({joint, NetKind::Wire, width, {}});
  m.assigns.push_back({make_ident(joint), rhs, {}});
  return out;
}

namespace {

struct Hop {
  bool up = false;           // child -> parent
  std::string parent;
  std::size_t instance = 0;  // index into parent's instances
  std::string child;
};

std::vector<Hop> find_path(const RtlDesign& d, const std::string& src, const std::string& dst) {
  std::map<std::string, Hop> via;
  std::set<std::string> seen = {src};
  std::deque<std::string> q = {src};
  while (!q.empty()) {
    std::string at = q.front();
    q.pop_front();
    if (at == dst) break;
    std::vector<std::pair<std::string, Hop>> next;
    for (const auto& p : d.modules) {
      for (std::size_t i = 0; i < p.instances.size(); ++i) {
        if (p.instances[i].module_name == at) next.push_back({p.name, {true, p.name, i, at}});
      }
    }
    const RtlModule* m = d.find_module(at);
    for (std::size_t i = 0; i < m->instances.size(); ++i) {
      const auto& child = m->instances[i].module_name;
      if (d.find_module(child)) next.push_back({child, {false, at, i, child}});
    }
    for (auto& [n, hop] : next) {
      if (!seen.insert(n).second) continue;
      via[n] = hop;
      q.push_back(n);
    }
  }
  if (!seen.count(dst)) throw Error(ErrorCode::NoPath, "no instance path from '" + src + "' to '" + dst + "'");
  std::vector<Hop> path;
  for (std::string at = dst; at != src;) {
    const Hop& h = via.at(at);
    path.push_back(h);
    at = h.up ? h.child : h.parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

RouteResult route_signal(const RtlDesign& d, const std::string& src_module, const std::string& net,
                         const std::string& dest_module) {
  RouteResult r;
  r.design = d;
  const RtlModule& src = module_of(r.design, src_module);
  module_of(r.design, dest_module);
  auto w = src.signal_width(net);
  if (!w || src.find_param(net)) {
    throw Error(ErrorCode::UnknownNet, "'" + src_module + "' has no net '" + net + "'");
  }
  r.carriers.push_back(net);
  if (src_module == dest_module) return r;

  std::string carry = net;
  for (const Hop& h : find_path(d, src_module, dest_module)) {
    RtlModule& child = *r.design.find_module(h.child);
    std::string port = unique_name(child, net);
    if (h.up) {
      r.design = add_port(r.design, h.child, port, Direction::Output, *w);
      RtlModule& c = *r.design.find_module(h.child);
      c.assigns.push_back({make_ident(port), make_ident(carry), {}});
      RtlModule& p = *r.design.find_module(h.parent);
      std::string wire = unique_name(p, net);
      p.nets.push_back({wire, NetKind::Wire, *w, {}});
      p.instances[h.instance].connections.back().expr = make_ident(wire);
      carry = wire;
    } else {
      r.design = add_port(r.design, h.child, port, Direction::Input, *w);
      RtlModule& p = *r.design.find_module(h.parent);
      p.instances[h.instance].connections.back().expr = make_ident(carry);
      carry = port;
    }
    r.carriers.push_back(carry);
  }
  return r;
}

RtlDesign rename_module(const RtlDesign& d, const std::string& old_name, const std::string& new_name) {
  RtlDesign out = d;
  RtlModule& m = module_of(out, old_name);
  check_identifier(new_name);
  if (old_name == new_name) return out;
  if (out.find_module(new_name) || find_primitive(new_name)) {
    throw Error(ErrorCode::NameCollision, "module '" + new_name + "' already exists");
  }
  m.name = new_name;
  for (auto& p : out.modules) {
    for (auto& inst : p.instances) {
      if (inst.module_name == old_name) inst.module_name = new_name;
    }
  }
  return out;
}

RtlDesign rename_signal(const RtlDesign& d, const std::string& module, const std::string& old_name,
                        const std::string& new_name) {
  RtlDesign out = d;
  RtlModule& m = module_of(out, module);
  if (!m.declares(old_name)) {
    throw Error(ErrorCode::UnknownNet, "'" + module + "' declares no '" + old_name + "'");
  }
  if (old_name == new_name) return out;
  claim(m, new_name);
  RenameFn fn = [&](const std::string& n) { return n == old_name ? new_name : n; };
  bool is_port = false;
  for (auto& p : m.ports) {
    if (p.name == old_name) {
      p.name = new_name;
      is_port = true;
    }
  }
  for (auto& n : m.nets) n.name = fn(n.name);
  for (auto& g : m.params) {
    for (auto& e : g.entries) {
      e.name = fn(e.name);
      e.value = rename_expr(e.value, fn);
    }
  }
  for (auto& a : m.assigns) {
    a.lhs = rename_expr(a.lhs, fn);
    a.rhs = rename_expr(a.rhs, fn);
  }
  for (auto& b : m.processes) {
    b.body = rename_stmt(b.body, fn);
    b.clock = fn(b.clock);
    for (auto& s : b.sensitivity) s = fn(s);
  }
  for (auto& inst : m.instances) {
    for (auto& c : inst.connections) {
      if (c.expr) c.expr = rename_expr(c.expr, fn);
    }
  }
  if (is_port) {
    for (auto& p : out.modules) {
      for (auto& inst : p.instances) {
        if (inst.module_name != module) continue;
        for (auto& c : inst.connections) c.port = fn(c.port);
      }
    }
  }
  return out;
}

RtlDesign apply_edit(const RtlDesign& d, SignalEdit& e) {
  switch (e.kind) {
    case EditKind::AddPort: return add_port(d, e.module, e.name, e.direction, e.width);
    case EditKind::AddNet: return add_net(d, e.module, e.name, e.net_kind, e.width);
    case EditKind::Join: return join_signals(d, e.module, e.originals, e.name);
    case EditKind::Route: {
      RouteResult r = route_signal(d, e.module, e.name, e.dest_module);
      e.resolved = r.carriers;
      return std::move(r.design);
    }
    case EditKind::RenameModule: return rename_module(d, e.name, e.new_name);
    case EditKind::RenameSignal: return rename_signal(d, e.module, e.name, e.new_name);
  }
  return d;
}

EditRun apply_edits(const RtlDesign& d, std::vector<SignalEdit> edits) {
  EditRun run;
  run.design = d;
  for (auto& e : edits) {
    run.design = apply_edit(run.design, e);
    run.log.push_back(e);
  }
  return run;
}

nlohmann::json edits_to_json(const std::vector<SignalEdit>& edits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : edits) {
    nlohmann::json j = {{"op", to_string(e.kind)}};
    switch (e.kind) {
      case EditKind::AddPort:
        j["module"] = e.module;
        j["name"] = e.name;
        j["direction"] = e.direction == Direction::Input ? "input" : "output";
        j["width"] = e.width;
        break;
      case EditKind::AddNet:
        j["module"] = e.module;
        j["name"] = e.name;
        j["kind"] = e.net_kind == NetKind::Reg ? "reg" : "wire";
        j["width"] = e.width;
        break;
      case EditKind::Join:
        j["module"] = e.module;
        j["originals"] = e.originals;
        j["joint"] = e.name;
        break;
      case EditKind::Route:
        j["source_module"] = e.module;
        j["net"] = e.name;
        j["dest_module"] = e.dest_module;
        if (!e.resolved.empty()) j["resolved"] = e.resolved;
        break;
      case EditKind::RenameModule:
        j["old"] = e.name;
        j["new"] = e.new_name;
        break;
      case EditKind::RenameSignal:
        j["module"] = e.module;
        j["old"] = e.name;
        j["new"] = e.new_name;
        break;
    }
    arr.push_back(std::move(j));
  }
  return {{"edits", arr}};
}

std::vector<SignalEdit> edits_from_json(const nlohmann::json& root) {
  static const std::map<std::string, EditKind> kinds = {
      {"add_port", EditKind::AddPort},         {"add_net", EditKind::AddNet},
      {"join", EditKind::Join},                {"route", EditKind::Route},
      {"rename_module", EditKind::RenameModule}, {"rename_signal", EditKind::RenameSignal}};
  std::vector<SignalEdit> out;
  try {
    const auto& arr = root.is_array() ? root : root.at("edits");
    for (const auto& j : arr) {
      SignalEdit e;
      auto k = kinds.find(j.at("op").get<std::string>());
      if (k == kinds.end()) throw Error(ErrorCode::InvalidSpec, "unknown edit op " + j.at("op").dump());
      e.kind = k->second;
      switch (e.kind) {
        case EditKind::AddPort: {
          e.module = j.at("module");
          e.name = j.at("name");
          std::string dir = j.at("direction");
          if (dir != "input" && dir != "output") throw Error(ErrorCode::InvalidSpec, "bad direction " + dir);
          e.direction = dir == "input" ? Direction::Input : Direction::Output;
          e.width = j.value("width", 1);
          break;
        }
        case EditKind::AddNet: {
          e.module = j.at("module");
          e.name = j.at("name");
          std::string kind = j.value("kind", "wire");
          if (kind != "wire" && kind != "reg") throw Error(ErrorCode::InvalidSpec, "bad net kind " + kind);
          e.net_kind = kind == "reg" ? NetKind::Reg : NetKind::Wire;
          e.width = j.value("width", 1);
          break;
        }
        case EditKind::Join:
          e.module = j.at("module");
          e.originals = j.at("originals").get<std::vector<std::string>>();
          e.name = j.at("joint");
          break;
        case EditKind::Route:
          e.module = j.at("source_module");
          e.name = j.at("net");
          e.dest_module = j.at("dest_module");
          break;
        case EditKind::RenameModule:
          e.name = j.at("old");
          e.new_name = j.at("new");
          break;
        case EditKind::RenameSignal:
          e.module = j.at("module");
          e.name = j.at("old");
          e.new_name = j.at("new");
          break;
      }
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidSpec, std::string("edit script: ") + ex.what());
  }
  return out;
}

}  // namespace htkit::ops
