// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/elaborate.hpp"

#include "htkit/rtl/primitives.hpp"
#include "htkit/rtl/width.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace htkit::rtl {

const char* to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::Input: return "input";
    case DriverKind::Assign: return "assign";
    case DriverKind::Combinational: return "combinational";
    case DriverKind::Clocked: return "clocked";
    case DriverKind::Ram: return "ram";
    case DriverKind::Tie: return "tie";
  }
  return "?";
}

const FlatNet* ElaboratedDesign::find_net(const std::string& name) const {
  for (const auto& n : flat_nets) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

int ElaboratedDesign::width_of(const std::string& name) const {
  const auto* n = find_net(name);
  return n ? n->width : 0;
}

namespace {

class Flattener {
 public:
  explicit Flattener(const RtlDesign& d) : d_(d) {}

  ElaboratedDesign run(const std::string& top) {
    const RtlModule* m = d_.find_module(top);
    if (!m) throw Error(ErrorCode::UnknownTop, "unknown top module '" + top + "'");
    out_.top = top;
    flatten(*m, "", true);
    assign_drivers();
    order_combinational();
    find_state_regs();
    return std::move(out_);
  }

 private:
  void declare(const std::string& name, int width, bool in, bool out) {
    widths_[name] = width;
    out_.flat_nets.push_back({name, width, in, out});
  }

  WidthLookup flat_widths() const {
    return [this](const std::string& n) -> std::optional<int> {
      auto it = widths_.find(n);
      if (it == widths_.end()) return std::nullopt;
      return it->second;
    };
  }

  void flatten(const RtlModule& m, const std::string& prefix, bool is_top) {
    if (std::find(stack_.begin(), stack_.end(), m.name) != stack_.end()) {
      throw Error(ErrorCode::RecursiveInstantiation,
                  "module '" + m.name + "' instantiates itself through '" + prefix + "'");
    }
    stack_.push_back(m.name);

    SubstFn params = [&m](const std::string& n) -> ExprPtr {
      for (const auto& g : m.params) {
        for (const auto& e : g.entries) {
          if (e.name != n) continue;
          if (g.width) return make_const(e.value->value.resized(*g.width), true, e.value->radix);
          return e.value;
        }
      }
      return nullptr;
    };
    RenameFn scoped = [&prefix](const std::string& n) { return prefix + n; };
    auto lower_expr = [&](const ExprPtr& e) { return rename_expr(substitute_expr(e, params), scoped); };

    for (const auto& p : m.ports) {
      declare(prefix + p.name, p.width, is_top && p.direction == Direction::Input,
              is_top && p.direction == Direction::Output);
      if (is_top) {
        (p.direction == Direction::Input ? out_.inputs : out_.outputs).push_back(p.name);
      }
    }
    for (const auto& n : m.nets) declare(prefix + n.name, n.width, false, false);

    for (const auto& a : m.assigns) {
      out_.assigns.push_back({lower_expr(a.lhs), lower_expr(a.rhs), a.span, prefix});
    }
    for (const auto& b : m.processes) {
      FlatProcess fp;
      fp.kind = b.kind;
      fp.clock = b.kind == AlwaysKind::Clocked ? prefix + b.clock : "";
      fp.body = rename_stmt(substitute_stmt(b.body, params), scoped);
      collect_writes(fp.body, fp.writes);
      collect_stmt_reads(fp.body, fp.reads);
      fp.span = b.span;
      fp.scope = prefix;
      out_.processes.push_back(std::move(fp));
    }
    for (const auto& inst : m.instances) {
      std::string inner = prefix + inst.instance_name + ".";
      if (const auto* prim = find_primitive(inst.module_name)) {
        lower_ram(*prim, inst, prefix, lower_expr);
        continue;
      }
      const RtlModule* child = d_.find_module(inst.module_name);
      if (!child) {
        throw Error(ErrorCode::UnresolvedInstance, "instance '" + prefix + inst.instance_name +
                                                       "' of unknown module '" +
                                                       inst.module_name + "'");
      }
      for (const auto& c : inst.connections) {
        if (!child->find_port(c.port)) {
          throw Error(ErrorCode::UnresolvedInstance,
                      "module '" + child->name + "' has no port '" + c.port + "'");
        }
      }
      flatten(*child, inner, false);
      for (const auto& c : inst.connections) {
        if (!c.expr) continue;
        const auto* port = child->find_port(c.port);
        auto port_net = make_ident(inner + c.port);
        if (port->direction == Direction::Input) {
          out_.assigns.push_back({port_net, lower_expr(c.expr), c.span, prefix});
        } else {
          out_.assigns.push_back({lower_expr(c.expr), port_net, c.span, prefix});
        }
      }
    }
    stack_.pop_back();
  }

  template <typename Lower>
  void lower_ram(const Primitive& prim, const ModuleInst& inst, const std::string& prefix,
                 const Lower& lower_expr) {
    const std::string inner = prefix + inst.instance_name + ".";
    auto widths = flat_widths();
    std::map<std::string, ExprPtr> conn;
    for (const auto& c : inst.connections) {
      bool known = std::count(prim.inputs.begin(), prim.inputs.end(), c.port) +
                   std::count(prim.outputs.begin(), prim.outputs.end(), c.port);
      if (!known) {
        throw Error(ErrorCode::UnresolvedInstance,
                    std::string(kDualPortRam) + " has no port '" + c.port + "'");
      }
      if (c.expr) conn[c.port] = lower_expr(c.expr);
    }
    auto width_of = [&](const char* port) {
      auto it = conn.find(port);
      return it == conn.end() ? 1 : self_width(it->second, widths);
    };
    FlatRam ram;
    ram.instance = inner.substr(0, inner.size() - 1);
    ram.addr_width = std::max(width_of("waddr"), width_of("raddr"));
    ram.data_width = std::max(width_of("wdata"), width_of("rdata"));
    if (ram.addr_width > 24) {
      throw UnsupportedConstruct(std::string(kDualPortRam) + " address wider than 24 bits",
                                 inst.span);
    }
    auto port_width = [&](const std::string& p) {
      if (p == "clk" || p == "we") return 1;
      if (p == "waddr" || p == "raddr") return ram.addr_width;
      return ram.data_width;
    };
    for (const auto& p : prim.inputs) {
      declare(inner + p, port_width(p), false, false);
      if (conn.count(p)) out_.assigns.push_back({make_ident(inner + p), conn[p], inst.span, prefix});
    }
    for (const auto& p : prim.outputs) {
      declare(inner + p, port_width(p), false, false);
      if (conn.count(p)) out_.assigns.push_back({conn[p], make_ident(inner + p), inst.span, prefix});
    }
    ram.clk = inner + "clk";
    ram.we = inner + "we";
    ram.waddr = inner + "waddr";
    ram.wdata = inner + "wdata";
    ram.raddr = inner + "raddr";
    ram.rdata = inner + "rdata";
    out_.rams.push_back(std::move(ram));
  }

  void drive(const std::string& net, Driver d) {
    auto [it, fresh] = out_.drivers.emplace(net, d);
    if (!fresh) {
      throw MultiDriverError(net, {});
    }
  }

  void assign_drivers() {
    for (const auto& n : out_.flat_nets) {
      if (n.top_input) drive(n.name, {DriverKind::Input, -1});
    }
    for (std::size_t i = 0; i < out_.assigns.size(); ++i) {
      drive(lhs_net(out_.assigns[i].lhs), {DriverKind::Assign, static_cast<int>(i)});
    }
    for (std::size_t i = 0; i < out_.processes.size(); ++i) {
      const auto& p = out_.processes[i];
      DriverKind k = p.kind == AlwaysKind::Clocked ? DriverKind::Clocked : DriverKind::Combinational;
      for (const auto& w : p.writes) drive(w, {k, static_cast<int>(i)});
    }
    for (std::size_t i = 0; i < out_.rams.size(); ++i) {
      drive(out_.rams[i].rdata, {DriverKind::Ram, static_cast<int>(i)});
    }
    for (const auto& n : out_.flat_nets) {
      out_.drivers.emplace(n.name, Driver{DriverKind::Tie, -1});
    }
  }

  // Kahn's algorithm, lowest node index first for a deterministic order.
  void order_combinational() {
    const int na = static_cast<int>(out_.assigns.size());
    std::vector<int> nodes;
    std::vector<std::vector<std::string>> reads;
    for (int i = 0; i < na; ++i) {
      nodes.push_back(i);
      std::vector<std::string> r;
      collect_reads(out_.assigns[i].rhs, r);
      for (const auto& o : out_.assigns[i].lhs->operands) collect_reads(o, r);
      reads.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < out_.processes.size(); ++i) {
      if (out_.processes[i].kind != AlwaysKind::Combinational) continue;
      nodes.push_back(na + static_cast<int>(i));
      reads.push_back(out_.processes[i].reads);
    }
    std::map<int, int> pos;
    for (std::size_t k = 0; k < nodes.size(); ++k) pos[nodes[k]] = static_cast<int>(k);

    std::vector<std::set<int>> succ(nodes.size());
    std::vector<int> indeg(nodes.size(), 0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      for (const auto& r : reads[k]) {
        const Driver& d = out_.drivers.at(r);
        int src;
        if (d.kind == DriverKind::Assign) {
          src = d.index;
        } else if (d.kind == DriverKind::Combinational) {
          src = na + d.index;
        } else {
          continue;
        }
        int sk = pos.at(src);
        if (sk == static_cast<int>(k)) continue;
        if (succ[sk].insert(static_cast<int>(k)).second) ++indeg[k];
      }
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (indeg[k] == 0) ready.push(static_cast<int>(k));
    }
    while (!ready.empty()) {
      int k = ready.top();
      ready.pop();
      out_.comb_order.push_back(nodes[k]);
      for (int s : succ[k]) {
        if (--indeg[s] == 0) ready.push(s);
      }
    }
    if (out_.comb_order.size() == nodes.size()) return;

    std::vector<std::string> stuck;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (indeg[k] == 0) continue;
      int n = nodes[k];
      if (n < na) {
        stuck.push_back(lhs_net(out_.assigns[n].lhs));
      } else {
        for (const auto& w : out_.processes[n - na].writes) stuck.push_back(w);
      }
    }
    std::string msg = "combinational cycle through";
    for (const auto& s : stuck) msg += " " + s;
    throw Error(ErrorCode::CombinationalCycle, msg);
  }

  static StmtPtr unwrap(StmtPtr s) {
    while (s && s->kind == StmtKind::Block && s->stmts.size() == 1) s = s->stmts[0];
    return s;
  }

  void find_state_regs() {
    for (const auto& p : out_.processes) {
      if (p.kind != AlwaysKind::Clocked) continue;
      std::string rst;
      std::map<std::string, BitVec> reset_values;
      StmtPtr body = unwrap(p.body);
      if (body && body->kind == StmtKind::If && body->else_s &&
          body->cond->kind == ExprKind::Ident && widths_[body->cond->name] == 1) {
        std::vector<StmtPtr> arm;
        StmtPtr th = unwrap(body->then_s);
        if (th->kind == StmtKind::Block) {
          arm = th->stmts;
        } else {
          arm = {th};
        }
        bool all_const = !arm.empty();
        for (const auto& s : arm) {
          if (s->kind != StmtKind::Assign || s->lhs->kind != ExprKind::Ident ||
              s->rhs->kind != ExprKind::Const) {
            all_const = false;
            break;
          }
          reset_values[s->lhs->name] = s->rhs->value.resized(widths_[s->lhs->name]);
        }
        if (all_const) {
          rst = body->cond->name;
        } else {
          reset_values.clear();
        }
      }
      for (const auto& w : p.writes) {
        StateReg r;
        r.net = w;
        r.width = widths_[w];
        auto it = reset_values.find(w);
        if (it != reset_values.end()) {
          r.reset_net = rst;
          r.reset_value = it->second;
        }
        out_.state_regs.push_back(std::move(r));
      }
    }
  }

  const RtlDesign& d_;
  ElaboratedDesign out_;
  std::vector<std::string> stack_;
  std::map<std::string, int> widths_;
};

int count_ops(const ExprPtr& e) {
  int n = 0;
  visit_expr(e, [&n](const ExprPtr& x) {
    if (x->kind == ExprKind::Unary || x->kind == ExprKind::Binary || x->kind == ExprKind::Ternary) {
      ++n;
    }
  });
  return n;
}

}  // namespace

ElaboratedDesign elaborate(const RtlDesign& design, const std::string& top) {
  return Flattener(design).run(top);
}

CellCount cell_count(const ElaboratedDesign& elab) {
  CellCount c;
  for (const auto& a : elab.assigns) c.comb_ops += count_ops(a.rhs);
  for (const auto& p : elab.processes) {
    visit_exprs(p.body, [&c](const ExprPtr& e) {
      if (e->kind == ExprKind::Unary || e->kind == ExprKind::Binary ||
          e->kind == ExprKind::Ternary) {
        ++c.comb_ops;
      }
    });
  }
  for (const auto& r : elab.state_regs) c.reg_bits += r.width;
  for (const auto& r : elab.rams) c.reg_bits += r.data_width;
  return c;
}

}  // namespace htkit::rtl
