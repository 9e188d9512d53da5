// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/emit.hpp"

#include <sstream>
#include <vector>

namespace htkit::rtl {

namespace {

std::string range(int width) { return width > 1 ? "[" + std::to_string(width - 1) + ":0] " : ""; }

bool needs_parens(const ExprPtr& e) {
  return e->kind == ExprKind::Binary || e->kind == ExprKind::Ternary;
}

std::string operand(const ExprPtr& e) {
  return needs_parens(e) ? "(" + emit_expr(e) + ")" : emit_expr(e);
}

class StmtPrinter {
 public:
  std::vector<std::string> lines;

  void emit(const StmtPtr& s, int depth, const std::string& prefix) {
    switch (s->kind) {
      case StmtKind::Block:
        if (s->stmts.empty()) {
          put(depth, prefix + "begin end");
          return;
        }
        put(depth, prefix + "begin");
        for (const auto& c : s->stmts) emit(c, depth + 1, "");
        put(depth, "end");
        return;
      case StmtKind::Assign:
        put(depth, prefix + emit_expr(s->lhs) + (s->nonblocking ? " <= " : " = ") +
                       emit_expr(s->rhs) + ";");
        return;
      case StmtKind::If:
        emit_if(s, depth, prefix);
        return;
      case StmtKind::Case:
        put(depth, prefix + "case (" + emit_expr(s->subject) + ")");
        for (const auto& arm : s->arms) {
          std::string head;
          if (arm.is_default()) {
            head = "default: ";
          } else {
            for (std::size_t i = 0; i < arm.labels.size(); ++i) {
              if (i) head += ", ";
              head += emit_expr(arm.labels[i]);
            }
            head += ": ";
          }
          emit_body(arm.body, depth + 1, head);
        }
        put(depth, "endcase");
        return;
    }
  }

 private:
  void put(int depth, const std::string& text) {
    lines.push_back(std::string(static_cast<std::size_t>(depth) * 2, ' ') + text);
  }

  // Assignments stay on the header line; compound statements open a block or
  // move to the next line.
  void emit_body(const StmtPtr& s, int depth, const std::string& head) {
    if (s->kind == StmtKind::Assign || s->kind == StmtKind::Block) {
      emit(s, depth, head);
      return;
    }
    put(depth, head.substr(0, head.size() - 1));
    emit(s, depth + 1, "");
  }

  // An else-less if in the then branch would capture our else on reparse.
  static bool dangling(const StmtPtr& s) {
    if (s->kind != StmtKind::If) return false;
    return !s->else_s || dangling(s->else_s);
  }

  void emit_if(const StmtPtr& s, int depth, const std::string& prefix) {
    StmtPtr then_s = s->then_s;
    if (s->else_s && dangling(then_s)) then_s = make_block({then_s});
    emit_body(then_s, depth, prefix + "if (" + emit_expr(s->cond) + ") ");
    if (!s->else_s) return;
    bool then_block = then_s->kind == StmtKind::Block && !then_s->stmts.empty();
    if (then_block) {
      lines.pop_back();
      if (s->else_s->kind == StmtKind::If) {
        emit_if(s->else_s, depth, "end else ");
      } else {
        emit_body(s->else_s, depth, "end else ");
      }
      return;
    }
    if (s->else_s->kind == StmtKind::If) {
      emit_if(s->else_s, depth, "else ");
    } else {
      emit_body(s->else_s, depth, "else ");
    }
  }
};

}  // namespace

std::string emit_const(const Expr& c) {
  if (!c.sized) return c.value.to_dec();
  std::string w = std::to_string(c.value.width());
  switch (c.radix) {
    case 'b': return w + "'b" + c.value.to_bin();
    case 'h': return w + "'h" + c.value.to_hex();
    default: return w + "'d" + c.value.to_dec();
  }
}

std::string emit_expr(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
      return emit_const(*e);
    case ExprKind::Ident:
      return e->name;
    case ExprKind::Unary:
      return std::string(to_string(e->unary_op)) + operand(e->operands[0]);
    case ExprKind::Binary:
      return operand(e->operands[0]) + " " + to_string(e->binary_op) + " " +
             operand(e->operands[1]);
    case ExprKind::Ternary:
      return operand(e->operands[0]) + " ? " + operand(e->operands[1]) + " : " +
             operand(e->operands[2]);
    case ExprKind::BitSelect:
      return e->name + "[" + emit_expr(e->operands[0]) + "]";
    case ExprKind::PartSelect:
      return e->name + "[" + std::to_string(e->msb) + ":" + std::to_string(e->lsb) + "]";
    case ExprKind::Concat: {
      std::string s = "{";
      for (std::size_t i = 0; i < e->operands.size(); ++i) {
        if (i) s += ", ";
        s += emit_expr(e->operands[i]);
      }
      return s + "}";
    }
  }
  return "";
}

std::string emit_module(const RtlModule& m) {
  std::ostringstream out;
  out << "module " << m.name << " (";
  for (std::size_t i = 0; i < m.ports.size(); ++i) {
    const auto& p = m.ports[i];
    out << (i ? ",\n" : "\n") << "  " << (p.direction == Direction::Input ? "input " : "output ")
        << (p.kind == NetKind::Reg ? "reg " : "wire ") << range(p.width) << p.name;
  }
  out << (m.ports.empty() ? ");\n" : "\n);\n");

  for (const auto& g : m.params) {
    std::string head = "  localparam " + (g.width ? range(*g.width) : "");
    if (g.entries.size() == 1) {
      out << head << g.entries[0].name << " = " << emit_expr(g.entries[0].value) << ";\n";
      continue;
    }
    out << head.substr(0, head.size() - 1) << "\n";
    for (std::size_t i = 0; i < g.entries.size(); ++i) {
      out << "    " << g.entries[i].name << " = " << emit_expr(g.entries[i].value)
          << (i + 1 < g.entries.size() ? ",\n" : ";\n");
    }
  }
  for (const auto& n : m.nets) {
    out << "  " << (n.kind == NetKind::Reg ? "reg " : "wire ") << range(n.width) << n.name << ";\n";
  }
  for (const auto& a : m.assigns) {
    out << "  assign " << emit_expr(a.lhs) << " = " << emit_expr(a.rhs) << ";\n";
  }
  for (const auto& b : m.processes) {
    std::string head = "always @(";
    if (b.kind == AlwaysKind::Clocked) {
      head += "posedge " + b.clock;
    } else if (b.sensitivity.empty()) {
      head += "*";
    } else {
      for (std::size_t i = 0; i < b.sensitivity.size(); ++i) {
        head += (i ? " or " : "") + b.sensitivity[i];
      }
    }
    head += ") ";
    StmtPrinter pr;
    if (b.body->kind == StmtKind::Block) {
      pr.emit(b.body, 1, head);
    } else {
      pr.lines.push_back("  " + head.substr(0, head.size() - 1));
      pr.emit(b.body, 2, "");
    }
    for (const auto& l : pr.lines) out << l << "\n";
  }
  for (const auto& inst : m.instances) {
    out << "  " << inst.module_name << " " << inst.instance_name << " (";
    for (std::size_t i = 0; i < inst.connections.size(); ++i) {
      const auto& c = inst.connections[i];
      out << (i ? ",\n" : "\n") << "    ." << c.port << "(" << (c.expr ? emit_expr(c.expr) : "")
          << ")";
    }
    out << (inst.connections.empty() ? ");\n" : "\n  );\n");
  }
  out << "endmodule\n";
  return out.str();
}

std::string emit_verilog(const RtlDesign& design) {
  std::string out;
  for (std::size_t i = 0; i < design.modules.size(); ++i) {
    if (i) out += "\n";
    out += emit_module(design.modules[i]);
  }
  return out;
}

}  // namespace htkit::rtl
