// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/ast.hpp"

#include <algorithm>

namespace htkit::rtl {

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      return true;
    default:
      return false;
  }
}

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::Xor: return "^";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
  }
  return "?";
}

const char* to_string(UnaryOp op) { return op == UnaryOp::BitNot ? "~" : "!"; }

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Const:
      return a.value == b.value && a.sized == b.sized;
    case ExprKind::Ident:
      return a.name == b.name;
    case ExprKind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case ExprKind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case ExprKind::Ternary:
    case ExprKind::Concat:
      break;
    case ExprKind::BitSelect:
      if (a.name != b.name) return false;
      break;
    case ExprKind::PartSelect:
      return a.name == b.name && a.msb == b.msb && a.lsb == b.lsb;
  }
  if (a.operands.size() != b.operands.size()) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!same_expr(a.operands[i], b.operands[i])) return false;
  }
  return true;
}

ExprPtr make_const(BitVec value, bool sized, char radix) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Const;
  e->value = std::move(value);
  e->sized = sized;
  e->radix = radix;
  return e;
}

ExprPtr make_const(int width, std::uint64_t value, char radix) {
  return make_const(BitVec(width, value), true, radix);
}

ExprPtr make_unsized(std::uint64_t value) { return make_const(BitVec(32, value), false, 'd'); }

ExprPtr make_ident(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Ident;
  e->name = std::move(name);
  return e;
}

ExprPtr make_unary(UnaryOp op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->unary_op = op;
  e->operands = {std::move(a)};
  return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->binary_op = op;
  e->operands = {std::move(a), std::move(b)};
  return e;
}

ExprPtr make_ternary(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Ternary;
  e->operands = {std::move(c), std::move(t), std::move(f)};
  return e;
}

ExprPtr make_bit_select(std::string name, ExprPtr index) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BitSelect;
  e->name = std::move(name);
  e->operands = {std::move(index)};
  return e;
}

ExprPtr make_part_select(std::string name, int msb, int lsb) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::PartSelect;
  e->name = std::move(name);
  e->msb = msb;
  e->lsb = lsb;
  return e;
}

ExprPtr make_concat(std::vector<ExprPtr> parts) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Concat;
  e->operands = std::move(parts);
  return e;
}

bool same_stmt(const StmtPtr& a, const StmtPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case StmtKind::Block:
      if (a.stmts.size() != b.stmts.size()) return false;
      for (std::size_t i = 0; i < a.stmts.size(); ++i) {
        if (!same_stmt(a.stmts[i], b.stmts[i])) return false;
      }
      return true;
    case StmtKind::If:
      return same_expr(a.cond, b.cond) && same_stmt(a.then_s, b.then_s) &&
             same_stmt(a.else_s, b.else_s);
    case StmtKind::Case:
      if (!same_expr(a.subject, b.subject) || a.arms.size() != b.arms.size()) return false;
      for (std::size_t i = 0; i < a.arms.size(); ++i) {
        const auto& x = a.arms[i];
        const auto& y = b.arms[i];
        if (x.labels.size() != y.labels.size()) return false;
        for (std::size_t j = 0; j < x.labels.size(); ++j) {
          if (!same_expr(x.labels[j], y.labels[j])) return false;
        }
        if (!same_stmt(x.body, y.body)) return false;
      }
      return true;
    case StmtKind::Assign:
      return a.nonblocking == b.nonblocking && same_expr(a.lhs, b.lhs) && same_expr(a.rhs, b.rhs);
  }
  return false;
}

StmtPtr make_block(std::vector<StmtPtr> stmts) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Block;
  s->stmts = std::move(stmts);
  return s;
}

StmtPtr make_if(ExprPtr cond, StmtPtr then_s, StmtPtr else_s) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->cond = std::move(cond);
  s->then_s = std::move(then_s);
  s->else_s = std::move(else_s);
  return s;
}

StmtPtr make_case(ExprPtr subject, std::vector<CaseArm> arms) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Case;
  s->subject = std::move(subject);
  s->arms = std::move(arms);
  return s;
}

StmtPtr make_assign(ExprPtr lhs, ExprPtr rhs, bool nonblocking) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->lhs = std::move(lhs);
  s->rhs = std::move(rhs);
  s->nonblocking = nonblocking;
  return s;
}

// ---------------------------------------------------------------------------

const PortDecl* RtlModule::find_port(const std::string& n) const {
  for (const auto& p : ports) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

const NetDecl* RtlModule::find_net(const std::string& n) const {
  for (const auto& d : nets) {
    if (d.name == n) return &d;
  }
  return nullptr;
}

const LocalParam* RtlModule::find_param(const std::string& n) const {
  for (const auto& g : params) {
    for (const auto& e : g.entries) {
      if (e.name == n) return &e;
    }
  }
  return nullptr;
}

std::optional<int> RtlModule::param_width(const std::string& n) const {
  for (const auto& g : params) {
    for (const auto& e : g.entries) {
      if (e.name != n) continue;
      if (g.width) return g.width;
      if (e.value->sized) return e.value->value.width();
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<int> RtlModule::signal_width(const std::string& n) const {
  if (const auto* p = find_port(n)) return p->width;
  if (const auto* d = find_net(n)) return d->width;
  return std::nullopt;
}

bool RtlModule::is_reg(const std::string& n) const {
  if (const auto* p = find_port(n)) return p->kind == NetKind::Reg;
  if (const auto* d = find_net(n)) return d->kind == NetKind::Reg;
  return false;
}

bool RtlModule::declares(const std::string& n) const {
  return find_port(n) != nullptr || find_net(n) != nullptr || find_param(n) != nullptr;
}

const RtlModule* RtlDesign::find_module(const std::string& n) const {
  for (const auto& m : modules) {
    if (m.name == n) return &m;
  }
  return nullptr;
}

RtlModule* RtlDesign::find_module(const std::string& n) {
  for (auto& m : modules) {
    if (m.name == n) return &m;
  }
  return nullptr;
}

bool operator==(const PortDecl& a, const PortDecl& b) {
  return a.name == b.name && a.direction == b.direction && a.kind == b.kind && a.width == b.width;
}

bool operator==(const NetDecl& a, const NetDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.width == b.width;
}

bool operator==(const LocalParamGroup& a, const LocalParamGroup& b) {
  if (a.width != b.width || a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].name != b.entries[i].name) return false;
    if (!same_expr(a.entries[i].value, b.entries[i].value)) return false;
  }
  return true;
}

bool operator==(const ContinuousAssign& a, const ContinuousAssign& b) {
  return same_expr(a.lhs, b.lhs) && same_expr(a.rhs, b.rhs);
}

bool operator==(const AlwaysBlock& a, const AlwaysBlock& b) {
  return a.kind == b.kind && a.clock == b.clock && a.sensitivity == b.sensitivity &&
         same_stmt(a.body, b.body);
}

bool operator==(const ModuleInst& a, const ModuleInst& b) {
  if (a.module_name != b.module_name || a.instance_name != b.instance_name) return false;
  if (a.connections.size() != b.connections.size()) return false;
  for (std::size_t i = 0; i < a.connections.size(); ++i) {
    if (a.connections[i].port != b.connections[i].port) return false;
    if (!same_expr(a.connections[i].expr, b.connections[i].expr)) return false;
  }
  return true;
}

bool operator==(const RtlModule& a, const RtlModule& b) {
  return a.name == b.name && a.ports == b.ports && a.nets == b.nets && a.params == b.params &&
         a.assigns == b.assigns && a.processes == b.processes && a.instances == b.instances;
}

bool operator==(const RtlDesign& a, const RtlDesign& b) { return a.modules == b.modules; }

// ---------------------------------------------------------------------------

const std::string& lhs_net(const ExprPtr& lhs) { return lhs->name; }

void collect_reads(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Ident:
    case ExprKind::BitSelect:
    case ExprKind::PartSelect:
      if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
      break;
    default:
      break;
  }
  for (const auto& o : e->operands) collect_reads(o, out);
}

std::vector<std::string> reads_of(const ExprPtr& e) {
  std::vector<std::string> out;
  collect_reads(e, out);
  return out;
}

void collect_writes(const StmtPtr& s, std::vector<std::string>& out) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Block:
      for (const auto& c : s->stmts) collect_writes(c, out);
      break;
    case StmtKind::If:
      collect_writes(s->then_s, out);
      collect_writes(s->else_s, out);
      break;
    case StmtKind::Case:
      for (const auto& a : s->arms) collect_writes(a.body, out);
      break;
    case StmtKind::Assign: {
      const auto& n = lhs_net(s->lhs);
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
      break;
    }
  }
}

ExprPtr rename_expr(const ExprPtr& e, const RenameFn& fn) {
  if (!e) return e;
  auto copy = std::make_shared<Expr>(*e);
  if (e->kind == ExprKind::Ident || e->kind == ExprKind::BitSelect ||
      e->kind == ExprKind::PartSelect) {
    copy->name = fn(e->name);
  }
  for (auto& o : copy->operands) o = rename_expr(o, fn);
  return copy;
}

StmtPtr rename_stmt(const StmtPtr& s, const RenameFn& fn) {
  if (!s) return s;
  auto copy = std::make_shared<Stmt>(*s);
  for (auto& c : copy->stmts) c = rename_stmt(c, fn);
  copy->cond = rename_expr(s->cond, fn);
  copy->then_s = rename_stmt(s->then_s, fn);
  copy->else_s = rename_stmt(s->else_s, fn);
  copy->subject = rename_expr(s->subject, fn);
  for (auto& a : copy->arms) {
    for (auto& l : a.labels) l = rename_expr(l, fn);
    a.body = rename_stmt(a.body, fn);
  }
  copy->lhs = rename_expr(s->lhs, fn);
  copy->rhs = rename_expr(s->rhs, fn);
  return copy;
}

ExprPtr substitute_expr(const ExprPtr& e, const SubstFn& fn) {
  if (!e) return e;
  if (e->kind == ExprKind::Ident) {
    if (auto r = fn(e->name)) return r;
    return e;
  }
  if (e->operands.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& o : copy->operands) o = substitute_expr(o, fn);
  return copy;
}

StmtPtr substitute_stmt(const StmtPtr& s, const SubstFn& fn) {
  if (!s) return s;
  auto copy = std::make_shared<Stmt>(*s);
  for (auto& c : copy->stmts) c = substitute_stmt(c, fn);
  copy->cond = substitute_expr(s->cond, fn);
  copy->then_s = substitute_stmt(s->then_s, fn);
  copy->else_s = substitute_stmt(s->else_s, fn);
  copy->subject = substitute_expr(s->subject, fn);
  for (auto& a : copy->arms) {
    for (auto& l : a.labels) l = substitute_expr(l, fn);
    a.body = substitute_stmt(a.body, fn);
  }
  if (s->lhs && !s->lhs->operands.empty()) {
    auto lhs = std::make_shared<Expr>(*s->lhs);
    for (auto& o : lhs->operands) o = substitute_expr(o, fn);
    copy->lhs = lhs;
  }
  copy->rhs = substitute_expr(s->rhs, fn);
  return copy;
}

void visit_expr(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
  if (!e) return;
  fn(e);
  for (const auto& o : e->operands) visit_expr(o, fn);
}

void visit_exprs(const StmtPtr& s, const std::function<void(const ExprPtr&)>& fn) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Block:
      for (const auto& c : s->stmts) visit_exprs(c, fn);
      break;
    case StmtKind::If:
      visit_expr(s->cond, fn);
      visit_exprs(s->then_s, fn);
      visit_exprs(s->else_s, fn);
      break;
    case StmtKind::Case:
      visit_expr(s->subject, fn);
      for (const auto& a : s->arms) {
        for (const auto& l : a.labels) visit_expr(l, fn);
        visit_exprs(a.body, fn);
      }
      break;
    case StmtKind::Assign:
      for (const auto& o : s->lhs->operands) visit_expr(o, fn);
      visit_expr(s->rhs, fn);
      break;
  }
}

void collect_stmt_reads(const StmtPtr& s, std::vector<std::string>& out) {
  visit_exprs(s, [&out](const ExprPtr& e) {
    if (e->kind != ExprKind::Ident && e->kind != ExprKind::BitSelect &&
        e->kind != ExprKind::PartSelect) {
      return;
    }
    if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
  });
}

}  // namespace htkit::rtl
