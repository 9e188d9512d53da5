// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/lint.hpp"

#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/width.hpp"

#include <algorithm>
#include <map>

namespace htkit::rtl {

const char* to_string(LintRule rule) {
  switch (rule) {
    case LintRule::LatchInference: return "latch-inference";
    case LintRule::MultiDriver: return "multi-driver";
    case LintRule::UnreachableArm: return "unreachable-arm";
    case LintRule::WidthMismatch: return "width-mismatch";
  }
  return "?";
}

std::optional<BitVec> constant_value(const ExprPtr& e, const RtlModule& m) {
  if (e->kind == ExprKind::Const) return e->value;
  if (e->kind == ExprKind::Ident) {
    if (const auto* p = m.find_param(e->name)) return p->value->value;
  }
  return std::nullopt;
}

namespace {

// Distinct label values normalized to the subject width; labels wider than
// the subject that do not fit can never match and are skipped.
std::set<std::string> distinct_labels(const Stmt& c, const RtlModule& m, int subject_width) {
  std::set<std::string> seen;
  for (const auto& arm : c.arms) {
    for (const auto& l : arm.labels) {
      auto v = constant_value(l, m);
      if (!v || v->bit_length() > subject_width) continue;
      seen.insert(v->resized(subject_width).to_hex());
    }
  }
  return seen;
}

}  // namespace

bool case_is_full(const Stmt& c, const RtlModule& m) {
  int w = self_width(c.subject, module_widths(m));
  if (w >= 31) return false;  // no enumerable case list covers 2^31 values
  return distinct_labels(c, m, w).size() == (std::size_t{1} << w);
}

std::set<std::string> definitely_assigned(const StmtPtr& s, const RtlModule& m) {
  std::set<std::string> out;
  if (!s) return out;
  switch (s->kind) {
    case StmtKind::Assign:
      if (s->lhs->kind == ExprKind::Ident) out.insert(s->lhs->name);
      break;
    case StmtKind::Block:
      for (const auto& c : s->stmts) {
        auto sub = definitely_assigned(c, m);
        out.insert(sub.begin(), sub.end());
      }
      break;
    case StmtKind::If: {
      if (!s->else_s) break;
      auto a = definitely_assigned(s->then_s, m);
      auto b = definitely_assigned(s->else_s, m);
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(out, out.begin()));
      break;
    }
    case StmtKind::Case: {
      bool has_default = std::any_of(s->arms.begin(), s->arms.end(),
                                     [](const CaseArm& a) { return a.is_default(); });
      if (!has_default && !case_is_full(*s, m)) break;
      bool first = true;
      for (const auto& arm : s->arms) {
        auto sub = definitely_assigned(arm.body, m);
        if (first) {
          out = sub;
          first = false;
          continue;
        }
        std::set<std::string> keep;
        std::set_intersection(out.begin(), out.end(), sub.begin(), sub.end(),
                              std::inserter(keep, keep.begin()));
        out = std::move(keep);
      }
      break;
    }
  }
  return out;
}

namespace {

class Linter {
 public:
  explicit Linter(const RtlModule& m) : m_(m), widths_(module_widths(m)) {}

  std::vector<LintFinding> run() {
    std::map<std::string, std::vector<SourceSpan>> drivers;
    for (const auto& a : m_.assigns) {
      drivers[lhs_net(a.lhs)].push_back(a.span);
      check_expr(a.rhs, a.span);
    }
    for (const auto& b : m_.processes) {
      std::vector<std::string> writes;
      collect_writes(b.body, writes);
      for (const auto& n : writes) drivers[n].push_back(b.span);
      check_stmt(b.body, b.span);
      if (b.kind != AlwaysKind::Combinational) continue;
      auto full = definitely_assigned(b.body, m_);
      for (const auto& n : writes) {
        if (full.count(n)) continue;
        add(LintRule::LatchInference, b.span, n,
            "'" + n + "' is not assigned on every path of a combinational process");
      }
    }
    for (const auto& [net, spans] : drivers) {
      if (spans.size() < 2) continue;
      add(LintRule::MultiDriver, spans[1], net, "'" + net + "' has " +
                                                    std::to_string(spans.size()) + " drivers");
    }
    return std::move(findings_);
  }

 private:
  void add(LintRule rule, SourceSpan span, std::string net, std::string message) {
    findings_.push_back({rule, span, std::move(net), std::move(message)});
  }

  void check_expr(const ExprPtr& e, const SourceSpan& where) {
    if (!e) return;
    if (e->kind == ExprKind::Binary && is_comparison(e->binary_op)) {
      const auto& a = e->operands[0];
      const auto& b = e->operands[1];
      if (!is_unsized(a, widths_) && !is_unsized(b, widths_)) {
        int wa = self_width(a, widths_);
        int wb = self_width(b, widths_);
        if (wa != wb) {
          add(LintRule::WidthMismatch, e->span.valid() ? e->span : where, "",
              "comparison of " + std::to_string(wa) + "-bit and " + std::to_string(wb) +
                  "-bit operands in '" + emit_expr(e) + "'");
        }
      }
    }
    for (const auto& o : e->operands) check_expr(o, where);
  }

  void check_stmt(const StmtPtr& s, const SourceSpan& where) {
    if (!s) return;
    SourceSpan here = s->span.valid() ? s->span : where;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& c : s->stmts) check_stmt(c, here);
        break;
      case StmtKind::If:
        check_expr(s->cond, here);
        check_stmt(s->then_s, here);
        check_stmt(s->else_s, here);
        break;
      case StmtKind::Assign:
        check_expr(s->rhs, here);
        break;
      case StmtKind::Case:
        check_case(*s, here);
        break;
    }
  }

  void check_case(const Stmt& c, const SourceSpan& here) {
    check_expr(c.subject, here);
    int w = self_width(c.subject, widths_);
    std::set<std::string> seen;
    for (const auto& arm : c.arms) {
      SourceSpan at = arm.span.valid() ? arm.span : here;
      if (arm.is_default()) {
        if (case_is_full(c, m_)) {
          add(LintRule::UnreachableArm, at, "", "default arm of a fully enumerated case");
        }
      }
      bool live = arm.is_default();
      for (const auto& l : arm.labels) {
        if (!is_unsized(l, widths_) && self_width(l, widths_) != w) {
          add(LintRule::WidthMismatch, at, "",
              "case label '" + emit_expr(l) + "' does not match the " + std::to_string(w) +
                  "-bit subject");
        }
        auto v = constant_value(l, m_);
        if (!v || v->bit_length() > w) continue;
        if (seen.insert(v->resized(w).to_hex()).second) live = true;
      }
      if (!live) add(LintRule::UnreachableArm, at, "", "every label of this arm is already matched");
      check_stmt(arm.body, at);
    }
  }

  const RtlModule& m_;
  WidthLookup widths_;
  std::vector<LintFinding> findings_;
};

}  // namespace

std::vector<LintFinding> lint(const RtlModule& module) { return Linter(module).run(); }

}  // namespace htkit::rtl
