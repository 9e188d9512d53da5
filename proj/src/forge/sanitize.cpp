// SPDX-License-Identifier: Apache-2.0
#include "htkit/forge/sanitize.hpp"

#include "htkit/errors.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace htkit::forge {

using namespace htkit::rtl;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& n) {
  return std::find(v.begin(), v.end(), n) != v.end();
}

void find_assigns(const StmtPtr& s, const std::function<void(const Stmt&)>& fn) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Assign: fn(*s); break;
    case StmtKind::Block:
      for (const auto& c : s->stmts) find_assigns(c, fn);
      break;
    case StmtKind::If:
      find_assigns(s->then_s, fn);
      find_assigns(s->else_s, fn);
      break;
    case StmtKind::Case:
      for (const auto& a : s->arms) find_assigns(a.body, fn);
      break;
  }
}

// Constant `R <= c` in the taken branch of the process's leading reset test.
ExprPtr reset_constant(const AlwaysBlock& b, const std::string& reg, const RtlModule& m) {
  StmtPtr s = b.body;
  while (s && s->kind == StmtKind::Block && !s->stmts.empty()) s = s->stmts.front();
  if (!s || s->kind != StmtKind::If || s->cond->kind != ExprKind::Ident) return nullptr;
  ExprPtr found;
  find_assigns(s->then_s, [&](const Stmt& a) {
    if (!found && a.lhs->kind == ExprKind::Ident && a.lhs->name == reg &&
        constant_value(a.rhs, m)) {
      found = a.rhs;
    }
  });
  return found;
}

std::optional<ExprPtr> infer_hold(const RtlModule& m, const AlwaysBlock& proc, const std::string& net) {
  std::vector<std::string> proc_reads;
  collect_stmt_reads(proc.body, proc_reads);
  std::optional<ExprPtr> loaded;
  for (const auto& b : m.processes) {
    if (b.kind != AlwaysKind::Clocked) continue;
    std::optional<ExprPtr> hit;
    find_assigns(b.body, [&](const Stmt& a) {
      if (hit || a.lhs->kind != ExprKind::Ident) return;
      const std::string& reg = a.lhs->name;
      if (a.rhs->kind == ExprKind::Ident && a.rhs->name == net && contains(proc_reads, reg)) {
        ExprPtr c = reset_constant(b, reg, m);
        hit = c ? c : make_ident(reg);
      } else if (!loaded && contains(reads_of(a.rhs), net)) {
        loaded = make_ident(reg);
      }
    });
    if (hit) return hit;
  }
  return loaded;
}

StmtPtr holds(const std::vector<std::string>& nets, const std::map<std::string, ExprPtr>& hold) {
  std::vector<StmtPtr> out;
  for (const auto& n : nets) out.push_back(make_assign(make_ident(n), hold.at(n), false));
  return out.size() == 1 ? out.front() : make_block(std::move(out));
}

class Fixer {
 public:
  Fixer(const RtlModule& m, const std::map<std::string, ExprPtr>& hold, int line,
        std::vector<SanitizeFix>& fixes)
      : m_(m), hold_(hold), line_(line), fixes_(fixes) {}

  StmtPtr fix(const StmtPtr& s, const std::vector<std::string>& need) {
    auto have = definitely_assigned(s, m_);
    std::vector<std::string> missing;
    for (const auto& n : need) {
      if (!have.count(n)) missing.push_back(n);
    }
    if (missing.empty()) return s;
    int line = s->span.valid() ? s->span.line : line_;
    switch (s->kind) {
      case StmtKind::If: {
        auto out = std::make_shared<Stmt>(*s);
        out->then_s = fix(s->then_s, missing);
        if (s->else_s) {
          out->else_s = fix(s->else_s, missing);
        } else {
          out->else_s = holds(missing, hold_);
          record(line, missing, "else_branch");
        }
        return out;
      }
      case StmtKind::Case: {
        auto out = std::make_shared<Stmt>(*s);
        bool has_default = false;
        for (auto& arm : out->arms) {
          arm.body = fix(arm.body, missing);
          has_default = has_default || arm.is_default();
        }
        if (!has_default && !case_is_full(*s, m_)) {
          out->arms.push_back({{}, holds(missing, hold_), {}});
          record(line, missing, "default_arm");
        }
        return out;
      }
      case StmtKind::Block: {
        // Each net is completed in the last child that writes it, so later
        // partial writes keep their position after the hold.
        std::vector<StmtPtr> kids = s->stmts;
        std::vector<std::string> orphans;
        std::map<std::size_t, std::vector<std::string>> by_child;
        for (const auto& n : missing) {
          std::optional<std::size_t> last;
          for (std::size_t i = 0; i < kids.size(); ++i) {
            std::vector<std::string> w;
            collect_writes(kids[i], w);
            if (contains(w, n)) last = i;
          }
          if (last) {
            by_child[*last].push_back(n);
          } else {
            orphans.push_back(n);
          }
        }
        for (const auto& [i, nets] : by_child) kids[i] = fix(kids[i], nets);
        if (!orphans.empty()) {
          kids.insert(kids.begin(), holds(orphans, hold_));
          record(line, orphans, "initial_hold");
        }
        return make_block(std::move(kids));
      }
      case StmtKind::Assign: {
        // Only a select write reaches here; the hold must precede it.
        record(line, missing, "initial_hold");
        std::vector<StmtPtr> kids;
        for (const auto& n : missing) kids.push_back(make_assign(make_ident(n), hold_.at(n), false));
        kids.push_back(s);
        return make_block(std::move(kids));
      }
    }
    return s;
  }

 private:
  void record(int line, const std::vector<std::string>& nets, const char* kind) {
    for (const auto& n : nets) fixes_.push_back({line, n, kind, emit_expr(hold_.at(n))});
  }

  const RtlModule& m_;
  const std::map<std::string, ExprPtr>& hold_;
  int line_;
  std::vector<SanitizeFix>& fixes_;
};

SanitizeResult run(const RtlModule& module, bool partial) {
  SanitizeResult r;
  r.module = module;
  for (auto& proc : r.module.processes) {
    if (proc.kind != AlwaysKind::Combinational) continue;
    std::vector<std::string> writes;
    collect_writes(proc.body, writes);
    auto have = definitely_assigned(proc.body, module);
    std::vector<std::string> need;
    std::map<std::string, ExprPtr> hold;
    for (const auto& n : writes) {
      if (have.count(n)) continue;
      auto h = infer_hold(module, proc, n);
      if (!h) {
        if (!partial) {
          throw Error(ErrorCode::CannotInferHoldValue,
                      "no hold value for '" + n + "' in the process at line " +
                          std::to_string(proc.span.line));
        }
        r.unresolved.push_back(n);
        continue;
      }
      hold[n] = *h;
      need.push_back(n);
    }
    if (need.empty()) continue;
    Fixer fx(module, hold, proc.span.line, r.fixes);
    proc.body = fx.fix(proc.body, need);
  }
  return r;
}

}  // namespace

SanitizeResult sanitize_fsm(const RtlModule& module) { return run(module, false); }

SanitizeResult sanitize_fsm_partial(const RtlModule& module) { return run(module, true); }

}  // namespace htkit::forge
