// SPDX-License-Identifier: Apache-2.0
#include "htkit/assess/assess.hpp"

#include "htkit/errors.hpp"
#include "htkit/sim/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace htkit::assess {

using namespace htkit::rtl;

const char* to_string(Category c) {
  switch (c) {
    case Category::Io: return "io";
    case Category::Fsm: return "fsm";
    case Category::Logic: return "logic";
    case Category::Signal: return "signal";
  }
  return "?";
}

FlagRow AssessmentReport::flags() const {
  FlagRow r;
  for (const auto& f : findings) {
    switch (f.category) {
      case Category::Io: r.io = true; break;
      case Category::Fsm: r.fsm = true; break;
      case Category::Logic: r.logic = true; break;
      case Category::Signal: r.signal = true; break;
    }
  }
  return r;
}

bool operator==(const Finding& a, const Finding& b) {
  return std::tie(a.category, a.nets, a.span.file, a.span.line_start, a.span.line_end, a.rationale) ==
         std::tie(b.category, b.nets, b.span.file, b.span.line_start, b.span.line_end, b.rationale);
}

bool operator==(const RareNetMetric& a, const RareNetMetric& b) {
  return std::tie(a.net, a.p, a.cycles, a.seed) == std::tie(b.net, b.p, b.cycles, b.seed);
}

bool operator==(const AssessmentReport& a, const AssessmentReport& b) {
  return std::tie(a.design, a.top, a.findings, a.metrics) ==
         std::tie(b.design, b.top, b.findings, b.metrics);
}

namespace {

// One assignment to a net together with the conditions that enable it.
struct Site {
  std::string net;
  ExprPtr rhs;
  std::vector<ExprPtr> guards;  // if conditions and case-label equalities
  ExprPtr index;                // select index on the target, may be null
  SourceSpan span;
  bool clocked = false;
  int process = -1;
};

bool is_const_compare(const Expr& e) {
  if (e.kind != ExprKind::Binary || !is_comparison(e.binary_op)) return false;
  bool a = e.operands[0]->kind == ExprKind::Const;
  bool b = e.operands[1]->kind == ExprKind::Const;
  return a != b;
}

bool has_const_compare(const ExprPtr& e) {
  bool hit = false;
  if (e) visit_expr(e, [&](const ExprPtr& x) { hit = hit || is_const_compare(*x); });
  return hit;
}

// Identifiers reachable from `e` without entering a comparison.
void compare_free_reads(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Binary && is_comparison(e->binary_op)) return;
  if (e->kind == ExprKind::Ident || e->kind == ExprKind::BitSelect || e->kind == ExprKind::PartSelect) {
    out.insert(e->name);
  }
  for (const auto& o : e->operands) compare_free_reads(o, out);
}

// Calls fn(name, in_guard) for every identifier occurrence; ternary
// conditions are guard positions.
void uses(const ExprPtr& e, bool guard, const std::function<void(const std::string&, bool)>& fn) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Ident:
    case ExprKind::PartSelect: fn(e->name, guard); return;
    case ExprKind::BitSelect:
      fn(e->name, guard);
      uses(e->operands[0], guard, fn);
      return;
    case ExprKind::Ternary:
      uses(e->operands[0], true, fn);
      uses(e->operands[1], guard, fn);
      uses(e->operands[2], guard, fn);
      return;
    default:
      for (const auto& o : e->operands) uses(o, guard, fn);
  }
}

void ternary_conditions(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (!e) return;
  visit_expr(e, [&](const ExprPtr& x) {
    if (x->kind == ExprKind::Ternary) out.push_back(x->operands[0]);
  });
}

void collect_sites(const StmtPtr& s, std::vector<ExprPtr>& guards, const Site& proto,
                   std::vector<Site>& out) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Assign: {
      Site site = proto;
      site.net = lhs_net(s->lhs);
      site.rhs = s->rhs;
      site.guards = guards;
      if (s->lhs->kind == ExprKind::BitSelect) site.index = s->lhs->operands[0];
      out.push_back(std::move(site));
      break;
    }
    case StmtKind::Block:
      for (const auto& c : s->stmts) collect_sites(c, guards, proto, out);
      break;
    case StmtKind::If:
      guards.push_back(s->cond);
      collect_sites(s->then_s, guards, proto, out);
      collect_sites(s->else_s, guards, proto, out);
      guards.pop_back();
      break;
    case StmtKind::Case:
      for (const auto& arm : s->arms) {
        std::size_t mark = guards.size();
        if (arm.is_default()) {
          guards.push_back(s->subject);
        } else {
          for (const auto& l : arm.labels) guards.push_back(make_binary(BinaryOp::Eq, s->subject, l));
        }
        collect_sites(arm.body, guards, proto, out);
        guards.resize(mark);
      }
      break;
  }
}

class Analyzer {
 public:
  Analyzer(const ElaboratedDesign& e, std::string file) : e_(e), file_(std::move(file)) {
    for (const auto& a : e.assigns) {
      Site s;
      s.net = lhs_net(a.lhs);
      s.rhs = a.rhs;
      if (a.lhs->kind == ExprKind::BitSelect) s.index = a.lhs->operands[0];
      s.span = a.span;
      sites_.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < e.processes.size(); ++i) {
      const auto& p = e.processes[i];
      Site proto;
      proto.span = p.span;
      proto.clocked = p.kind == AlwaysKind::Clocked;
      proto.process = static_cast<int>(i);
      std::vector<ExprPtr> guards;
      collect_sites(p.body, guards, proto, sites_);
    }
    for (const auto& r : e.rams) {
      Site s;
      s.net = r.rdata;
      s.rhs = make_concat({make_ident(r.we), make_ident(r.waddr), make_ident(r.wdata), make_ident(r.raddr)});
      s.clocked = true;
      sites_.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) by_net_[sites_[i].net].push_back(i);
    for (const auto& r : e.state_regs) {
      if (!r.reset_net.empty()) resets_.insert(r.reset_net);
    }
    for (const auto& p : e.processes) {
      if (p.kind == AlwaysKind::Clocked) clocks_.insert(p.clock);
    }
    for (const auto& r : e.rams) clocks_.insert(r.clk);
    compute_reachability();
    compute_conditioned();
  }

  std::vector<Finding> run() {
    std::vector<Finding> out;
    io(out);
    fsm(out);
    logic(out);
    signal(out);
    return out;
  }

 private:
  std::set<std::string> site_reads(const Site& s) const {
    std::set<std::string> r;
    auto add = [&](const ExprPtr& x) {
      if (x) for (const auto& n : reads_of(x)) r.insert(n);
    };
    add(s.rhs);
    add(s.index);
    for (const auto& g : s.guards) add(g);
    return r;
  }

  void compute_reachability() {
    std::deque<std::string> q(e_.outputs.begin(), e_.outputs.end());
    reach_.insert(e_.outputs.begin(), e_.outputs.end());
    while (!q.empty()) {
      std::string n = q.front();
      q.pop_front();
      auto it = by_net_.find(n);
      if (it == by_net_.end()) continue;
      for (auto i : it->second) {
        for (const auto& r : site_reads(sites_[i])) {
          if (reach_.insert(r).second) q.push_back(r);
        }
      }
    }
  }

  void compute_conditioned() {
    for (const auto& s : sites_) {
      bool cc = has_const_compare(s.rhs) || has_const_compare(s.index);
      for (const auto& g : s.guards) cc = cc || has_const_compare(g);
      if (cc) cond_.insert(s.net);
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& s : sites_) {
        if (cond_.count(s.net)) continue;
        auto r = site_reads(s);
        if (std::any_of(r.begin(), r.end(), [&](const std::string& n) { return cond_.count(n) > 0; })) {
          cond_.insert(s.net);
          grew = true;
        }
      }
    }
  }

  EvidenceSpan span_of(const std::string& net) const {
    EvidenceSpan s{file_, 0, 0};
    auto it = by_net_.find(net);
    if (it == by_net_.end()) return s;
    for (auto i : it->second) {
      const auto& sp = sites_[i].span;
      if (!sp.valid()) continue;
      return {file_, sp.line, std::max(sp.line, sp.end_line)};
    }
    return s;
  }

  bool is_top_port(const std::string& n) const {
    const auto* f = e_.find_net(n);
    return f && (f->top_input || f->top_output);
  }

  // --- io -----------------------------------------------------------------

  bool feeds_reaching_comparator(const std::string& reg) const {
    for (const auto& s : sites_) {
      if (!reach_.count(s.net)) continue;
      std::vector<ExprPtr> exprs = s.guards;
      exprs.push_back(s.rhs);
      for (const auto& x : exprs) {
        bool hit = false;
        visit_expr(x, [&](const ExprPtr& c) {
          if (!is_const_compare(*c)) return;
          auto r = reads_of(c);
          hit = hit || std::find(r.begin(), r.end(), reg) != r.end();
        });
        if (hit) return true;
      }
    }
    return false;
  }

  static bool increments(const Site& s) {
    bool hit = false;
    visit_expr(s.rhs, [&](const ExprPtr& x) {
      if (x->kind != ExprKind::Binary) return;
      if (x->binary_op != BinaryOp::Add && x->binary_op != BinaryOp::Sub) return;
      const auto& a = x->operands[0];
      const auto& b = x->operands[1];
      bool self_a = a->kind == ExprKind::Ident && a->name == s.net;
      bool self_b = b->kind == ExprKind::Ident && b->name == s.net;
      hit = hit || (self_a && b->kind == ExprKind::Const) || (self_b && a->kind == ExprKind::Const);
    });
    return hit;
  }

  void io(std::vector<Finding>& out) const {
    std::map<std::string, std::set<std::string>> hits;  // counter -> inputs
    std::map<std::string, SourceSpan> where;
    for (const auto& s : sites_) {
      if (!s.clocked || !increments(s) || !feeds_reaching_comparator(s.net)) continue;
      std::set<std::string> seen;
      std::deque<std::string> q;
      for (const auto& g : s.guards) {
        std::set<std::string> r;
        compare_free_reads(g, r);
        for (const auto& n : r) {
          if (seen.insert(n).second) q.push_back(n);
        }
      }
      while (!q.empty()) {
        std::string n = q.front();
        q.pop_front();
        if (resets_.count(n) || clocks_.count(n)) continue;
        const auto* f = e_.find_net(n);
        if (f && f->top_input) {
          hits[s.net].insert(n);
          where[s.net] = s.span;
          continue;
        }
        auto it = by_net_.find(n);
        if (it == by_net_.end()) continue;
        for (auto i : it->second) {
          std::set<std::string> r;
          compare_free_reads(sites_[i].rhs, r);
          for (const auto& g : sites_[i].guards) compare_free_reads(g, r);
          for (const auto& m : r) {
            if (seen.insert(m).second) q.push_back(m);
          }
        }
      }
    }
    for (const auto& [reg, inputs] : hits) {
      for (const auto& in : inputs) {
        const auto& sp = where[reg];
        out.push_back({Category::Io, {in, reg}, {file_, sp.line, std::max(sp.line, sp.end_line)},
                       "input '" + in + "' advances counter '" + reg +
                           "', which is compared against a constant on a path to an output"});
      }
    }
  }

  // --- fsm ----------------------------------------------------------------

  struct ArmScan {
    bool progress = false;
    std::set<std::string> constants;
  };

  static void scan_arm(const StmtPtr& s, const std::string& state, const std::string& target,
                       const BitVec& label, std::vector<ExprPtr>& conds, ArmScan& scan) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::Assign: {
        if (lhs_net(s->lhs) != target || s->rhs->kind != ExprKind::Const) return;
        if (s->rhs->value.resized(label.width()) == label) return;
        for (const auto& c : conds) {
          visit_expr(c, [&](const ExprPtr& x) {
            if (!is_const_compare(*x)) return;
            const auto& var = x->operands[0]->kind == ExprKind::Const ? x->operands[1] : x->operands[0];
            const auto& k = x->operands[0]->kind == ExprKind::Const ? x->operands[0] : x->operands[1];
            auto r = reads_of(var);
            if (r.empty() || std::find(r.begin(), r.end(), state) != r.end()) return;
            scan.progress = true;
            scan.constants.insert(k->value.to_hex());
          });
        }
        return;
      }
      case StmtKind::Block:
        for (const auto& c : s->stmts) scan_arm(c, state, target, label, conds, scan);
        return;
      case StmtKind::If:
        conds.push_back(s->cond);
        scan_arm(s->then_s, state, target, label, conds, scan);
        scan_arm(s->else_s, state, target, label, conds, scan);
        conds.pop_back();
        return;
      case StmtKind::Case:
        for (const auto& a : s->arms) scan_arm(a.body, state, target, label, conds, scan);
        return;
    }
  }

  static void find_cases(const StmtPtr& s, const std::string& subject, std::vector<const Stmt*>& out) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::Assign: return;
      case StmtKind::Block:
        for (const auto& c : s->stmts) find_cases(c, subject, out);
        return;
      case StmtKind::If:
        find_cases(s->then_s, subject, out);
        find_cases(s->else_s, subject, out);
        return;
      case StmtKind::Case:
        if (s->subject->kind == ExprKind::Ident && s->subject->name == subject) out.push_back(s.get());
        for (const auto& a : s->arms) find_cases(a.body, subject, out);
        return;
    }
  }

  void fsm(std::vector<Finding>& out) const {
    std::set<std::string> done;
    for (const auto& s : sites_) {
      if (!s.clocked || s.process < 0 || done.count(s.net)) continue;
      const std::string& reg = s.net;
      // Candidate next-state logic: the register's own process, or the
      // combinational process producing the value it loads.
      std::vector<std::pair<int, std::string>> owners = {{s.process, reg}};
      for (auto i : by_net_.at(reg)) {
        const auto& rs = sites_[i];
        if (rs.rhs->kind != ExprKind::Ident) continue;
        auto it = by_net_.find(rs.rhs->name);
        if (it == by_net_.end()) continue;
        for (auto j : it->second) {
          const auto& ns = sites_[j];
          if (ns.process >= 0 && !ns.clocked) owners.push_back({ns.process, ns.net});
        }
      }
      std::sort(owners.begin(), owners.end());
      owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
      for (const auto& [proc, target] : owners) {
        std::vector<const Stmt*> cases;
        find_cases(e_.processes[proc].body, reg, cases);
        int arms = 0;
        std::set<std::string> constants;
        for (const Stmt* c : cases) {
          for (const auto& arm : c->arms) {
            if (arm.is_default() || arm.labels.front()->kind != ExprKind::Const) continue;
            ArmScan scan;
            std::vector<ExprPtr> conds;
            scan_arm(arm.body, reg, target, arm.labels.front()->value, conds, scan);
            if (!scan.progress) continue;
            ++arms;
            constants.insert(scan.constants.begin(), scan.constants.end());
          }
        }
        if (arms < 2 || constants.size() < 2) continue;
        done.insert(reg);
        std::vector<std::string> nets = {reg};
        if (target != reg) nets.push_back(target);
        const auto& sp = e_.processes[proc].span;
        out.push_back({Category::Fsm, nets, {file_, sp.line, std::max(sp.line, sp.end_line)},
                       "state register '" + reg + "' advances through " + std::to_string(arms) +
                           " states on matches against " + std::to_string(constants.size()) +
                           " distinct constants"});
        break;
      }
    }
  }

  // --- logic --------------------------------------------------------------

  bool suspicious_guard(const ExprPtr& g) const {
    if (has_const_compare(g)) return true;
    for (const auto& n : reads_of(g)) {
      if (cond_.count(n)) return true;
    }
    return false;
  }

  void logic(std::vector<Finding>& out) const {
    std::set<std::string> flagged;
    for (const auto& s : sites_) {
      if (!reach_.count(s.net) || flagged.count(s.net)) continue;
      std::vector<ExprPtr> guards = s.guards;
      ternary_conditions(s.rhs, guards);
      std::set<std::string> why;
      bool hit = false;
      for (const auto& g : guards) {
        if (!suspicious_guard(g)) continue;
        hit = true;
        for (const auto& n : reads_of(g)) {
          if (n != s.net) why.insert(n);
        }
      }
      if (!hit) continue;
      flagged.insert(s.net);
      std::vector<std::string> nets = {s.net};
      nets.insert(nets.end(), why.begin(), why.end());
      const auto& sp = s.span;
      out.push_back({Category::Logic, nets,
                     sp.valid() ? EvidenceSpan{file_, sp.line, std::max(sp.line, sp.end_line)} : span_of(s.net),
                     "assignment to '" + s.net +
                         "' is gated by a constant comparison or a value derived from one"});
    }
  }

  // --- signal -------------------------------------------------------------

  void signal(std::vector<Finding>& out) const {
    std::set<std::string> cand;
    for (const auto& n : cond_) {
      if (!is_top_port(n) && !clocks_.count(n)) cand.insert(n);
    }
    // (user, user is guard, consumer)
    std::vector<std::tuple<std::string, bool, std::string>> edges;
    for (const auto& s : sites_) {
      for (const auto& g : s.guards) {
        uses(g, true, [&](const std::string& n, bool) { edges.emplace_back(n, true, s.net); });
      }
      uses(s.rhs, false, [&](const std::string& n, bool g) { edges.emplace_back(n, g, s.net); });
      uses(s.index, false, [&](const std::string& n, bool g) { edges.emplace_back(n, g, s.net); });
    }
    std::set<std::string> used;
    for (const auto& [n, g, to] : edges) used.insert(n);
    for (bool shrank = true; shrank;) {
      shrank = false;
      for (const auto& [n, g, to] : edges) {
        if (g || !cand.count(n) || cand.count(to)) continue;
        cand.erase(n);
        shrank = true;
      }
    }
    for (const auto& n : cand) {
      if (!used.count(n)) continue;
      out.push_back({Category::Signal, {n}, span_of(n),
                     "'" + n + "' only steers conditionally active logic"});
    }
  }

  const ElaboratedDesign& e_;
  std::string file_;
  std::vector<Site> sites_;
  std::map<std::string, std::vector<std::size_t>> by_net_;
  std::set<std::string> resets_;
  std::set<std::string> clocks_;
  std::set<std::string> reach_;
  std::set<std::string> cond_;
};

}  // namespace

AssessmentReport assess(const ElaboratedDesign& elab, const std::string& source_name) {
  AssessmentReport r;
  r.design = source_name;
  r.top = elab.top;
  r.findings = Analyzer(elab, source_name).run();
  return r;
}

AssessmentReport assess(const RtlDesign& design, const std::string& top) {
  return assess(elaborate(design, top), design.source_name);
}

std::vector<RareNetMetric> rare_net_metrics(const ElaboratedDesign& elab, std::uint64_t seed, int cycles) {
  sim::StimulusProgram stim;
  std::set<std::string> clocks;
  for (const auto& p : elab.processes) {
    if (p.kind == AlwaysKind::Clocked) clocks.insert(p.clock);
  }
  for (const auto& r : elab.rams) clocks.insert(r.clk);
  if (!clocks.empty()) stim.clock = *clocks.begin();
  for (const auto& r : elab.state_regs) {
    if (!r.reset_net.empty()) {
      stim.reset_net = r.reset_net;
      stim.reset_cycles = 2;
      break;
    }
  }
  stim.random = sim::RandomGenerator{seed, {}, {}};
  sim::SimOptions opt;
  for (const auto& n : elab.flat_nets) {
    if (n.width == 1 && !clocks.count(n.name)) opt.record.push_back(n.name);
  }
  std::vector<RareNetMetric> out;
  if (opt.record.empty()) return out;
  auto trace = sim::simulate(elab, stim, cycles, opt);
  for (const auto& n : opt.record) {
    int idx = trace.index_of(n);
    int ones = 0;
    for (int c = 0; c < trace.cycles; ++c) ones += trace.values[c][idx].bit(0) ? 1 : 0;
    out.push_back({n, static_cast<double>(ones) / cycles, cycles, seed});
  }
  return out;
}

std::string report_to_json(const AssessmentReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["design"] = r.design;
  j["top"] = r.top;
  FlagRow f = r.flags();
  j["flags"] = {{"io", f.io}, {"fsm", f.fsm}, {"logic", f.logic}, {"signal", f.signal}};
  j["findings"] = ordered_json::array();
  for (const auto& x : r.findings) {
    j["findings"].push_back({{"category", to_string(x.category)},
                             {"nets", x.nets},
                             {"span", {{"file", x.span.file},
                                       {"line_start", x.span.line_start},
                                       {"line_end", x.span.line_end}}},
                             {"rationale", x.rationale}});
  }
  j["metrics"] = ordered_json::array();
  for (const auto& m : r.metrics) {
    j["metrics"].push_back({{"net", m.net}, {"p", m.p}, {"cycles", m.cycles}, {"seed", m.seed}});
  }
  return j.dump(2) + "\n";
}

AssessmentReport report_from_json(const std::string& text) {
  static const std::map<std::string, Category> cats = {
      {"io", Category::Io}, {"fsm", Category::Fsm}, {"logic", Category::Logic}, {"signal", Category::Signal}};
  AssessmentReport r;
  try {
    auto j = nlohmann::json::parse(text);
    r.design = j.value("design", "");
    r.top = j.value("top", "");
    for (const auto& x : j.at("findings")) {
      Finding f;
      auto c = cats.find(x.at("category").get<std::string>());
      if (c == cats.end()) throw Error(ErrorCode::InvalidSpec, "unknown category");
      f.category = c->second;
      f.nets = x.at("nets").get<std::vector<std::string>>();
      const auto& s = x.at("span");
      f.span = {s.at("file").get<std::string>(), s.at("line_start").get<int>(), s.at("line_end").get<int>()};
      f.rationale = x.at("rationale").get<std::string>();
      r.findings.push_back(std::move(f));
    }
    if (j.contains("metrics")) {
      for (const auto& m : j.at("metrics")) {
        r.metrics.push_back({m.at("net").get<std::string>(), m.at("p").get<double>(),
                             m.at("cycles").get<int>(), m.at("seed").get<std::uint64_t>()});
      }
    }
    if (j.contains("flags")) {
      const auto& fl = j.at("flags");
      FlagRow want{fl.at("io").get<bool>(), fl.at("fsm").get<bool>(), fl.at("logic").get<bool>(),
                   fl.at("signal").get<bool>()};
      if (!(want == r.flags())) throw Error(ErrorCode::InvalidSpec, "flags disagree with findings");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("report JSON: ") + e.what());
  }
  return r;
}

}  // namespace htkit::assess
