// SPDX-License-Identifier: Apache-2.0
#include "htkit/sim/simulator.hpp"

#include "htkit/errors.hpp"
#include "htkit/rtl/width.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace htkit::sim {

using rtl::BinaryOp;
using rtl::ExprKind;
using rtl::ExprPtr;
using rtl::StmtKind;
using rtl::StmtPtr;
using rtl::UnaryOp;

namespace {

struct CExpr {
  ExprKind kind = ExprKind::Const;
  UnaryOp uop = UnaryOp::BitNot;
  BinaryOp bop = BinaryOp::Eq;
  int net = -1;
  int self = 1;  // self-determined width
  int msb = 0, lsb = 0;
  BitVec value;
  std::vector<CExpr> kids;
};

struct CTarget {
  int net = -1;
  ExprKind kind = ExprKind::Ident;
  int msb = 0, lsb = 0;
  std::vector<CExpr> index;  // BitSelect index, at most one
  int width = 1;
};

struct CArm {
  std::vector<CExpr> labels;  // empty for default
  int body = -1;
};

struct CStmt {
  StmtKind kind = StmtKind::Block;
  std::vector<int> stmts;
  CExpr cond;
  int then_s = -1, else_s = -1;
  CExpr subject;
  std::vector<CArm> arms;
  CTarget lhs;
  CExpr rhs;
  bool nonblocking = false;
};

struct Pending {
  const CTarget* target;
  BitVec value;
  int index;  // evaluated bit-select index
};

class Machine {
 public:
  explicit Machine(const rtl::ElaboratedDesign& elab) : elab_(elab) {
    for (std::size_t i = 0; i < elab.flat_nets.size(); ++i) {
      index_[elab.flat_nets[i].name] = static_cast<int>(i);
      widths_.push_back(elab.flat_nets[i].width);
    }
    lookup_ = [this](const std::string& n) -> std::optional<int> {
      auto it = index_.find(n);
      if (it == index_.end()) return std::nullopt;
      return widths_[it->second];
    };
    for (const auto& a : elab.assigns) {
      assigns_.push_back({target(a.lhs), compile(a.rhs)});
    }
    for (const auto& p : elab.processes) {
      int root = compile_stmt(p.body);
      (p.kind == rtl::AlwaysKind::Clocked ? clocked_ : comb_by_process_)[&p - elab.processes.data()] =
          root;
    }
    for (const auto& r : elab.rams) {
      Ram ram;
      ram.we = index_.at(r.we);
      ram.waddr = index_.at(r.waddr);
      ram.wdata = index_.at(r.wdata);
      ram.raddr = index_.at(r.raddr);
      ram.rdata = index_.at(r.rdata);
      ram.mem.assign(std::size_t{1} << r.addr_width, BitVec(r.data_width));
      rams_.push_back(std::move(ram));
    }
    values_.reserve(widths_.size());
    for (int w : widths_) values_.emplace_back(w);
    for (const auto& r : elab.state_regs) {
      if (r.reset_value) values_[index_.at(r.net)] = r.reset_value->resized(r.width);
    }
  }

  int net(const std::string& n) const {
    auto it = index_.find(n);
    return it == index_.end() ? -1 : it->second;
  }
  int width(int net) const { return widths_[net]; }
  void set(int net, const BitVec& v) { values_[net] = v.resized(widths_[net]); }
  const BitVec& get(int net) const { return values_[net]; }

  void settle() {
    const int na = static_cast<int>(assigns_.size());
    for (int node : elab_.comb_order) {
      if (node < na) {
        const auto& a = assigns_[node];
        write(a.first, eval(a.second, a.first.width), 0);
      } else {
        exec(comb_by_process_.at(node - na), nullptr);
      }
    }
  }

  void clock_edge() {
    std::vector<Pending> pending;
    for (const auto& [proc, root] : clocked_) exec(root, &pending);
    std::vector<std::pair<int, BitVec>> ram_reads;
    for (auto& r : rams_) {
      std::size_t ra = values_[r.raddr].to_u64() & (r.mem.size() - 1);
      ram_reads.emplace_back(r.rdata, r.mem[ra]);
      if (!values_[r.we].is_zero()) {
        std::size_t wa = values_[r.waddr].to_u64() & (r.mem.size() - 1);
        r.mem[wa] = values_[r.wdata].resized(r.mem[wa].width());
      }
    }
    for (const auto& p : pending) write(*p.target, p.value, p.index);
    for (const auto& [n, v] : ram_reads) set(n, v);
  }

 private:
  struct Ram {
    int we, waddr, wdata, raddr, rdata;
    std::vector<BitVec> mem;
  };

  CExpr compile(const ExprPtr& e) {
    CExpr c;
    c.kind = e->kind;
    c.self = rtl::self_width(e, lookup_);
    switch (e->kind) {
      case ExprKind::Const:
        c.value = e->value;
        c.self = std::max(c.self, e->value.width());
        break;
      case ExprKind::Ident:
      case ExprKind::BitSelect:
      case ExprKind::PartSelect:
        c.net = index_.at(e->name);
        c.msb = e->msb;
        c.lsb = e->lsb;
        break;
      case ExprKind::Unary:
        c.uop = e->unary_op;
        break;
      case ExprKind::Binary:
        c.bop = e->binary_op;
        break;
      default:
        break;
    }
    for (const auto& o : e->operands) c.kids.push_back(compile(o));
    return c;
  }

  CTarget target(const ExprPtr& lhs) {
    CTarget t;
    t.net = index_.at(lhs->name);
    t.kind = lhs->kind;
    t.msb = lhs->msb;
    t.lsb = lhs->lsb;
    if (lhs->kind == ExprKind::BitSelect) t.index.push_back(compile(lhs->operands[0]));
    t.width = lhs->kind == ExprKind::Ident       ? widths_[t.net]
              : lhs->kind == ExprKind::PartSelect ? lhs->msb - lhs->lsb + 1
                                                  : 1;
    return t;
  }

  int compile_stmt(const StmtPtr& s) {
    CStmt c;
    c.kind = s->kind;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& x : s->stmts) c.stmts.push_back(compile_stmt(x));
        break;
      case StmtKind::If:
        c.cond = compile(s->cond);
        c.then_s = compile_stmt(s->then_s);
        if (s->else_s) c.else_s = compile_stmt(s->else_s);
        break;
      case StmtKind::Case:
        c.subject = compile(s->subject);
        for (const auto& a : s->arms) {
          CArm arm;
          for (const auto& l : a.labels) arm.labels.push_back(compile(l));
          arm.body = compile_stmt(a.body);
          c.arms.push_back(std::move(arm));
        }
        break;
      case StmtKind::Assign:
        c.lhs = target(s->lhs);
        c.rhs = compile(s->rhs);
        c.nonblocking = s->nonblocking;
        break;
    }
    stmts_.push_back(std::move(c));
    return static_cast<int>(stmts_.size()) - 1;
  }

  static BitVec flag(bool b, int w) { return BitVec(w, b ? 1 : 0); }

  // Result has width max(self, ctx); context-determined operands are
  // evaluated at that width, self-determined ones zero-extended.
  BitVec eval(const CExpr& e, int ctx) const {
    const int w = std::max(e.self, ctx);
    switch (e.kind) {
      case ExprKind::Const:
        return e.value.resized(w);
      case ExprKind::Ident:
        return values_[e.net].resized(w);
      case ExprKind::BitSelect: {
        BitVec idx = eval(e.kids[0], 0);
        bool b = idx.fits_u64() && idx.to_u64() < static_cast<std::uint64_t>(widths_[e.net]) &&
                 values_[e.net].bit(static_cast<int>(idx.to_u64()));
        return flag(b, w);
      }
      case ExprKind::PartSelect:
        return values_[e.net].slice(e.msb, e.lsb).resized(w);
      case ExprKind::Concat: {
        BitVec acc = eval(e.kids[0], 0).resized(e.kids[0].self);
        for (std::size_t i = 1; i < e.kids.size(); ++i) {
          acc = BitVec::concat(acc, eval(e.kids[i], 0).resized(e.kids[i].self));
        }
        return acc.resized(w);
      }
      case ExprKind::Unary:
        if (e.uop == UnaryOp::LogNot) return flag(eval(e.kids[0], 0).is_zero(), w);
        return ~eval(e.kids[0], w);
      case ExprKind::Ternary:
        return eval(e.kids[0], 0).is_zero() ? eval(e.kids[2], w) : eval(e.kids[1], w);
      case ExprKind::Binary:
        break;
    }
    const CExpr& a = e.kids[0];
    const CExpr& b = e.kids[1];
    switch (e.bop) {
      case BinaryOp::LogAnd:
        return flag(!eval(a, 0).is_zero() && !eval(b, 0).is_zero(), w);
      case BinaryOp::LogOr:
        return flag(!eval(a, 0).is_zero() || !eval(b, 0).is_zero(), w);
      case BinaryOp::Add: return eval(a, w) + eval(b, w);
      case BinaryOp::Sub: return eval(a, w) - eval(b, w);
      case BinaryOp::And: return eval(a, w) & eval(b, w);
      case BinaryOp::Or: return eval(a, w) | eval(b, w);
      case BinaryOp::Xor: return eval(a, w) ^ eval(b, w);
      default:
        break;
    }
    const int cw = std::max(a.self, b.self);
    int c = BitVec::compare(eval(a, cw), eval(b, cw));
    switch (e.bop) {
      case BinaryOp::Eq: return flag(c == 0, w);
      case BinaryOp::Ne: return flag(c != 0, w);
      case BinaryOp::Lt: return flag(c < 0, w);
      case BinaryOp::Le: return flag(c <= 0, w);
      case BinaryOp::Gt: return flag(c > 0, w);
      case BinaryOp::Ge: return flag(c >= 0, w);
      default: return flag(false, w);
    }
  }

  void write(const CTarget& t, const BitVec& v, int index) {
    switch (t.kind) {
      case ExprKind::PartSelect:
        values_[t.net].set_slice(t.msb, t.lsb, v);
        break;
      case ExprKind::BitSelect:
        if (index >= 0) values_[t.net].set_bit(index, v.bit(0));
        break;
      default:
        values_[t.net] = v.resized(widths_[t.net]);
        break;
    }
  }

  int select_index(const CTarget& t) const {
    if (t.index.empty()) return 0;
    BitVec idx = eval(t.index[0], 0);
    if (!idx.fits_u64() || idx.to_u64() >= static_cast<std::uint64_t>(widths_[t.net])) return -1;
    return static_cast<int>(idx.to_u64());
  }

  void exec(int id, std::vector<Pending>* pending) {
    const CStmt& s = stmts_[id];
    switch (s.kind) {
      case StmtKind::Block:
        for (int c : s.stmts) exec(c, pending);
        return;
      case StmtKind::If:
        if (!eval(s.cond, 0).is_zero()) {
          exec(s.then_s, pending);
        } else if (s.else_s >= 0) {
          exec(s.else_s, pending);
        }
        return;
      case StmtKind::Case: {
        BitVec subj = eval(s.subject, 0);
        const CArm* chosen = nullptr;
        for (const auto& arm : s.arms) {
          if (arm.labels.empty()) {
            if (!chosen) chosen = &arm;
            continue;
          }
          for (const auto& l : arm.labels) {
            int cw = std::max(s.subject.self, l.self);
            if (BitVec::compare(subj.resized(cw), eval(l, cw)) == 0) {
              exec(arm.body, pending);
              return;
            }
          }
        }
        if (chosen) exec(chosen->body, pending);
        return;
      }
      case StmtKind::Assign: {
        BitVec v = eval(s.rhs, s.lhs.width).resized(s.lhs.width);
        int index = select_index(s.lhs);
        if (s.nonblocking && pending) {
          pending->push_back({&s.lhs, std::move(v), index});
        } else {
          write(s.lhs, v, index);
        }
        return;
      }
    }
  }

  const rtl::ElaboratedDesign& elab_;
  std::map<std::string, int> index_;
  std::vector<int> widths_;
  rtl::WidthLookup lookup_;
  std::vector<std::pair<CTarget, CExpr>> assigns_;
  std::vector<CStmt> stmts_;
  std::map<long, int> clocked_;          // process index -> root statement
  std::map<long, int> comb_by_process_;  // process index -> root statement
  std::vector<Ram> rams_;
  std::vector<BitVec> values_;
};

struct InputPlan {
  int net = -1;
  std::string name;
  int width = 1;
  bool random = false;
  InputRange range;
  const ValueGenerator* generator = nullptr;
  std::vector<const Drive*> drives;  // sorted by cycle
  std::size_t next_drive = 0;
  BitVec held;
};

}  // namespace

SimTrace simulate(const rtl::ElaboratedDesign& elab, const StimulusProgram& stim, int cycles,
                  const SimOptions& options) {
  if (cycles < 1) throw Error(ErrorCode::BadStimulus, "cycles must be >= 1");
  Machine m(elab);

  auto require_input = [&](const std::string& n) {
    if (std::find(elab.inputs.begin(), elab.inputs.end(), n) == elab.inputs.end()) {
      throw Error(ErrorCode::UnknownInput, "'" + n + "' is not a top-level input");
    }
  };
  std::vector<InputPlan> plans;
  std::map<std::string, std::size_t> plan_of;
  std::vector<std::string> sorted_inputs = elab.inputs;
  std::sort(sorted_inputs.begin(), sorted_inputs.end());
  for (const auto& n : sorted_inputs) {
    InputPlan p;
    p.name = n;
    p.net = m.net(n);
    p.width = m.width(p.net);
    p.held = BitVec(p.width);
    p.range = {BitVec(p.width), BitVec::ones(p.width)};
    plan_of[n] = plans.size();
    plans.push_back(std::move(p));
  }
  for (const auto& d : stim.drives) {
    require_input(d.input);
    auto& p = plans[plan_of[d.input]];
    if (d.value.bit_length() > p.width) {
      throw Error(ErrorCode::BadStimulus, "value for '" + d.input + "' exceeds its width");
    }
    p.drives.push_back(&d);
  }
  for (auto& p : plans) {
    std::stable_sort(p.drives.begin(), p.drives.end(),
                     [](const Drive* a, const Drive* b) { return a->cycle < b->cycle; });
  }
  for (const auto& [n, g] : stim.generators) {
    require_input(n);
    plans[plan_of[n]].generator = &g;
  }
  if (!stim.reset_net.empty()) require_input(stim.reset_net);
  if (stim.random) {
    for (const auto& [n, r] : stim.random->ranges) {
      require_input(n);
      auto& p = plans[plan_of[n]];
      if (r.hi.bit_length() > p.width) {
        throw Error(ErrorCode::BadStimulus, "range for '" + n + "' exceeds its width");
      }
      p.range = {r.lo.resized(p.width), r.hi.resized(p.width)};
    }
    for (auto& p : plans) {
      bool excluded = std::count(stim.random->exclude.begin(), stim.random->exclude.end(), p.name);
      p.random = !excluded && p.name != stim.clock && p.name != stim.reset_net;
    }
  }
  XorShift64Star rng(stim.random ? stim.random->seed : 0);

  std::vector<int> recorded;
  SimTrace trace;
  if (options.record.empty()) {
    for (std::size_t i = 0; i < elab.flat_nets.size(); ++i) recorded.push_back(static_cast<int>(i));
  } else {
    for (const auto& n : options.record) {
      int i = m.net(n);
      if (i < 0) throw Error(ErrorCode::UnknownNet, "cannot record unknown net '" + n + "'");
      recorded.push_back(i);
    }
  }
  for (int i : recorded) {
    trace.names.push_back(elab.flat_nets[i].name);
    trace.widths.push_back(elab.flat_nets[i].width);
  }
  trace.cycles = cycles;
  trace.values.reserve(cycles);

  const int clock_net = m.net(stim.clock);
  for (int t = 0; t < cycles; ++t) {
    for (auto& p : plans) {
      BitVec drawn = p.random ? rng.uniform(p.range.lo, p.range.hi, p.width) : BitVec(p.width);
      const Drive* now = nullptr;
      while (p.next_drive < p.drives.size() && p.drives[p.next_drive]->cycle <= t) {
        const Drive* d = p.drives[p.next_drive++];
        p.held = d->value.resized(p.width);
        if (d->cycle == t) now = d;
      }
      BitVec v(p.width);
      if (now) {
        v = p.held;
      } else if (p.name == stim.reset_net && p.drives.empty()) {
        v = BitVec(p.width, t < stim.reset_cycles ? 1 : 0);
      } else if (p.generator) {
        if (p.generator->kind == ValueGenerator::Kind::Constant) {
          v = p.generator->value.resized(p.width);
        } else {
          v = p.generator->value.resized(p.width) + BitVec(p.width, static_cast<std::uint64_t>(t));
        }
      } else if (p.random) {
        v = drawn;
      } else if (p.name == stim.reset_net && t < stim.reset_cycles && p.next_drive == 0) {
        v = BitVec(p.width, 1);
      } else {
        v = p.held;
      }
      if (p.net == clock_net) v = BitVec(p.width, 1);
      m.set(p.net, v);
    }
    m.settle();
    m.clock_edge();
    m.settle();
    std::vector<BitVec> row;
    row.reserve(recorded.size());
    for (int i : recorded) row.push_back(m.get(i));
    trace.values.push_back(std::move(row));
  }
  return trace;
}

}  // namespace htkit::sim
