// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/bitvec.hpp"
#include "htkit/errors.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace htkit::rtl {

// Syntax trees are immutable and shared; transforms build new nodes and reuse
// untouched subtrees. Equality is structural and ignores source spans.

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

enum class ExprKind { Const, Ident, Unary, Binary, Ternary, BitSelect, PartSelect, Concat };

enum class UnaryOp { BitNot, LogNot };

enum class BinaryOp { Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, And, Or, Xor, LogAnd, LogOr };

bool is_comparison(BinaryOp op);
const char* to_string(BinaryOp op);
const char* to_string(UnaryOp op);

struct Expr {
  ExprKind kind = ExprKind::Const;

  // Const
  BitVec value;
  bool sized = true;
  char radix = 'd';  // 'b', 'h' or 'd'; formatting only

  // Ident / BitSelect / PartSelect base
  std::string name;

  UnaryOp unary_op = UnaryOp::BitNot;
  BinaryOp binary_op = BinaryOp::Eq;

  // Unary: [a]; Binary: [a, b]; Ternary: [cond, then, else]; BitSelect: [index];
  // Concat: parts, most significant first.
  std::vector<ExprPtr> operands;

  // PartSelect
  int msb = 0;
  int lsb = 0;

  SourceSpan span;
};

bool operator==(const Expr& a, const Expr& b);
bool same_expr(const ExprPtr& a, const ExprPtr& b);

ExprPtr make_const(BitVec value, bool sized = true, char radix = 'd');
ExprPtr make_const(int width, std::uint64_t value, char radix = 'd');
ExprPtr make_unsized(std::uint64_t value);
ExprPtr make_ident(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr a);
ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b);
ExprPtr make_ternary(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr make_bit_select(std::string name, ExprPtr index);
ExprPtr make_part_select(std::string name, int msb, int lsb);
ExprPtr make_concat(std::vector<ExprPtr> parts);

enum class StmtKind { Block, If, Case, Assign };

struct CaseArm {
  std::vector<ExprPtr> labels;  // empty for the default arm
  StmtPtr body;
  SourceSpan span;

  bool is_default() const { return labels.empty(); }
};

struct Stmt {
  StmtKind kind = StmtKind::Block;

  std::vector<StmtPtr> stmts;  // Block

  ExprPtr cond;     // If
  StmtPtr then_s;   // If
  StmtPtr else_s;   // If, may be null

  ExprPtr subject;             // Case
  std::vector<CaseArm> arms;   // Case

  ExprPtr lhs;                 // Assign: Ident, BitSelect or PartSelect
  ExprPtr rhs;                 // Assign
  bool nonblocking = false;    // Assign

  SourceSpan span;
};

bool operator==(const Stmt& a, const Stmt& b);
bool same_stmt(const StmtPtr& a, const StmtPtr& b);

StmtPtr make_block(std::vector<StmtPtr> stmts);
StmtPtr make_if(ExprPtr cond, StmtPtr then_s, StmtPtr else_s = nullptr);
StmtPtr make_case(ExprPtr subject, std::vector<CaseArm> arms);
StmtPtr make_assign(ExprPtr lhs, ExprPtr rhs, bool nonblocking);

enum class Direction { Input, Output };
enum class NetKind { Wire, Reg };

struct PortDecl {
  std::string name;
  Direction direction = Direction::Input;
  NetKind kind = NetKind::Wire;
  int width = 1;
  SourceSpan span;
};

struct NetDecl {
  std::string name;
  NetKind kind = NetKind::Wire;
  int width = 1;
  SourceSpan span;
};

struct LocalParam {
  std::string name;
  ExprPtr value;
  SourceSpan span;
};

/// One `localparam [w] A = .., B = ..;` declaration.
struct LocalParamGroup {
  std::optional<int> width;
  std::vector<LocalParam> entries;
  SourceSpan span;
};

struct ContinuousAssign {
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span;
};

enum class AlwaysKind { Clocked, Combinational };

struct AlwaysBlock {
  AlwaysKind kind = AlwaysKind::Combinational;
  std::string clock;                    // Clocked: posedge signal
  std::vector<std::string> sensitivity;  // Combinational: empty means @(*)
  StmtPtr body;
  SourceSpan span;
};

struct PortConnection {
  std::string port;
  ExprPtr expr;  // null when left open: .p()
  SourceSpan span;
};

struct ModuleInst {
  std::string module_name;
  std::string instance_name;
  std::vector<PortConnection> connections;
  SourceSpan span;
};

struct RtlModule {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<NetDecl> nets;
  std::vector<LocalParamGroup> params;
  std::vector<ContinuousAssign> assigns;
  std::vector<AlwaysBlock> processes;
  std::vector<ModuleInst> instances;
  SourceSpan span;

  const PortDecl* find_port(const std::string& n) const;
  const NetDecl* find_net(const std::string& n) const;
  const LocalParam* find_param(const std::string& n) const;
  std::optional<int> param_width(const std::string& n) const;
  /// Declared width of a port or net.
  std::optional<int> signal_width(const std::string& n) const;
  bool is_reg(const std::string& n) const;
  bool declares(const std::string& n) const;
};

struct RtlDesign {
  std::vector<RtlModule> modules;
  std::string source_name;

  const RtlModule* find_module(const std::string& n) const;
  RtlModule* find_module(const std::string& n);
};

bool operator==(const PortDecl& a, const PortDecl& b);
bool operator==(const NetDecl& a, const NetDecl& b);
bool operator==(const LocalParamGroup& a, const LocalParamGroup& b);
bool operator==(const ContinuousAssign& a, const ContinuousAssign& b);
bool operator==(const AlwaysBlock& a, const AlwaysBlock& b);
bool operator==(const ModuleInst& a, const ModuleInst& b);
bool operator==(const RtlModule& a, const RtlModule& b);
/// Structural equality; the source name is not compared.
bool operator==(const RtlDesign& a, const RtlDesign& b);

// ---------------------------------------------------------------------------
// Tree helpers shared by the analyses and transforms.

/// Name of the net written by an assignment target.
const std::string& lhs_net(const ExprPtr& lhs);

/// Identifiers read by an expression, in first-occurrence order.
void collect_reads(const ExprPtr& e, std::vector<std::string>& out);
std::vector<std::string> reads_of(const ExprPtr& e);

/// Nets written anywhere in a statement, in first-occurrence order.
void collect_writes(const StmtPtr& s, std::vector<std::string>& out);

/// Nets read anywhere in a statement: conditions, case subjects and labels,
/// right-hand sides and select indices on targets.
void collect_stmt_reads(const StmtPtr& s, std::vector<std::string>& out);

using RenameFn = std::function<std::string(const std::string&)>;

/// Rewrites every identifier (including select bases) through `fn`.
ExprPtr rename_expr(const ExprPtr& e, const RenameFn& fn);
StmtPtr rename_stmt(const StmtPtr& s, const RenameFn& fn);

/// Replaces identifier reads by the expression `fn` returns (null keeps the
/// read). Assignment targets are left untouched.
using SubstFn = std::function<ExprPtr(const std::string&)>;
ExprPtr substitute_expr(const ExprPtr& e, const SubstFn& fn);
StmtPtr substitute_stmt(const StmtPtr& s, const SubstFn& fn);

/// Calls `fn` on every expression node reachable from `s`, including nested
/// operands.
void visit_exprs(const StmtPtr& s, const std::function<void(const ExprPtr&)>& fn);
void visit_expr(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn);

}  // namespace htkit::rtl
