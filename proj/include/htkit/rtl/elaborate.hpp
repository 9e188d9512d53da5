// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace htkit::rtl {

/// Flat net. Names below the top carry their instance path, e.g. "u1.state".
struct FlatNet {
  std::string name;
  int width = 1;
  bool top_input = false;
  bool top_output = false;
};

enum class DriverKind { Input, Assign, Combinational, Clocked, Ram, Tie };

const char* to_string(DriverKind kind);

struct Driver {
  DriverKind kind = DriverKind::Tie;
  int index = -1;  // into assigns, processes or rams
};

/// Continuous assignment in flat names; instance port bindings lower to these.
struct FlatAssign {
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span;
  std::string scope;  // instance path of the defining module, "" at top
};

struct FlatProcess {
  AlwaysKind kind = AlwaysKind::Combinational;
  std::string clock;
  StmtPtr body;
  std::vector<std::string> writes;
  std::vector<std::string> reads;
  SourceSpan span;
  std::string scope;
};

/// Instance of the built-in dual-port RAM. Port nets are flat names such as
/// "u_mem.waddr"; `rdata` is a register updated at the clock edge.
struct FlatRam {
  std::string instance;
  std::string clk, we, waddr, wdata, raddr, rdata;
  int addr_width = 1;
  int data_width = 1;
};

struct StateReg {
  std::string net;
  int width = 1;
  std::string reset_net;            // empty when no reset idiom was recognized
  std::optional<BitVec> reset_value;
};

struct ElaboratedDesign {
  std::string top;
  std::vector<FlatNet> flat_nets;  // declaration order, depth-first
  std::vector<FlatAssign> assigns;
  std::vector<FlatProcess> processes;
  std::vector<FlatRam> rams;
  std::map<std::string, Driver> drivers;
  std::vector<StateReg> state_regs;
  /// Indices into the combinational nodes (assigns then processes, the
  /// latter offset by assigns.size()) in evaluation order.
  std::vector<int> comb_order;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const FlatNet* find_net(const std::string& name) const;
  int width_of(const std::string& name) const;
};

/// Flattens the hierarchy below `top`. Localparams are substituted by their
/// values, unconnected child inputs are tied to zero, and every flat net
/// ends up with exactly one driver or is a top-level input.
ElaboratedDesign elaborate(const RtlDesign& design, const std::string& top);

struct CellCount {
  int comb_ops = 0;
  int reg_bits = 0;
};

/// Operator nodes in the flat design and bits held in clocked registers.
CellCount cell_count(const ElaboratedDesign& elab);

}  // namespace htkit::rtl
