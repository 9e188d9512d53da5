// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <string>

namespace htkit::rtl {

/// Prints a design in the accepted subset. Output is a pure function of the
/// tree: modules in declaration order, and within a module localparams, nets,
/// continuous assigns, processes, then instances. Nested operators are always
/// parenthesized, so reparsing yields the same tree.
std::string emit_verilog(const RtlDesign& design);
std::string emit_module(const RtlModule& module);
std::string emit_expr(const ExprPtr& e);
std::string emit_const(const Expr& c);

}  // namespace htkit::rtl
