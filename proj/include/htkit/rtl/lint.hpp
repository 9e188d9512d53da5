// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace htkit::rtl {

enum class LintRule { LatchInference, MultiDriver, UnreachableArm, WidthMismatch };

const char* to_string(LintRule rule);

struct LintFinding {
  LintRule rule = LintRule::LatchInference;
  SourceSpan location;
  std::string net;  // implicated net, empty when the rule is not net-specific
  std::string message;
};

std::vector<LintFinding> lint(const RtlModule& module);

/// Nets assigned in full on every control path through `s`. Writes through a
/// select never count, and a case without a default counts only when its
/// distinct labels enumerate all 2^w subject values.
std::set<std::string> definitely_assigned(const StmtPtr& s, const RtlModule& module);

/// Value of a constant case label or localparam reference.
std::optional<BitVec> constant_value(const ExprPtr& e, const RtlModule& module);

/// True when the distinct label values of `c` cover its whole subject range.
bool case_is_full(const Stmt& c, const RtlModule& module);

}  // namespace htkit::rtl
