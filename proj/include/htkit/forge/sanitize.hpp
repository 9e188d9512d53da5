// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <string>
#include <vector>

namespace htkit::forge {

/// One hold assignment added to a combinational process.
struct SanitizeFix {
  int line = 0;      // line of the construct that gained the arm
  std::string net;
  std::string kind;  // "default_arm", "else_branch" or "initial_hold"
  std::string hold;  // emitted right-hand side
};

struct SanitizeResult {
  rtl::RtlModule module;
  std::vector<SanitizeFix> fixes;
  /// Nets left incomplete because no hold value could be inferred.
  std::vector<std::string> unresolved;
};

/// Completes every combinational process so each net it writes is assigned
/// on all paths. A next-state net (the sole source of a register R, in a
/// process that reads R) holds R's reset constant when one exists, else R.
/// Any other net that loads a register holds that register's value. Other
/// nets raise Error(CannotInferHoldValue). Clean modules come back unchanged.
SanitizeResult sanitize_fsm(const rtl::RtlModule& module);

/// Same, but nets without an inferable hold value are listed in
/// `unresolved` instead of raising; all other fixes are applied.
SanitizeResult sanitize_fsm_partial(const rtl::RtlModule& module);

}  // namespace htkit::forge
