// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <functional>
#include <optional>
#include <string>

namespace htkit::rtl {

/// Resolves a declared identifier to its width; nullopt for unsized constants.
using WidthLookup = std::function<std::optional<int>(const std::string&)>;

WidthLookup module_widths(const RtlModule& m);

/// True for bare decimals and identifiers bound to unsized localparams. Such
/// operands adopt the width of the other side of a comparison.
bool is_unsized(const ExprPtr& e, const WidthLookup& widths);

/// Self-determined width. Unsized operands count as 32 bits or their
/// significant length, whichever is larger.
int self_width(const ExprPtr& e, const WidthLookup& widths);

}  // namespace htkit::rtl
