// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <string>
#include <string_view>

namespace htkit::rtl {

/// Parses the supported synthesizable Verilog subset.
///
/// The accepted language is Verilog-2001 flavored: ANSI port lists,
/// wire/reg declarations with `[msb:0]` ranges, localparams, continuous
/// assigns, `always @(posedge clk)` with nonblocking assigns, `always @(*)`
/// or `always @(a or b)` with blocking assigns, if/else, case/default,
/// sized constants, concatenation, bit/part selects and named-port
/// instantiation. Anything else raises UnsupportedConstruct rather than being
/// silently approximated.
///
/// Semantic checks run after parsing: unique names, declared identifiers,
/// wire/reg target kinds, assignment style per process kind, and one driver
/// per net (MultiDriverError).
RtlDesign parse_verilog(std::string_view source, std::string source_name = "");

}  // namespace htkit::rtl
