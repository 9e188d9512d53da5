// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/sim/trace.hpp"

#include <string>

namespace htkit::sim {

/// Value change dump with one 1ns timestep per cycle. Dotted net names are
/// nested into $scope blocks below `scope`.
std::string emit_vcd(const SimTrace& trace, const std::string& scope);

/// Minimal reader for dumps produced by emit_vcd (and similar two-value
/// dumps). Names are rebuilt with dots, without the outermost scope.
SimTrace read_vcd(const std::string& text);

}  // namespace htkit::sim
