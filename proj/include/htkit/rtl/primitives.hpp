// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace htkit::rtl {

/// An externally defined module the toolkit models natively.
struct Primitive {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// Synchronous dual-port RAM: one write port and one read port sharing `clk`.
/// A read addressing the location written in the same cycle returns old data.
/// Address and data widths are taken from the connected nets.
inline constexpr const char* kDualPortRam = "dual_port_ram";

const Primitive* find_primitive(const std::string& name);

}  // namespace htkit::rtl
