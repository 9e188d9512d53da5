// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/primitives.hpp"

namespace htkit::rtl {

const Primitive* find_primitive(const std::string& name) {
  static const Primitive ram{kDualPortRam, {"clk", "we", "waddr", "wdata", "raddr"}, {"rdata"}};
  return name == ram.name ? &ram : nullptr;
}

}  // namespace htkit::rtl
