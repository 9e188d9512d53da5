// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/width.hpp"

#include <algorithm>

namespace htkit::rtl {

WidthLookup module_widths(const RtlModule& m) {
  return [&m](const std::string& n) -> std::optional<int> {
    if (auto w = m.signal_width(n)) return w;
    return m.param_width(n);
  };
}

bool is_unsized(const ExprPtr& e, const WidthLookup& widths) {
  if (e->kind == ExprKind::Const) return !e->sized;
  if (e->kind == ExprKind::Ident) return !widths(e->name).has_value();
  return false;
}

int self_width(const ExprPtr& e, const WidthLookup& widths) {
  switch (e->kind) {
    case ExprKind::Const:
      return e->sized ? e->value.width() : std::max(32, e->value.bit_length());
    case ExprKind::Ident:
      return widths(e->name).value_or(32);
    case ExprKind::Unary:
      return e->unary_op == UnaryOp::LogNot ? 1 : self_width(e->operands[0], widths);
    case ExprKind::Binary:
      if (is_comparison(e->binary_op) || e->binary_op == BinaryOp::LogAnd ||
          e->binary_op == BinaryOp::LogOr) {
        return 1;
      }
      return std::max(self_width(e->operands[0], widths), self_width(e->operands[1], widths));
    case ExprKind::Ternary:
      return std::max(self_width(e->operands[1], widths), self_width(e->operands[2], widths));
    case ExprKind::BitSelect:
      return 1;
    case ExprKind::PartSelect:
      return e->msb - e->lsb + 1;
    case ExprKind::Concat: {
      int w = 0;
      for (const auto& p : e->operands) w += self_width(p, widths);
      return w;
    }
  }
  return 1;
}

}  // namespace htkit::rtl
