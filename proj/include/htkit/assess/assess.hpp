// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"
#include "htkit/rtl/elaborate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace htkit::assess {

enum class Category { Io, Fsm, Logic, Signal };

const char* to_string(Category c);

struct EvidenceSpan {
  std::string file;
  int line_start = 0;
  int line_end = 0;
};

struct Finding {
  Category category = Category::Logic;
  std::vector<std::string> nets;  // flat names
  EvidenceSpan span;
  std::string rationale;
};

struct FlagRow {
  bool io = false;
  bool fsm = false;
  bool logic = false;
  bool signal = false;

  bool operator==(const FlagRow&) const = default;
};

struct RareNetMetric {
  std::string net;
  double p = 0.0;
  int cycles = 0;
  std::uint64_t seed = 0;
};

struct AssessmentReport {
  std::string design;
  std::string top;
  std::vector<Finding> findings;
  std::vector<RareNetMetric> metrics;

  /// Derived from the findings, so it cannot disagree with them.
  FlagRow flags() const;
};

bool operator==(const Finding& a, const Finding& b);
bool operator==(const RareNetMetric& a, const RareNetMetric& b);
bool operator==(const AssessmentReport& a, const AssessmentReport& b);

/// Structural assessment of the flattened design. The rules look only at
/// graph shape and constants, never at identifier text.
///
/// A net is *conditioned* when its driver compares something against a
/// constant, or reads a conditioned net.
///   logic:  an output-reachable assignment is guarded (if, case or ternary)
///           by a constant comparison or a conditioned net.
///   signal: an internal conditioned net is used only in guard positions or
///           as data for other such nets.
///   fsm:    a state register whose case on itself has at least two arms
///           that advance to another constant state on comparisons of other
///           nets against at least two distinct constants.
///   io:     a top input (other than a reset) reaches the increment guard of
///           a counter without passing through a comparison, and the counter
///           feeds a constant comparison that reaches an output.
AssessmentReport assess(const rtl::RtlDesign& design, const std::string& top);
AssessmentReport assess(const rtl::ElaboratedDesign& elab, const std::string& source_name);

/// Activation probability of every 1-bit net other than the clock, from a
/// seeded random run: reset held for two cycles, all other inputs uniform.
std::vector<RareNetMetric> rare_net_metrics(const rtl::ElaboratedDesign& elab, std::uint64_t seed,
                                            int cycles);

std::string report_to_json(const AssessmentReport& report);
/// Throws Error(InvalidSpec) on malformed input.
AssessmentReport report_from_json(const std::string& text);

}  // namespace htkit::assess
