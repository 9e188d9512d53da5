// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/bitvec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace htkit::sim {

/// Per-cycle net values sampled after the clock edge has settled.
struct SimTrace {
  int cycles = 0;
  std::vector<std::string> names;
  std::vector<int> widths;
  std::vector<std::vector<BitVec>> values;  // values[cycle][net index]

  int index_of(const std::string& name) const;  // -1 when absent
  const BitVec& at(int cycle, const std::string& name) const;
};

/// Cycles where a 1-bit net is high. Throws UnknownNet or WidthNotOne.
std::vector<int> activation_cycles(const SimTrace& trace, const std::string& net);

struct OutputDivergence {
  std::string output;
  std::vector<int> cycles;
};

struct DivergenceReport {
  std::optional<int> first_divergence_cycle;
  std::vector<OutputDivergence> per_output;  // one entry per compared output
  double match_fraction = 1.0;

  bool diverged() const { return first_divergence_cycle.has_value(); }
};

/// Throws LengthMismatch on differing cycle counts and UnknownNet when an
/// output is missing from either trace.
DivergenceReport compare_traces(const SimTrace& golden, const SimTrace& suspect,
                                const std::vector<std::string>& outputs);

std::string divergence_to_json(const DivergenceReport& report);

/// Stable textual form used for byte-level determinism checks.
std::string trace_to_json(const SimTrace& trace);

}  // namespace htkit::sim
