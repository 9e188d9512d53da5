// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/elaborate.hpp"
#include "htkit/sim/stimulus.hpp"
#include "htkit/sim/trace.hpp"

#include <memory>
#include <string>
#include <vector>

namespace htkit::sim {

struct SimOptions {
  /// Nets to record; empty records every flat net.
  std::vector<std::string> record;
};

/// Runs `cycles` clock cycles. Each cycle applies the inputs, settles the
/// combinational fabric in topological order, commits all clocked updates
/// and RAM accesses at the rising edge, settles again and samples.
/// Registers start at their reset value and other nets at zero.
///
/// Throws UnknownInput when the stimulus names a non-input, BadStimulus on
/// values wider than their input and on cycles < 1.
SimTrace simulate(const rtl::ElaboratedDesign& elab, const StimulusProgram& stim, int cycles,
                  const SimOptions& options = {});

}  // namespace htkit::sim
