// SPDX-License-Identifier: Apache-2.0
#pragma once
// Reference models for the test suites. They are written against the
// behavioral definitions of each trigger and payload, never against the
// generated RTL, so a generator bug cannot hide behind a matching oracle.

#include "htkit/forge/spec.hpp"
#include "htkit/forge/trojan.hpp"
#include "htkit/sim/trace.hpp"
#include "htkit/sim/stimulus.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace htkit::oracle {

inline std::string corpus(const std::string& rel) { return std::string(HTKIT_CORPUS_DIR) + "/" + rel; }

std::string slurp(const std::string& path);

/// Expected emitter output for corpus/<stem>.v, without the license header line.
std::string golden(const std::string& stem);

/// Per-cycle input values for the dual-port RAM host.
struct RamStream {
  std::vector<std::uint64_t> rst, we_a, addr_a, din_a, addr_b;
  int cycles() const { return static_cast<int>(rst.size()); }
};

/// Seeded stream biased so every Table-2 trigger fires within 10,000 cycles:
/// din_a often lands in 1000..2000 or on 0x55/0xAA/0xFF, and one mid-run
/// reset exercises the restart path.
RamStream make_ram_stream(std::uint64_t seed, int cycles, int reset_len = 2, int mid_reset_at = -1);

/// Drives every cycle of every input explicitly.
sim::StimulusProgram to_stimulus(const RamStream& s);

/// Table-2 parameters on the RAM host, in row order.
struct TableRow {
  std::string trigger;
  std::string effect;
  bool io, fsm, logic, signal;
};
const std::vector<TableRow>& table_rows();
/// The same five triggers crossed with all three effects.
std::vector<std::pair<std::string, std::string>> all_combinations();

/// Cycles where the trigger must be high, from the predicate definitions:
///  time     non-reset cycles since the last reset, counted from 1, in [lo, hi]
///  logic    watched value in [lo, hi] on that cycle (reset does not mask it)
///  address  as logic
///  sequence the values arrive back to back starting from the idle state;
///           fires on the cycle after the last one and ignores the input on
///           that cycle and the next
///  count    events seen since the last reset, inclusive, reach the threshold
std::set<int> trigger_oracle(const forge::TriggerSpec& t, const RamStream& s);

/// Enable cycles: level triggers enable exactly when they fire; pulse
/// triggers stay enabled from the first firing until the next reset.
std::set<int> enable_oracle(const forge::TriggerSpec& t, const std::set<int>& fires, const RamStream& s);

/// Cycles where a perf payload zeroes its target: enabled, and within the
/// first W of each P-cycle window counted from the first enabled cycle after
/// reset.
std::set<int> perf_gate_oracle(const std::set<int>& enable, const RamStream& s, int period, int width);

/// Inserts one trigger/effect pair into the shipped RAM host, attacking dout_b.
forge::Insertion insert_into_ram(const std::string& trigger, const std::string& effect);

/// Expected values of the attacked outputs (dout_b, plus leak_chan for a
/// leak) given the clean host's trace and the oracle enable set.
sim::SimTrace expected_payload_trace(const sim::SimTrace& golden, const forge::PayloadSpec& p,
                                     const std::set<int>& enable, const RamStream& s);

}  // namespace htkit::oracle
