// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/bitvec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace htkit::sim {

/// xorshift64* (Vigna). State 0 is replaced by 0x9E3779B97F4A7C15 because the
/// generator is stuck at zero otherwise.
class XorShift64Star {
 public:
  explicit XorShift64Star(std::uint64_t seed);
  std::uint64_t next();

  /// Uniform value in [lo, hi] (inclusive) at `width` bits, by rejection
  /// sampling on the bit length of hi - lo.
  BitVec uniform(const BitVec& lo, const BitVec& hi, int width);

 private:
  std::uint64_t s_;
};

struct Drive {
  int cycle = 0;
  std::string input;
  BitVec value;
};

struct InputRange {
  BitVec lo;
  BitVec hi;
};

struct RandomGenerator {
  std::uint64_t seed = 0;
  /// Per-input bounds; unlisted inputs draw from their full range.
  std::map<std::string, InputRange> ranges;
  /// Inputs left out of random drawing.
  std::vector<std::string> exclude;
};

struct ValueGenerator {
  enum class Kind { Constant, Counter };
  Kind kind = Kind::Constant;
  BitVec value;  // Constant value, or Counter start
};

/// Input schedule for one simulation run.
///
/// Per cycle and input, the first applicable source wins: an explicit drive
/// at that cycle, a per-input generator, the random generator, the last
/// explicit drive, zero. The reset net is 1 for the first `reset_cycles`
/// cycles and 0 afterwards unless driven explicitly. The clock is implicit:
/// every cycle has exactly one rising edge.
struct StimulusProgram {
  std::string clock = "clk";
  std::string reset_net;
  int reset_cycles = 0;
  int cycles = 0;  // default run length when the caller gives none
  std::vector<Drive> drives;
  std::map<std::string, ValueGenerator> generators;
  std::optional<RandomGenerator> random;
};

/// Parses the stimulus JSON format. Values are JSON integers, decimal
/// strings or "0x" hex strings. Throws Error(BadStimulus).
StimulusProgram parse_stimulus(const std::string& json_text);
std::string stimulus_to_json(const StimulusProgram& stim);

}  // namespace htkit::sim
