// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/bitvec.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace htkit::forge {

enum class TriggerClass { Time, Logic, Address, StateSequence, InputCount };

const char* to_string(TriggerClass c);

/// A trigger as data. `net` is the watched net (logic, address,
/// state_sequence) or the event net (input_count); time triggers have none.
struct TriggerSpec {
  TriggerClass cls = TriggerClass::Time;
  std::string net;
  BitVec lo;
  BitVec hi;
  std::vector<BitVec> sequence;
  std::uint64_t threshold = 0;

  /// Level triggers drive the enable combinationally; the sequence trigger
  /// pulses and is latched.
  bool is_pulse() const { return cls == TriggerClass::StateSequence; }
  /// True when the trigger is a combinational function of top inputs.
  bool is_input_derived() const { return cls == TriggerClass::Logic || cls == TriggerClass::Address; }

  static TriggerSpec time(std::uint64_t lo, std::uint64_t hi);
  static TriggerSpec logic(std::string net, std::uint64_t lo, std::uint64_t hi);
  static TriggerSpec address(std::string net, std::uint64_t lo, std::uint64_t hi);
  static TriggerSpec state_sequence(std::string net, std::vector<BitVec> values);
  static TriggerSpec input_count(std::string net, std::uint64_t threshold);
};

enum class PayloadEffect { Dos, PerfDegrade, InfoLeak };

const char* to_string(PayloadEffect e);

struct PayloadSpec {
  PayloadEffect effect = PayloadEffect::Dos;
  std::string target_output;
  int period = 16;
  int width = 4;
  std::string leak_port = "leak_chan";
  std::string source_net;
};

/// `time:50:200`, `logic:<net>:1000:2000`, `addr:<net>:2000:3000`,
/// `seq:<net>:0x55,0xAA,0xFF`, `count:<net>:1000`. Throws Error(InvalidSpec).
TriggerSpec parse_trigger(const std::string& text);

/// `dos`, `perf[:P:W]`, `leak:<src>[:port]`. The target output is supplied
/// separately. Throws Error(InvalidSpec).
PayloadSpec parse_effect(const std::string& text, const std::string& target_output);

/// Checks the invariants that do not depend on a host. Throws InvalidSpec.
void validate(const TriggerSpec& t);
void validate(const PayloadSpec& p);

nlohmann::json to_json(const TriggerSpec& t);
nlohmann::json to_json(const PayloadSpec& p);
TriggerSpec trigger_from_json(const nlohmann::json& j);
PayloadSpec payload_from_json(const nlohmann::json& j);

/// Short human description, e.g. "count between 50 and 200".
std::string describe(const TriggerSpec& t);

}  // namespace htkit::forge
