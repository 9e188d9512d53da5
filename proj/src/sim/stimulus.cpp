// SPDX-License-Identifier: Apache-2.0
#include "htkit/sim/stimulus.hpp"

#include "htkit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace htkit::sim {

using nlohmann::json;

XorShift64Star::XorShift64Star(std::uint64_t seed) : s_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

std::uint64_t XorShift64Star::next() {
  s_ ^= s_ >> 12;
  s_ ^= s_ << 25;
  s_ ^= s_ >> 27;
  return s_ * 0x2545F4914F6CDD1DULL;
}

BitVec XorShift64Star::uniform(const BitVec& lo, const BitVec& hi, int width) {
  BitVec l = lo.resized(width);
  BitVec span = hi.resized(width) - l;
  int bits = span.bit_length();
  if (bits == 0) return l;
  while (true) {
    BitVec r(width);
    for (int i = 0; i * 64 < bits; ++i) {
      std::uint64_t w = next();
      int left = bits - i * 64;
      if (left < 64) w &= (std::uint64_t{1} << left) - 1;
      r.set_word(i, w);
    }
    if (BitVec::compare(r, span) <= 0) return l + r;
  }
}

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::BadStimulus, "stimulus: " + what);
}

BitVec parse_value(const json& v, const std::string& where) {
  try {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      return BitVec(64, v.get<std::uint64_t>());
    }
    if (v.is_string()) {
      auto s = v.get<std::string>();
      BitVec wide = BitVec::from_string(static_cast<int>(s.size()) * 4 + 4, s);
      return wide.resized(std::max(1, wide.bit_length()));
    }
  } catch (const std::exception&) {
  }
  bad("bad value at " + where);
}

BitVec fit(const BitVec& v) { return v.resized(std::max(1, v.bit_length())); }

json value_json(const BitVec& v) {
  if (v.bit_length() <= 64) return v.to_u64();
  return "0x" + v.to_hex();
}

}  // namespace

StimulusProgram parse_stimulus(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  StimulusProgram s;
  try {
    s.clock = j.value("clock", std::string("clk"));
    if (j.contains("reset")) {
      const auto& r = j.at("reset");
      s.reset_net = r.at("net").get<std::string>();
      s.reset_cycles = r.value("cycles", 0);
      if (s.reset_cycles < 0) bad("reset.cycles must be >= 0");
    }
    s.cycles = j.value("cycles", 0);
    if (j.contains("drives")) {
      std::map<std::string, int> last;
      for (const auto& d : j.at("drives")) {
        Drive dr;
        dr.cycle = d.at("cycle").get<int>();
        dr.input = d.at("input").get<std::string>();
        dr.value = fit(parse_value(d.at("value"), "drive of " + dr.input));
        if (dr.cycle < 0) bad("negative drive cycle");
        auto it = last.find(dr.input);
        if (it != last.end() && dr.cycle < it->second) {
          bad("drive cycles for '" + dr.input + "' must be nondecreasing");
        }
        last[dr.input] = dr.cycle;
        s.drives.push_back(std::move(dr));
      }
    }
    if (j.contains("generators")) {
      for (const auto& [name, g] : j.at("generators").items()) {
        ValueGenerator vg;
        auto kind = g.at("kind").get<std::string>();
        if (kind == "constant") {
          vg.kind = ValueGenerator::Kind::Constant;
          vg.value = fit(parse_value(g.at("value"), "generator " + name));
        } else if (kind == "counter") {
          vg.kind = ValueGenerator::Kind::Counter;
          vg.value = g.contains("start") ? fit(parse_value(g.at("start"), "generator " + name))
                                         : BitVec(1);
        } else {
          bad("unknown generator kind '" + kind + "'");
        }
        s.generators[name] = vg;
      }
    }
    if (j.contains("random")) {
      const auto& r = j.at("random");
      RandomGenerator rg;
      rg.seed = r.value("seed", std::uint64_t{0});
      if (r.contains("ranges")) {
        for (const auto& [name, range] : r.at("ranges").items()) {
          if (!range.is_array() || range.size() != 2) bad("range of '" + name + "' needs [lo, hi]");
          InputRange ir{fit(parse_value(range[0], "range of " + name)),
                        fit(parse_value(range[1], "range of " + name))};
          if (BitVec::compare(ir.lo, ir.hi) > 0) bad("range of '" + name + "' has lo > hi");
          rg.ranges[name] = ir;
        }
      }
      if (r.contains("exclude")) rg.exclude = r.at("exclude").get<std::vector<std::string>>();
      s.random = std::move(rg);
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return s;
}

std::string stimulus_to_json(const StimulusProgram& s) {
  json j;
  j["clock"] = s.clock;
  if (!s.reset_net.empty()) j["reset"] = {{"net", s.reset_net}, {"cycles", s.reset_cycles}};
  j["cycles"] = s.cycles;
  j["drives"] = json::array();
  for (const auto& d : s.drives) {
    j["drives"].push_back({{"cycle", d.cycle}, {"input", d.input}, {"value", value_json(d.value)}});
  }
  if (!s.generators.empty()) {
    for (const auto& [name, g] : s.generators) {
      if (g.kind == ValueGenerator::Kind::Constant) {
        j["generators"][name] = {{"kind", "constant"}, {"value", value_json(g.value)}};
      } else {
        j["generators"][name] = {{"kind", "counter"}, {"start", value_json(g.value)}};
      }
    }
  }
  if (s.random) {
    json r;
    r["seed"] = s.random->seed;
    r["ranges"] = json::object();
    for (const auto& [name, range] : s.random->ranges) {
      r["ranges"][name] = {value_json(range.lo), value_json(range.hi)};
    }
    if (!s.random->exclude.empty()) r["exclude"] = s.random->exclude;
    j["random"] = r;
  }
  return j.dump(2);
}

}  // namespace htkit::sim
