// SPDX-License-Identifier: Apache-2.0
#include "htkit/forge/spec.hpp"

#include "htkit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace htkit::forge {

const char* to_string(TriggerClass c) {
  switch (c) {
    case TriggerClass::Time: return "time";
    case TriggerClass::Logic: return "logic";
    case TriggerClass::Address: return "address";
    case TriggerClass::StateSequence: return "state_sequence";
    case TriggerClass::InputCount: return "input_count";
  }
  return "?";
}

const char* to_string(PayloadEffect e) {
  switch (e) {
    case PayloadEffect::Dos: return "dos";
    case PayloadEffect::PerfDegrade: return "perf_degrade";
    case PayloadEffect::InfoLeak: return "info_leak";
  }
  return "?";
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

BitVec number(const std::string& text) {
  try {
    if (text.empty()) throw std::invalid_argument("empty");
    BitVec wide = BitVec::from_string(static_cast<int>(text.size()) * 4 + 4, text);
    return wide.resized(std::max(1, wide.bit_length()));
  } catch (const std::exception&) {
    invalid("'" + text + "' is not a decimal or 0x-prefixed number");
  }
}

std::uint64_t small_number(const std::string& text) {
  BitVec v = number(text);
  if (!v.fits_u64()) invalid("'" + text + "' does not fit in 64 bits");
  return v.to_u64();
}

BitVec fit(std::uint64_t v) {
  BitVec b(64, v);
  return b.resized(std::max(1, b.bit_length()));
}

std::string value_text(const BitVec& v) {
  return v.bit_length() <= 64 ? v.to_dec() : "0x" + v.to_hex();
}

}  // namespace

TriggerSpec TriggerSpec::time(std::uint64_t lo, std::uint64_t hi) {
  TriggerSpec t;
  t.cls = TriggerClass::Time;
  t.lo = fit(lo);
  t.hi = fit(hi);
  return t;
}

TriggerSpec TriggerSpec::logic(std::string net, std::uint64_t lo, std::uint64_t hi) {
  TriggerSpec t = time(lo, hi);
  t.cls = TriggerClass::Logic;
  t.net = std::move(net);
  return t;
}

TriggerSpec TriggerSpec::address(std::string net, std::uint64_t lo, std::uint64_t hi) {
  TriggerSpec t = logic(std::move(net), lo, hi);
  t.cls = TriggerClass::Address;
  return t;
}

TriggerSpec TriggerSpec::state_sequence(std::string net, std::vector<BitVec> values) {
  TriggerSpec t;
  t.cls = TriggerClass::StateSequence;
  t.net = std::move(net);
  t.sequence = std::move(values);
  return t;
}

TriggerSpec TriggerSpec::input_count(std::string net, std::uint64_t threshold) {
  TriggerSpec t;
  t.cls = TriggerClass::InputCount;
  t.net = std::move(net);
  t.threshold = threshold;
  return t;
}

TriggerSpec parse_trigger(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.empty()) invalid("empty trigger");
  const std::string& kind = parts[0];
  TriggerSpec t;
  if (kind == "time") {
    if (parts.size() != 3) invalid("expected time:<lo>:<hi>");
    t = TriggerSpec::time(small_number(parts[1]), small_number(parts[2]));
  } else if (kind == "logic" || kind == "addr" || kind == "address") {
    if (parts.size() != 4) invalid("expected " + kind + ":<net>:<lo>:<hi>");
    t = kind == "logic" ? TriggerSpec::logic(parts[1], 0, 0) : TriggerSpec::address(parts[1], 0, 0);
    t.lo = number(parts[2]);
    t.hi = number(parts[3]);
  } else if (kind == "seq" || kind == "state_sequence") {
    if (parts.size() != 3) invalid("expected seq:<net>:<v1>,<v2>,...");
    std::vector<BitVec> values;
    for (const auto& v : split(parts[2], ',')) values.push_back(number(v));
    t = TriggerSpec::state_sequence(parts[1], std::move(values));
  } else if (kind == "count" || kind == "input_count") {
    if (parts.size() != 3) invalid("expected count:<net>:<threshold>");
    t = TriggerSpec::input_count(parts[1], small_number(parts[2]));
  } else {
    invalid("unknown trigger class '" + kind + "'");
  }
  validate(t);
  return t;
}

PayloadSpec parse_effect(const std::string& text, const std::string& target_output) {
  auto parts = split(text, ':');
  if (parts.empty()) invalid("empty effect");
  PayloadSpec p;
  p.target_output = target_output;
  const std::string& kind = parts[0];
  if (kind == "dos") {
    if (parts.size() != 1) invalid("dos takes no parameters");
    p.effect = PayloadEffect::Dos;
  } else if (kind == "perf" || kind == "perf_degrade") {
    p.effect = PayloadEffect::PerfDegrade;
    if (parts.size() == 3) {
      p.period = static_cast<int>(std::min<std::uint64_t>(small_number(parts[1]), 1u << 20));
      p.width = static_cast<int>(std::min<std::uint64_t>(small_number(parts[2]), 1u << 20));
    } else if (parts.size() != 1) {
      invalid("expected perf or perf:<P>:<W>");
    }
  } else if (kind == "leak" || kind == "info_leak") {
    p.effect = PayloadEffect::InfoLeak;
    if (parts.size() < 2 || parts.size() > 3 || parts[1].empty()) {
      invalid("expected leak:<source>[:<port>]");
    }
    p.source_net = parts[1];
    if (parts.size() == 3) p.leak_port = parts[2];
  } else {
    invalid("unknown effect '" + kind + "'");
  }
  validate(p);
  return p;
}

void validate(const TriggerSpec& t) {
  switch (t.cls) {
    case TriggerClass::Time:
    case TriggerClass::Logic:
    case TriggerClass::Address:
      if (BitVec::compare(t.lo, t.hi) > 0) invalid("trigger range has lo > hi");
      if (t.cls == TriggerClass::Time && !t.hi.fits_u64()) invalid("time bound exceeds 64 bits");
      if (t.cls != TriggerClass::Time && t.net.empty()) invalid("trigger needs a net");
      break;
    case TriggerClass::StateSequence:
      if (t.sequence.empty()) invalid("state sequence must not be empty");
      if (t.net.empty()) invalid("trigger needs a net");
      break;
    case TriggerClass::InputCount:
      if (t.threshold < 1) invalid("count threshold must be >= 1");
      if (t.net.empty()) invalid("trigger needs a net");
      break;
  }
}

void validate(const PayloadSpec& p) {
  if (p.target_output.empty()) invalid("payload needs a target output");
  if (p.effect == PayloadEffect::PerfDegrade) {
    if (p.period < 2) invalid("perf period must be >= 2");
    if (p.width < 1 || p.width >= p.period) invalid("perf width must satisfy 1 <= W < P");
  }
  if (p.effect == PayloadEffect::InfoLeak) {
    if (p.source_net.empty()) invalid("leak needs a source net");
    if (p.leak_port.empty()) invalid("leak needs a port name");
  }
}

nlohmann::json to_json(const TriggerSpec& t) {
  nlohmann::json j;
  j["class"] = to_string(t.cls);
  switch (t.cls) {
    case TriggerClass::Time:
      j["lo"] = value_text(t.lo);
      j["hi"] = value_text(t.hi);
      break;
    case TriggerClass::Logic:
    case TriggerClass::Address:
      j["net"] = t.net;
      j["lo"] = value_text(t.lo);
      j["hi"] = value_text(t.hi);
      break;
    case TriggerClass::StateSequence: {
      j["net"] = t.net;
      j["sequence"] = nlohmann::json::array();
      for (const auto& v : t.sequence) j["sequence"].push_back("0x" + v.to_hex());
      break;
    }
    case TriggerClass::InputCount:
      j["net"] = t.net;
      j["threshold"] = t.threshold;
      break;
  }
  return j;
}

nlohmann::json to_json(const PayloadSpec& p) {
  nlohmann::json j;
  j["effect"] = to_string(p.effect);
  j["target_output"] = p.target_output;
  if (p.effect == PayloadEffect::PerfDegrade) {
    j["period"] = p.period;
    j["width"] = p.width;
  }
  if (p.effect == PayloadEffect::InfoLeak) {
    j["leak_port"] = p.leak_port;
    j["source_net"] = p.source_net;
  }
  return j;
}

TriggerSpec trigger_from_json(const nlohmann::json& j) {
  try {
    std::string cls = j.at("class").get<std::string>();
    TriggerSpec t;
    if (cls == "time") {
      t = TriggerSpec::time(0, 0);
    } else if (cls == "logic") {
      t = TriggerSpec::logic(j.at("net").get<std::string>(), 0, 0);
    } else if (cls == "address") {
      t = TriggerSpec::address(j.at("net").get<std::string>(), 0, 0);
    } else if (cls == "state_sequence") {
      std::vector<BitVec> seq;
      for (const auto& v : j.at("sequence")) seq.push_back(number(v.get<std::string>()));
      t = TriggerSpec::state_sequence(j.at("net").get<std::string>(), std::move(seq));
    } else if (cls == "input_count") {
      t = TriggerSpec::input_count(j.at("net").get<std::string>(),
                                   j.at("threshold").get<std::uint64_t>());
    } else {
      invalid("unknown trigger class '" + cls + "'");
    }
    if (j.contains("lo")) t.lo = number(j.at("lo").get<std::string>());
    if (j.contains("hi")) t.hi = number(j.at("hi").get<std::string>());
    validate(t);
    return t;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("trigger JSON: ") + e.what());
  }
}

PayloadSpec payload_from_json(const nlohmann::json& j) {
  try {
    PayloadSpec p;
    std::string e = j.at("effect").get<std::string>();
    if (e == "dos") {
      p.effect = PayloadEffect::Dos;
    } else if (e == "perf_degrade") {
      p.effect = PayloadEffect::PerfDegrade;
    } else if (e == "info_leak") {
      p.effect = PayloadEffect::InfoLeak;
    } else {
      invalid("unknown effect '" + e + "'");
    }
    p.target_output = j.at("target_output").get<std::string>();
    p.period = j.value("period", 16);
    p.width = j.value("width", 4);
    p.leak_port = j.value("leak_port", std::string("leak_chan"));
    p.source_net = j.value("source_net", std::string());
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& ex) {
    invalid(std::string("payload JSON: ") + ex.what());
  }
}

std::string describe(const TriggerSpec& t) {
  switch (t.cls) {
    case TriggerClass::Time:
      return "the cycle count since reset is between " + value_text(t.lo) + " and " +
             value_text(t.hi);
    case TriggerClass::Logic:
      return "the value of " + t.net + " is between " + value_text(t.lo) + " and " +
             value_text(t.hi);
    case TriggerClass::Address:
      return "the address on " + t.net + " is in the range of " + value_text(t.lo) + " and " +
             value_text(t.hi);
    case TriggerClass::StateSequence: {
      std::string s = "the sequence ";
      for (std::size_t i = 0; i < t.sequence.size(); ++i) {
        if (i) s += i + 1 == t.sequence.size() ? " and " : ", ";
        s += "0x" + t.sequence[i].resized(std::max(8, t.sequence[i].width())).to_hex();
      }
      return s + " is observed on " + t.net;
    }
    case TriggerClass::InputCount:
      return "the number of cycles with " + t.net + " high reaches " + std::to_string(t.threshold);
  }
  return "";
}

}  // namespace htkit::forge
