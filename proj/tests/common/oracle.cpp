// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"

#include "htkit/rtl/parser.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace htkit::oracle {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string golden(const std::string& stem) {
  std::string text = slurp(corpus("golden/" + stem + ".emit.v"));
  if (text.rfind("// SPDX-License-Identifier:", 0) == 0) text.erase(0, text.find('\n') + 1);
  return text;
}

RamStream make_ram_stream(std::uint64_t seed, int cycles, int reset_len, int mid_reset_at) {
  std::mt19937_64 rng(seed);
  auto uni = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  RamStream s;
  const std::uint64_t seq[] = {0x55, 0xAA, 0xFF};
  int run = -1;  // position inside a planted sequence
  for (int t = 0; t < cycles; ++t) {
    bool rst = t < reset_len || (mid_reset_at >= 0 && t >= mid_reset_at && t < mid_reset_at + 3);
    s.rst.push_back(rst ? 1 : 0);
    s.we_a.push_back(uni(0, 1));
    s.addr_a.push_back(uni(0, 4095));
    s.addr_b.push_back(uni(0, 4095));
    std::uint64_t din;
    if (run >= 0) {
      din = seq[run];
      run = run == 2 ? -1 : run + 1;
    } else {
      switch (uni(0, 9)) {
        case 0: run = 1; din = seq[0]; break;  // plant a full sequence
        case 1: din = seq[uni(0, 2)]; break;   // stray sequence value
        case 2: case 3: din = uni(1000, 2000); break;
        case 4: din = uni(995, 1005) + (uni(0, 1) ? 1000 : 0); break;  // range edges
        default: din = uni(0, 0xFFFF);
      }
    }
    s.din_a.push_back(din);
  }
  return s;
}

sim::StimulusProgram to_stimulus(const RamStream& s) {
  sim::StimulusProgram p;
  p.cycles = s.cycles();
  const std::pair<const char*, std::pair<const std::vector<std::uint64_t>*, int>> cols[] = {
      {"rst", {&s.rst, 1}},       {"we_a", {&s.we_a, 1}},     {"addr_a", {&s.addr_a, 12}},
      {"din_a", {&s.din_a, 16}}, {"addr_b", {&s.addr_b, 12}}};
  for (int t = 0; t < s.cycles(); ++t) {
    for (const auto& [name, col] : cols) {
      p.drives.push_back({t, name, BitVec(col.second, (*col.first)[t])});
    }
  }
  return p;
}

const std::vector<TableRow>& table_rows() {
  static const std::vector<TableRow> rows = {
      {"time:50:200", "dos", false, false, true, true},
      {"time:50:200", "perf", false, false, true, true},
      {"time:50:200", "leak:din_a", false, false, true, true},
      {"logic:din_a:1000:2000", "dos", false, false, true, true},
      {"logic:din_a:1000:2000", "leak:din_a", false, false, true, true},
      {"addr:addr_a:2000:3000", "dos", false, false, true, true},
      {"addr:addr_a:2000:3000", "perf", false, false, true, true},
      {"addr:addr_a:2000:3000", "leak:din_a", false, false, true, true},
      {"seq:din_a:0x55,0xAA,0xFF", "dos", false, true, true, true},
      {"seq:din_a:0x55,0xAA,0xFF", "perf", false, true, true, true},
      {"seq:din_a:0x55,0xAA,0xFF", "leak:din_a", false, true, true, true},
      {"count:we_a:1000", "dos", true, false, true, true},
      {"count:we_a:1000", "perf", true, false, true, true},
      {"count:we_a:1000", "leak:din_a", true, false, true, true},
  };
  return rows;
}

std::vector<std::pair<std::string, std::string>> all_combinations() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const char* t : {"time:50:200", "logic:din_a:1000:2000", "addr:addr_a:2000:3000",
                        "seq:din_a:0x55,0xAA,0xFF", "count:we_a:1000"}) {
    for (const char* e : {"dos", "perf", "leak:din_a"}) out.emplace_back(t, e);
  }
  return out;
}

namespace {

const std::vector<std::uint64_t>& column(const RamStream& s, const std::string& net) {
  if (net == "din_a") return s.din_a;
  if (net == "addr_a") return s.addr_a;
  if (net == "addr_b") return s.addr_b;
  if (net == "we_a") return s.we_a;
  throw std::runtime_error("oracle has no stream for " + net);
}

}  // namespace

std::set<int> trigger_oracle(const forge::TriggerSpec& t, const RamStream& s) {
  std::set<int> fires;
  const int n = s.cycles();
  switch (t.cls) {
    case forge::TriggerClass::Time: {
      const std::uint64_t lo = t.lo.to_u64(), hi = t.hi.to_u64();
      std::uint64_t since = 0;
      for (int c = 0; c < n; ++c) {
        since = s.rst[c] ? 0 : since + 1;
        if (since >= lo && since <= hi) fires.insert(c);
      }
      break;
    }
    case forge::TriggerClass::Logic:
    case forge::TriggerClass::Address: {
      const auto& v = column(s, t.net);
      for (int c = 0; c < n; ++c) {
        if (v[c] >= t.lo.to_u64() && v[c] <= t.hi.to_u64()) fires.insert(c);
      }
      break;
    }
    case forge::TriggerClass::StateSequence: {
      const auto& v = column(s, t.net);
      const int len = static_cast<int>(t.sequence.size());
      // Scan from an idle cycle p: either the next len values match, the
      // trigger cycle follows and one more cycle passes before idle, or the
      // first mismatch returns to idle.
      int p = 0;
      while (p < n) {
        if (s.rst[p]) {
          ++p;
          continue;
        }
        int k = 0;
        while (k < len && p + k < n && !s.rst[p + k] && v[p + k] == t.sequence[k].to_u64()) ++k;
        if (k == len) {
          if (p + len < n && !s.rst[p + len]) fires.insert(p + len);
          p += len + 2;
        } else {
          p += k + 1;
        }
      }
      break;
    }
    case forge::TriggerClass::InputCount: {
      const auto& v = column(s, t.net);
      std::uint64_t seen = 0;
      for (int c = 0; c < n; ++c) {
        seen = s.rst[c] ? 0 : seen + (v[c] ? 1 : 0);
        if (seen >= t.threshold) fires.insert(c);
      }
      break;
    }
  }
  return fires;
}

std::set<int> enable_oracle(const forge::TriggerSpec& t, const std::set<int>& fires, const RamStream& s) {
  if (!t.is_pulse()) return fires;
  std::set<int> en;
  bool on = false;
  for (int c = 0; c < s.cycles(); ++c) {
    if (s.rst[c]) on = false;
    if (fires.count(c)) on = true;
    if (on) en.insert(c);
  }
  return en;
}

std::set<int> perf_gate_oracle(const std::set<int>& enable, const RamStream& s, int period, int width) {
  std::set<int> gated;
  int first = -1;
  for (int c = 0; c < s.cycles(); ++c) {
    if (s.rst[c]) first = -1;
    bool en = enable.count(c) > 0;
    if (en && first < 0 && !s.rst[c]) first = c;
    int phase = first < 0 ? 0 : (c - first) % period;
    if (en && phase < width) gated.insert(c);
  }
  return gated;
}

forge::Insertion insert_into_ram(const std::string& trigger, const std::string& effect) {
  auto host = rtl::parse_verilog(slurp(corpus("dpram.v")), "dpram.v");
  return forge::insert_trojan(host, "dpram", forge::parse_trigger(trigger), forge::parse_effect(effect, "dout_b"));
}

sim::SimTrace expected_payload_trace(const sim::SimTrace& golden, const forge::PayloadSpec& p,
                                     const std::set<int>& enable, const RamStream& s) {
  sim::SimTrace e;
  e.cycles = golden.cycles;
  e.names = {"dout_b"};
  e.widths = {16};
  const bool leak = p.effect == forge::PayloadEffect::InfoLeak;
  if (leak) {
    e.names.push_back(p.leak_port);
    e.widths.push_back(16);
  }
  std::set<int> zeroed;
  if (p.effect == forge::PayloadEffect::Dos) zeroed = enable;
  if (p.effect == forge::PayloadEffect::PerfDegrade) zeroed = perf_gate_oracle(enable, s, p.period, p.width);
  for (int c = 0; c < golden.cycles; ++c) {
    std::vector<BitVec> row;
    row.push_back(zeroed.count(c) ? BitVec(16) : golden.at(c, "dout_b"));
    if (leak) row.push_back(enable.count(c) ? BitVec(16, column(s, p.source_net)[c]) : BitVec(16));
    e.values.push_back(std::move(row));
  }
  return e;
}

}  // namespace htkit::oracle
