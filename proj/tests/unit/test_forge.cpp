// SPDX-License-Identifier: Apache-2.0
#include "../common/oracle.hpp"

#include "htkit/forge/trojan.hpp"
#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>

using namespace htkit;
using htkit::oracle::corpus;
using htkit::oracle::slurp;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NoCodeFound;
}

rtl::RtlDesign ram() { return rtl::parse_verilog(slurp(corpus("dpram.v")), "dpram.v"); }

std::set<int> simulated(const forge::Insertion& ins, const sim::StimulusProgram& stim, int cycles,
                        const std::string& net) {
  auto tr = sim::simulate(rtl::elaborate(ins.design, "dpram"), stim, cycles, {{net}});
  auto v = sim::activation_cycles(tr, net);
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Spec, ParsesEveryTriggerClass) {
  auto t = forge::parse_trigger("time:50:200");
  EXPECT_EQ(t.cls, forge::TriggerClass::Time);
  EXPECT_EQ(t.lo.to_u64(), 50U);
  EXPECT_EQ(t.hi.to_u64(), 200U);
  auto s = forge::parse_trigger("seq:din_a:0x55,0xAA,0xFF");
  ASSERT_EQ(s.sequence.size(), 3U);
  EXPECT_EQ(s.sequence[1].to_u64(), 0xAAU);
  EXPECT_EQ(forge::parse_trigger("count:we_a:1000").threshold, 1000U);
  EXPECT_EQ(forge::parse_trigger("addr:addr_a:2000:3000").cls, forge::TriggerClass::Address);
  auto p = forge::parse_effect("perf:32:8", "dout_b");
  EXPECT_EQ(p.period, 32);
  EXPECT_EQ(p.width, 8);
  auto l = forge::parse_effect("leak:din_a:side", "dout_b");
  EXPECT_EQ(l.source_net, "din_a");
  EXPECT_EQ(l.leak_port, "side");
}

TEST(Spec, RejectsMalformedSpecs) {
  for (const char* bad : {"", "time:5", "time:9:3", "bogus:1:2", "seq:x:", "count:we:0", "logic:x:a:b"}) {
    EXPECT_EQ(code_of([&] { forge::parse_trigger(bad); }), ErrorCode::InvalidSpec) << bad;
  }
  for (const char* bad : {"", "dos:1", "perf:4:4", "perf:1:0", "leak", "melt"}) {
    EXPECT_EQ(code_of([&] { forge::parse_effect(bad, "out"); }), ErrorCode::InvalidSpec) << bad;
  }
}

TEST(Spec, JsonRoundTrip) {
  for (const auto& [t, e] : oracle::all_combinations()) {
    auto ts = forge::parse_trigger(t);
    auto ps = forge::parse_effect(e, "dout_b");
    EXPECT_EQ(forge::to_json(forge::trigger_from_json(forge::to_json(ts))), forge::to_json(ts));
    EXPECT_EQ(forge::to_json(forge::payload_from_json(forge::to_json(ps))), forge::to_json(ps));
  }
}

class Combination : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(Combination, InsertsLintCleanWithManifest) {
  auto ins = oracle::insert_into_ram(GetParam().first, GetParam().second);
  for (const auto& m : ins.design.modules) EXPECT_TRUE(rtl::lint(m).empty()) << rtl::emit_module(m);
  EXPECT_FALSE(ins.manifest.added_nets.empty());
  EXPECT_FALSE(ins.manifest.added_assigns.empty());
  EXPECT_EQ(ins.manifest.host_module, "dpram");
  auto back = forge::manifest_from_json(forge::manifest_to_json(ins.manifest));
  EXPECT_EQ(forge::manifest_to_json(back), forge::manifest_to_json(ins.manifest));
  // Spans point at real lines of the emitted design.
  const auto text = rtl::emit_verilog(ins.design);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  for (const auto& s : ins.manifest.added_assigns) {
    EXPECT_GE(s.line_start, 1);
    EXPECT_LE(s.line_end, lines);
  }
}

TEST_P(Combination, TriggerMatchesOracle) {
  auto ins = oracle::insert_into_ram(GetParam().first, GetParam().second);
  auto stream = oracle::make_ram_stream(17, 4000, 3, 2500);
  auto got = simulated(ins, oracle::to_stimulus(stream), stream.cycles(), ins.manifest.trigger_net);
  auto want = oracle::trigger_oracle(ins.manifest.trigger, stream);
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(got, want);
}

TEST_P(Combination, PayloadMatchesOracleBitExact) {
  auto ins = oracle::insert_into_ram(GetParam().first, GetParam().second);
  auto stream = oracle::make_ram_stream(23, 4000, 2, 2200);
  auto stim = oracle::to_stimulus(stream);
  auto golden = sim::simulate(rtl::elaborate(ram(), "dpram"), stim, stream.cycles());
  auto actual = sim::simulate(rtl::elaborate(ins.design, "dpram"), stim, stream.cycles());
  const auto& m = ins.manifest;
  auto en = oracle::enable_oracle(m.trigger, oracle::trigger_oracle(m.trigger, stream), stream);
  EXPECT_EQ(simulated(ins, stim, stream.cycles(), m.enable_net), en);
  auto expected = oracle::expected_payload_trace(golden, m.payload, en, stream);
  auto r = sim::compare_traces(expected, actual, expected.names);
  EXPECT_FALSE(r.diverged()) << "first divergence at " << r.first_divergence_cycle.value_or(-1);
}

INSTANTIATE_TEST_SUITE_P(Ram, Combination, ::testing::ValuesIn(oracle::all_combinations()),
                         [](const auto& info) {
                           std::string n = info.param.first.substr(0, info.param.first.find(':')) + "_" +
                                           info.param.second.substr(0, info.param.second.find(':'));
                           return n;
                         });

TEST(Trigger, TimeWindowIsExactAfterReset) {
  auto ins = oracle::insert_into_ram("time:50:200", "dos");
  sim::StimulusProgram s;
  s.reset_net = "rst";
  s.reset_cycles = 4;
  auto got = simulated(ins, s, 400, "Tj_Trig");
  // 4 reset cycles, so the 50th counted cycle is cycle 53.
  ASSERT_EQ(got.size(), 151U);
  EXPECT_EQ(*got.begin(), 53);
  EXPECT_EQ(*got.rbegin(), 203);
}

TEST(Trigger, SequenceStateWidthLeavesDefaultReachable) {
  auto ins = oracle::insert_into_ram("seq:din_a:0x55,0xAA,0xFF", "dos");
  const auto* m = ins.design.find_module("dpram");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->signal_width("Tj_state"), 3);
  EXPECT_EQ(ins.manifest.enable_semantics, "sticky");
}

TEST(Trigger, PerfWithNonDefaultWindow) {
  auto host = ram();
  auto ins = forge::insert_trojan(host, "dpram", forge::parse_trigger("time:10:100"),
                                  forge::parse_effect("perf:8:3", "dout_b"));
  auto stream = oracle::make_ram_stream(5, 300);
  auto stim = oracle::to_stimulus(stream);
  auto golden = sim::simulate(rtl::elaborate(host, "dpram"), stim, 300);
  auto actual = sim::simulate(rtl::elaborate(ins.design, "dpram"), stim, 300);
  auto en = oracle::trigger_oracle(ins.manifest.trigger, stream);
  auto expected = oracle::expected_payload_trace(golden, ins.manifest.payload, en, stream);
  EXPECT_FALSE(sim::compare_traces(expected, actual, {"dout_b"}).diverged());
}

TEST(Insert, Errors) {
  auto host = ram();
  auto t = forge::parse_trigger("time:50:200");
  EXPECT_EQ(code_of([&] { forge::insert_trojan(host, "dpram", t, forge::parse_effect("dos", "din_a")); }),
            ErrorCode::TargetNotOutput);
  EXPECT_EQ(code_of([&] { forge::insert_trojan(host, "nope", t, forge::parse_effect("dos", "dout_b")); }),
            ErrorCode::HostUnsupported);
  EXPECT_EQ(code_of([&] {
              forge::insert_trojan(host, "dpram", forge::parse_trigger("logic:din_a:0:70000"),
                                   forge::parse_effect("dos", "dout_b"));
            }),
            ErrorCode::WidthMismatch);
  EXPECT_EQ(code_of([&] {
              forge::insert_trojan(host, "dpram", forge::parse_trigger("count:addr_a:5"),
                                   forge::parse_effect("dos", "dout_b"));
            }),
            ErrorCode::WidthMismatch);
  EXPECT_EQ(code_of([&] {
              forge::insert_trojan(host, "dpram", t, forge::parse_effect("leak:din_a:addr_b", "dout_b"));
            }),
            ErrorCode::LeakPortNameCollision);
  auto combo = rtl::parse_verilog("module c(input wire [3:0] a, output wire [3:0] y);\nassign y = a;\nendmodule\n");
  EXPECT_EQ(code_of([&] { forge::insert_trojan(combo, "c", t, forge::parse_effect("dos", "y")); }),
            ErrorCode::HostUnsupported);
  auto clash = rtl::parse_verilog(
      "module h(input wire clk, input wire rst, output wire [3:0] y);\nwire Tj_Trig;\n"
      "assign Tj_Trig = 1'b0;\nassign y = 4'd0;\nendmodule\n");
  EXPECT_EQ(code_of([&] { forge::insert_trojan(clash, "h", t, forge::parse_effect("dos", "y")); }),
            ErrorCode::NameCollision);
}

TEST(Insert, PrefixIsApplied) {
  forge::InsertOptions o;
  o.prefix = "zz_";
  auto ins = forge::insert_trojan(ram(), "dpram", forge::parse_trigger("time:1:2"),
                                  forge::parse_effect("dos", "dout_b"), o);
  EXPECT_EQ(ins.manifest.trigger_net, "zz_Trig");
  for (const auto& n : ins.manifest.touched_names()) EXPECT_EQ(n.rfind("zz_", 0), 0U) << n;
}

TEST(Insert, HostIsUnchangedOutsideTheTrojan) {
  auto host = ram();
  auto ins = oracle::insert_into_ram("addr:addr_a:2000:3000", "leak:din_a");
  const auto* m = ins.design.find_module("dpram");
  const auto* h = host.find_module("dpram");
  for (const auto& p : h->ports) {
    const auto* q = m->find_port(p.name);
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->width, p.width);
  }
  ASSERT_NE(m->find_port("leak_chan"), nullptr);
  EXPECT_EQ(m->find_port("leak_chan")->width, 16);
  // The leak needs no redirect, so the RAM instance is untouched.
  EXPECT_TRUE(m->instances == h->instances);
}

TEST(Insert, EmissionIsDeterministic) {
  auto a = rtl::emit_verilog(oracle::insert_into_ram("count:we_a:1000", "perf").design);
  auto b = rtl::emit_verilog(oracle::insert_into_ram("count:we_a:1000", "perf").design);
  EXPECT_EQ(a, b);
}
