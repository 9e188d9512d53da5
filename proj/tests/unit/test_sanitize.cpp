// SPDX-License-Identifier: Apache-2.0
#include "../common/oracle.hpp"

#include "htkit/forge/sanitize.hpp"
#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace htkit;
using htkit::oracle::corpus;
using htkit::oracle::slurp;

namespace {

rtl::RtlModule module_of(const std::string& file) { return rtl::parse_verilog(slurp(corpus(file)), file).modules.at(0); }

rtl::RtlDesign repaired(const rtl::RtlDesign& d) {
  auto out = d;
  for (auto& m : out.modules) m = forge::sanitize_fsm(m).module;
  return out;
}

sim::StimulusProgram random_stim(std::uint64_t seed) {
  sim::StimulusProgram s;
  s.reset_net = "rst";
  s.reset_cycles = 2;
  s.random = sim::RandomGenerator{seed, {}, {"rst"}};
  return s;
}

}  // namespace

TEST(Sanitize, RestoresTheListingDefaultArm) {
  auto r = forge::sanitize_fsm(module_of("sequence_detector_nodefault.v"));
  ASSERT_EQ(r.fixes.size(), 1U);
  EXPECT_EQ(r.fixes[0].kind, "default_arm");
  EXPECT_EQ(r.fixes[0].net, "next_state");
  EXPECT_EQ(r.fixes[0].hold, "IDLE");
  EXPECT_TRUE(r.module == module_of("sequence_detector.v"));
  EXPECT_TRUE(rtl::lint(r.module).empty());
}

TEST(Sanitize, CleanModulesComeBackUnchanged) {
  for (const char* f : {"sequence_detector.v", "dpram.v", "toggle.v", "aes_t800_lite.v"}) {
    auto m = module_of(f);
    auto r = forge::sanitize_fsm(m);
    EXPECT_TRUE(r.fixes.empty()) << f;
    EXPECT_TRUE(r.module == m) << f;
  }
}

TEST(Sanitize, IdempotentOnCorpus) {
  for (const auto& e : std::filesystem::directory_iterator(corpus(""))) {
    if (e.path().extension() != ".v") continue;
    auto d = rtl::parse_verilog(slurp(e.path().string()), e.path().string());
    for (const auto& m : d.modules) {
      auto once = forge::sanitize_fsm_partial(m);
      auto twice = forge::sanitize_fsm_partial(once.module);
      EXPECT_TRUE(twice.module == once.module) << e.path();
      EXPECT_TRUE(twice.fixes.empty()) << e.path();
      EXPECT_TRUE(rtl::lint(once.module).empty() || !once.unresolved.empty()) << e.path();
    }
  }
}

TEST(Sanitize, LatchHoldsTheRegisterItLoads) {
  auto r = forge::sanitize_fsm(module_of("flag_latch.v"));
  ASSERT_EQ(r.fixes.size(), 2U);
  EXPECT_EQ(r.fixes[0].hold, "q");
  EXPECT_EQ(r.fixes[1].hold, "flag");
  EXPECT_TRUE(rtl::lint(r.module).empty());
}

TEST(Sanitize, EquivalentWhereTheOriginalAssigns) {
  auto d = rtl::parse_verilog(slurp(corpus("flag_latch.v")));
  auto ea = rtl::elaborate(d, "flag_latch");
  auto eb = rtl::elaborate(repaired(d), "flag_latch");
  auto s = random_stim(4);
  s.generators["load"] = {sim::ValueGenerator::Kind::Constant, BitVec(1, 1)};
  auto r = sim::compare_traces(sim::simulate(ea, s, 1000), sim::simulate(eb, s, 1000), ea.outputs);
  EXPECT_FALSE(r.diverged());
}

TEST(Sanitize, DivergenceOnlyFollowsAnUncoveredCycle) {
  // With load random, the latch remembers the last d while the repair holds
  // the register. Outputs may differ only after a cycle where load was low.
  auto d = rtl::parse_verilog(slurp(corpus("flag_latch.v")));
  auto ea = rtl::elaborate(d, "flag_latch");
  auto eb = rtl::elaborate(repaired(d), "flag_latch");
  auto s = random_stim(8);
  auto ta = sim::simulate(ea, s, 1000);
  auto tb = sim::simulate(eb, s, 1000);
  bool uncovered_since_reset = false;
  for (int c = 0; c < 1000; ++c) {
    if (ta.at(c, "load").is_zero()) uncovered_since_reset = true;
    bool same = ta.at(c, "q") == tb.at(c, "q") && ta.at(c, "flag") == tb.at(c, "flag");
    if (!same) EXPECT_TRUE(uncovered_since_reset) << "cycle " << c;
  }
}

TEST(Sanitize, ListingRepairIsFullyEquivalent) {
  auto d = rtl::parse_verilog(slurp(corpus("sequence_detector_nodefault.v")));
  auto s = random_stim(12);
  auto fire = sim::parse_stimulus(slurp(corpus("stimuli/listing_fire.json")));
  for (const auto& x : fire.drives) s.drives.push_back({x.cycle + 300, x.input, x.value});
  auto ea = rtl::elaborate(d, "sequence_detector");
  auto ta = sim::simulate(ea, s, 1000);
  auto tb = sim::simulate(rtl::elaborate(repaired(d), "sequence_detector"), s, 1000);
  EXPECT_FALSE(sim::compare_traces(ta, tb, ea.outputs).diverged());
  EXPECT_EQ(sim::activation_cycles(ta, "Tj_Trig"), std::vector<int>{306});
}

TEST(Sanitize, UnresolvableNetRaises) {
  auto m = rtl::parse_verilog(
               "module u(input wire a, input wire b, output reg y);\n"
               "always @(*) begin\n  if (a) y = b;\nend\nendmodule\n")
               .modules.at(0);
  try {
    forge::sanitize_fsm(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CannotInferHoldValue);
  }
  auto partial = forge::sanitize_fsm_partial(m);
  EXPECT_EQ(partial.unresolved, std::vector<std::string>{"y"});
}

TEST(Sanitize, ElseLessIfGainsAnElse) {
  auto m = rtl::parse_verilog(
               "module e(input wire clk, input wire rst, input wire go, output reg [1:0] s);\n"
               "reg [1:0] n;\n"
               "always @(*) begin\n  if (go) n = s + 2'd1;\nend\n"
               "always @(posedge clk) begin\n  if (rst) s <= 2'd0;\n  else s <= n;\nend\nendmodule\n")
               .modules.at(0);
  auto r = forge::sanitize_fsm(m);
  ASSERT_EQ(r.fixes.size(), 1U);
  EXPECT_EQ(r.fixes[0].kind, "else_branch");
  // s is the register this next-state net loads, so its reset constant is the hold.
  EXPECT_EQ(r.fixes[0].hold, "2'd0");
  EXPECT_NE(rtl::emit_module(r.module).find("else"), std::string::npos);
}
