// SPDX-License-Identifier: Apache-2.0
#include "../common/oracle.hpp"

#include "htkit/ops/signal_ops.hpp"
#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

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

rtl::RtlDesign ram_top() { return rtl::parse_verilog(slurp(corpus("ram_top.v")), "ram_top.v"); }

sim::StimulusProgram ram_top_stim() {
  sim::StimulusProgram s;
  s.reset_net = "rst";
  s.reset_cycles = 2;
  s.random = sim::RandomGenerator{21, {}, {"rst"}};
  return s;
}

void expect_same_outputs(const rtl::RtlDesign& a, const rtl::RtlDesign& b, const std::string& top,
                         const std::vector<std::string>& outputs) {
  auto s = ram_top_stim();
  auto ta = sim::simulate(rtl::elaborate(a, top), s, 500);
  auto tb = sim::simulate(rtl::elaborate(b, top), s, 500);
  EXPECT_FALSE(sim::compare_traces(ta, tb, outputs).diverged());
}

void expect_lint_clean(const rtl::RtlDesign& d) {
  for (const auto& m : d.modules) EXPECT_TRUE(rtl::lint(m).empty()) << rtl::emit_module(m);
}

}  // namespace

TEST(Ops, AddPortTiesOffInstances) {
  auto d = ops::add_port(ram_top(), "dpram", "dbg", rtl::Direction::Input, 4);
  const auto* inst = &d.find_module("ram_top")->instances.at(0);
  auto it = std::find_if(inst->connections.begin(), inst->connections.end(),
                         [](const auto& c) { return c.port == "dbg"; });
  ASSERT_NE(it, inst->connections.end());
  EXPECT_EQ(rtl::emit_expr(it->expr), "4'd0");
  expect_same_outputs(ram_top(), d, "ram_top", {"rd"});
  EXPECT_EQ(code_of([&] { ops::add_port(d, "dpram", "dbg", rtl::Direction::Input, 1); }), ErrorCode::NameCollision);
  EXPECT_EQ(code_of([&] { ops::add_port(d, "ghost", "x", rtl::Direction::Input, 1); }), ErrorCode::UnknownModule);
}

TEST(Ops, AddNetDeclares) {
  auto d = ops::add_net(ram_top(), "ram_top", "spare", rtl::NetKind::Reg, 3);
  EXPECT_EQ(d.find_module("ram_top")->signal_width("spare"), 3);
}

TEST(Ops, JoinOrsSingleBitOriginals) {
  auto d = rtl::parse_verilog(
      "module j(input wire a, input wire b, output wire y, output wire z);\n"
      "assign y = a;\nassign z = b;\nendmodule\n");
  auto joined = ops::join_signals(d, "j", {"a", "b"}, "ab");
  auto text = rtl::emit_verilog(joined);
  EXPECT_NE(text.find("assign ab = a | b;"), std::string::npos) << text;
  EXPECT_NE(text.find("assign y = ab;"), std::string::npos) << text;
  expect_lint_clean(joined);
  EXPECT_EQ(code_of([&] { ops::join_signals(d, "j", {"a", "q"}, "x"); }), ErrorCode::UnknownNet);
  auto wide = rtl::parse_verilog("module w(input wire a, input wire [3:0] b, output wire y);\nassign y = a;\nendmodule\n");
  EXPECT_EQ(code_of([&] { ops::join_signals(wide, "w", {"a", "b"}, "x"); }), ErrorCode::WidthMismatch);
}

TEST(Ops, JoinPreservesBehaviourWhenOriginalsAgree) {
  auto d = rtl::parse_verilog(
      "module j(input wire clk, input wire rst, input wire a, output reg y);\nwire c;\nassign c = a;\n"
      "always @(posedge clk) begin\n  if (rst) y <= 1'b0;\n  else y <= a ^ c;\nend\nendmodule\n");
  auto joined = ops::join_signals(d, "j", {"a", "c"}, "ac");
  sim::StimulusProgram s;
  s.reset_net = "rst";
  s.reset_cycles = 1;
  s.random = sim::RandomGenerator{2, {}, {"rst"}};
  auto ta = sim::simulate(rtl::elaborate(d, "j"), s, 200);
  auto tb = sim::simulate(rtl::elaborate(joined, "j"), s, 200);
  // a ^ c is always 0; after the join both reads see a | a.
  EXPECT_FALSE(sim::compare_traces(ta, tb, {"y"}).diverged());
}

TEST(Ops, RouteUpThroughTheHierarchy) {
  auto r = ops::route_signal(ram_top(), "dpram", "we_a", "ram_top");
  ASSERT_EQ(r.carriers.size(), 2U);
  EXPECT_EQ(r.carriers.front(), "we_a");
  const auto* top = r.design.find_module("ram_top");
  ASSERT_TRUE(top->declares(r.carriers.back()));
  expect_lint_clean(r.design);
  expect_same_outputs(ram_top(), r.design, "ram_top", {"rd"});
  // The carried value equals the top-level input it came from.
  auto tr = sim::simulate(rtl::elaborate(r.design, "ram_top"), ram_top_stim(), 100);
  for (int c = 0; c < 100; ++c) EXPECT_EQ(tr.at(c, r.carriers.back()), tr.at(c, "we"));
}

TEST(Ops, RouteDownAndCollisionSuffix) {
  auto d = ops::add_net(ram_top(), "dpram", "we", rtl::NetKind::Wire, 1);
  d = ops::rename_signal(d, "dpram", "we", "we_r0");
  auto r = ops::route_signal(d, "ram_top", "we", "dpram");
  ASSERT_EQ(r.carriers.size(), 2U);
  EXPECT_NE(r.carriers.back(), "we_r0");
  EXPECT_EQ(code_of([&] { ops::route_signal(ram_top(), "dual_port_ram", "we", "ram_top"); }), ErrorCode::UnknownModule);
  auto two = rtl::parse_verilog(
      "module a(input wire x, output wire y);\nassign y = x;\nendmodule\n"
      "module b(input wire x, output wire y);\nassign y = x;\nendmodule\n");
  EXPECT_EQ(code_of([&] { ops::route_signal(two, "a", "x", "b"); }), ErrorCode::NoPath);
}

TEST(Ops, RenameModuleUpdatesInstances) {
  auto d = ops::rename_module(ram_top(), "dpram", "memory_pair");
  EXPECT_EQ(d.find_module("ram_top")->instances.at(0).module_name, "memory_pair");
  expect_same_outputs(ram_top(), d, "ram_top", {"rd"});
  EXPECT_EQ(code_of([&] { ops::rename_module(d, "memory_pair", "ram_top"); }), ErrorCode::NameCollision);
  EXPECT_EQ(code_of([&] { ops::rename_module(d, "memory_pair", "dual_port_ram"); }), ErrorCode::NameCollision);
}

TEST(Ops, RenamePortUpdatesParents) {
  auto d = ops::rename_signal(ram_top(), "dpram", "din_a", "data_in");
  const auto& conns = d.find_module("ram_top")->instances.at(0).connections;
  EXPECT_TRUE(std::any_of(conns.begin(), conns.end(), [](const auto& c) { return c.port == "data_in"; }));
  expect_same_outputs(ram_top(), d, "ram_top", {"rd"});
  EXPECT_EQ(code_of([&] { ops::rename_signal(d, "dpram", "data_in", "we_a"); }), ErrorCode::NameCollision);
}

TEST(Ops, EditScriptRoundTripAndReplay) {
  auto script = nlohmann::json::parse(R"({"edits": [
    {"op": "add_net", "module": "ram_top", "name": "probe", "kind": "wire", "width": 1},
    {"op": "route", "source_module": "dpram", "net": "we_a", "dest_module": "ram_top"},
    {"op": "rename_module", "old": "dpram", "new": "mem2"},
    {"op": "rename_signal", "module": "ram_top", "old": "rd", "new": "read_data"}
  ]})");
  auto edits = ops::edits_from_json(script);
  ASSERT_EQ(edits.size(), 4U);
  auto run = ops::apply_edits(ram_top(), edits);
  EXPECT_FALSE(run.log.at(1).resolved.empty());
  auto again = ops::apply_edits(ram_top(), ops::edits_from_json(ops::edits_to_json(run.log)));
  EXPECT_EQ(rtl::emit_verilog(again.design), rtl::emit_verilog(run.design));
  EXPECT_NE(run.design.find_module("mem2"), nullptr);
  EXPECT_TRUE(run.design.find_module("ram_top")->find_port("read_data"));
}

TEST(Ops, MalformedEditScript) {
  EXPECT_EQ(code_of([] { ops::edits_from_json(nlohmann::json::parse(R"([{"op": "explode"}])")); }),
            ErrorCode::InvalidSpec);
  EXPECT_EQ(code_of([] { ops::edits_from_json(nlohmann::json::parse(R"({"edits": 3})")); }), ErrorCode::InvalidSpec);
}
