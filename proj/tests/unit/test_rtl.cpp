// SPDX-License-Identifier: Apache-2.0
#include "../common/oracle.hpp"

#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/lint.hpp"
#include "htkit/rtl/parser.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace htkit;
using htkit::oracle::corpus;
using htkit::oracle::golden;
using htkit::oracle::slurp;

namespace {

ErrorCode parse_code(const std::string& src) {
  try {
    rtl::parse_verilog(src);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << src;
  return ErrorCode::NoCodeFound;
}

ErrorCode elab_code(const std::string& src, const std::string& top) {
  try {
    rtl::elaborate(rtl::parse_verilog(src), top);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error elaborating " << top;
  return ErrorCode::NoCodeFound;
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus(""))) {
    if (e.path().extension() == ".v") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

class CorpusFile : public ::testing::TestWithParam<std::string> {};

TEST_P(CorpusFile, RoundTripIsStructurallyEqual) {
  auto d1 = rtl::parse_verilog(slurp(corpus(GetParam())), GetParam());
  auto text = rtl::emit_verilog(d1);
  auto d2 = rtl::parse_verilog(text, GetParam());
  EXPECT_TRUE(d1 == d2);
  EXPECT_EQ(rtl::emit_verilog(d2), text);
}

TEST_P(CorpusFile, EmitMatchesGolden) {
  auto stem = GetParam().substr(0, GetParam().size() - 2);
  auto d = rtl::parse_verilog(slurp(corpus(GetParam())), GetParam());
  EXPECT_EQ(rtl::emit_verilog(d), golden(stem));
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusFile, ::testing::ValuesIn(corpus_files()),
                         [](const auto& info) {
                           std::string n = info.param.substr(0, info.param.size() - 2);
                           std::replace(n.begin(), n.end(), '.', '_');
                           return n;
                         });

TEST(Parser, SyntaxErrorCarriesPosition) {
  try {
    rtl::parse_verilog("module m(input wire a);\nassign = a;\nendmodule\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.col(), 0);
  }
}

TEST(Parser, UnsupportedConstructsFailLoudly) {
  EXPECT_EQ(parse_code("module m(input wire a, output reg b);\ninitial b = 0;\nendmodule\n"),
            ErrorCode::UnsupportedConstruct);
  EXPECT_EQ(parse_code("module m(input wire a, output wire b);\nassign b = a * a;\nendmodule\n"),
            ErrorCode::UnsupportedConstruct);
}

TEST(Parser, SecondDriverIsRejected) {
  EXPECT_EQ(parse_code("module m(input wire a, output wire b);\nassign b = a;\nassign b = ~a;\nendmodule\n"),
            ErrorCode::MultiDriver);
}

TEST(Parser, SizedConstantsKeepWidthAndRadix) {
  auto d = rtl::parse_verilog(
      "module m(input wire [127:0] s, output wire hit);\n"
      "assign hit = s == 128'h3243f6a8_885a308d_313198a2_e0370734;\nendmodule\n");
  auto text = rtl::emit_verilog(d);
  EXPECT_NE(text.find("128'h3243f6a8885a308d313198a2e0370734"), std::string::npos) << text;
}

TEST(Elaborate, ResolvesHierarchyAndRam) {
  auto d = rtl::parse_verilog(slurp(corpus("ram_top.v")), "ram_top.v");
  auto e = rtl::elaborate(d, "ram_top");
  ASSERT_EQ(e.rams.size(), 1U);
  EXPECT_EQ(e.rams[0].addr_width, 12);
  EXPECT_EQ(e.rams[0].data_width, 16);
  EXPECT_EQ(e.outputs, std::vector<std::string>{"rd"});
  EXPECT_EQ(e.width_of("wd"), 16);
}

TEST(Elaborate, StructuralErrors) {
  const std::string leaf = "module a(input wire x, output wire y);\nassign y = x;\nendmodule\n";
  EXPECT_EQ(elab_code(leaf, "nope"), ErrorCode::UnknownTop);
  EXPECT_EQ(elab_code("module t(input wire x, output wire y);\nmissing u(.x(x), .y(y));\nendmodule\n", "t"),
            ErrorCode::UnresolvedInstance);
  EXPECT_EQ(elab_code("module t(input wire x, output wire y);\nt u(.x(x), .y(y));\nendmodule\n", "t"),
            ErrorCode::RecursiveInstantiation);
  EXPECT_EQ(elab_code("module t(input wire x, output wire y);\nwire p;\nwire q;\n"
                      "assign p = q ^ x;\nassign q = p;\nassign y = q;\nendmodule\n",
                      "t"),
            ErrorCode::CombinationalCycle);
}

TEST(Lint, IncompleteCombinationalAssignmentIsALatch) {
  auto d = rtl::parse_verilog(slurp(corpus("flag_latch.v")));
  auto f = rtl::lint(d.modules.at(0));
  ASSERT_EQ(f.size(), 2U);
  for (const auto& x : f) EXPECT_EQ(x.rule, rtl::LintRule::LatchInference);
  EXPECT_EQ(f[0].net, "q_next");
  EXPECT_EQ(f[1].net, "flag_next");
}

TEST(Lint, ShippedListingIsClean) {
  auto d = rtl::parse_verilog(slurp(corpus("sequence_detector.v")));
  EXPECT_TRUE(rtl::lint(d.modules.at(0)).empty());
  auto broken = rtl::parse_verilog(slurp(corpus("sequence_detector_nodefault.v")));
  auto f = rtl::lint(broken.modules.at(0));
  ASSERT_EQ(f.size(), 1U);
  EXPECT_EQ(f[0].net, "next_state");
}

TEST(Lint, WidthMismatchOnComparison) {
  auto d = rtl::parse_verilog(
      "module m(input wire [7:0] a, input wire [3:0] c, output wire b);\nassign b = a == c;\nendmodule\n");
  auto f = rtl::lint(d.modules.at(0));
  ASSERT_FALSE(f.empty());
  EXPECT_EQ(f[0].rule, rtl::LintRule::WidthMismatch);
}

TEST(Elaborate, CellCountGrowsWithInsertedLogic) {
  auto host = rtl::parse_verilog(slurp(corpus("dpram.v")));
  auto base = rtl::cell_count(rtl::elaborate(host, "dpram"));
  auto ins = oracle::insert_into_ram("count:we_a:1000", "perf");
  auto grown = rtl::cell_count(rtl::elaborate(ins.design, "dpram"));
  EXPECT_GT(grown.comb_ops, base.comb_ops);
  EXPECT_GT(grown.reg_bits, base.reg_bits);
}
