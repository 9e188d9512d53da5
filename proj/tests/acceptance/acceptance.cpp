// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is the
// number of failed criteria.

#include "../common/oracle.hpp"

#include "htkit/assess/assess.hpp"
#include "htkit/forge/sanitize.hpp"
#include "htkit/llm/bridge.hpp"
#include "htkit/ops/signal_ops.hpp"
#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/emit.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <regex>
#include <sstream>

using namespace htkit;
using htkit::oracle::corpus;
using htkit::oracle::slurp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

constexpr std::uint64_t kSeed = 0x5eed;
constexpr int kTriggerCycles = 10000;

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus(""))) {
    if (e.path().extension() == ".v") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fmt_set_diff(const std::set<int>& want, const std::set<int>& got) {
  std::ostringstream s;
  s << "expected " << want.size() << " activations, got " << got.size();
  for (int c : want) {
    if (!got.count(c)) {
      s << "; first missing cycle " << c;
      break;
    }
  }
  for (int c : got) {
    if (!want.count(c)) {
      s << "; first spurious cycle " << c;
      break;
    }
  }
  return s.str();
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

Outcome trigger_exactness() {
  Outcome o;
  auto stream = oracle::make_ram_stream(kSeed, kTriggerCycles, 2, 6000);
  auto stim = oracle::to_stimulus(stream);
  int total = 0;
  for (const char* spec : {"time:50:200", "logic:din_a:1000:2000", "addr:addr_a:2000:3000",
                           "seq:din_a:0x55,0xAA,0xFF", "count:we_a:1000"}) {
    auto ins = oracle::insert_into_ram(spec, "dos");
    auto elab = rtl::elaborate(ins.design, "dpram");
    auto trace = sim::simulate(elab, stim, kTriggerCycles, {{ins.manifest.trigger_net}});
    auto got = as_set(sim::activation_cycles(trace, ins.manifest.trigger_net));
    auto want = oracle::trigger_oracle(ins.manifest.trigger, stream);
    if (want.empty()) o.fail(std::string(spec) + ": stream never satisfies the trigger");
    if (got != want) o.fail(std::string(spec) + ": " + fmt_set_diff(want, got));
    total += static_cast<int>(want.size());
  }
  if (o.pass) o.detail = "5 classes x " + std::to_string(kTriggerCycles) + " cycles, " + std::to_string(total) +
                         " activations, 0 mismatches";
  return o;
}

Outcome listing_reproduction() {
  Outcome o;
  auto design = rtl::parse_verilog(slurp(corpus("sequence_detector.v")), "sequence_detector.v");
  auto elab = rtl::elaborate(design, "sequence_detector");
  auto fire = sim::parse_stimulus(slurp(corpus("stimuli/listing_fire.json")));
  auto act = sim::activation_cycles(sim::simulate(elab, fire, fire.cycles), "Tj_Trig");
  if (act != std::vector<int>{6}) o.fail("firing stimulus: expected one activation at cycle 6");

  sim::StimulusProgram quiet;
  quiet.reset_net = "rst";
  quiet.reset_cycles = 2;
  quiet.random = sim::RandomGenerator{kSeed, {}, {"rst"}};
  auto q = sim::activation_cycles(sim::simulate(elab, quiet, 1002), "Tj_Trig");
  if (!q.empty()) o.fail("fired " + std::to_string(q.size()) + " times on non-matching input, first at " +
                         std::to_string(q.front()));
  if (o.pass) o.detail = "one activation at cycle 6; 0 activations over 1000 post-reset cycles";
  return o;
}

Outcome payload_semantics() {
  Outcome o;
  auto stream = oracle::make_ram_stream(kSeed + 1, 6000, 2, 3000);
  auto stim = oracle::to_stimulus(stream);
  auto host = rtl::parse_verilog(slurp(corpus("dpram.v")), "dpram.v");
  auto golden = sim::simulate(rtl::elaborate(host, "dpram"), stim, stream.cycles());
  int checked = 0;
  for (const auto& [trig, eff] : oracle::all_combinations()) {
    auto ins = oracle::insert_into_ram(trig, eff);
    auto actual = sim::simulate(rtl::elaborate(ins.design, "dpram"), stim, stream.cycles());
    const auto& m = ins.manifest;
    auto enable = oracle::enable_oracle(m.trigger, oracle::trigger_oracle(m.trigger, stream), stream);
    auto expected = oracle::expected_payload_trace(golden, m.payload, enable, stream);
    auto report = sim::compare_traces(expected, actual, expected.names);
    if (report.diverged()) {
      o.fail(trig + " / " + eff + ": first divergence at cycle " + std::to_string(*report.first_divergence_cycle));
    }
    ++checked;
  }
  if (o.pass) o.detail = std::to_string(checked) + " trigger x effect designs bit-exact (P=16, W=4)";
  return o;
}

std::string flags_str(const assess::FlagRow& f) {
  std::string s;
  for (bool b : {f.io, f.fsm, f.logic, f.signal}) s += b ? "*" : "o";
  return s;
}

Outcome assessment_pattern() {
  Outcome o;
  int exact = 0, exact_renamed = 0;
  const auto& rows = oracle::table_rows();
  for (const auto& row : rows) {
    auto ins = oracle::insert_into_ram(row.trigger, row.effect);
    assess::FlagRow want{row.io, row.fsm, row.logic, row.signal};
    auto got = assess::assess(ins.design, "dpram").flags();
    if (got == want) {
      ++exact;
    } else {
      o.fail(row.trigger + " / " + row.effect + ": " + flags_str(got) + " vs " + flags_str(want));
    }
    // Adversarial renaming: every inserted identifier gets a bland name.
    auto renamed = ins.design;
    int k = 0;
    for (const auto& name : ins.manifest.touched_names()) {
      renamed = ops::rename_signal(renamed, "dpram", name, "sig" + std::to_string(k++) + "_q");
    }
    auto got_r = assess::assess(renamed, "dpram").flags();
    if (got_r == want) {
      ++exact_renamed;
    } else {
      o.fail(row.trigger + " / " + row.effect + " renamed: " + flags_str(got_r) + " vs " + flags_str(want));
    }
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(exact) + "/" + std::to_string(rows.size()) +
             " rows exact, " + std::to_string(exact_renamed) + "/" + std::to_string(rows.size()) +
             " after renaming";
  return o;
}

Outcome sanitizer() {
  Outcome o;
  auto listing = rtl::parse_verilog(slurp(corpus("sequence_detector.v")));
  auto broken = rtl::parse_verilog(slurp(corpus("sequence_detector_nodefault.v")));
  auto fixed = forge::sanitize_fsm(broken.modules.at(0));
  if (!(fixed.module == listing.modules.at(0))) o.fail("repaired de-defaulted listing differs from the listing");

  int files = 0;
  for (const auto& path : corpus_files()) {
    auto d = rtl::parse_verilog(slurp(path), path);
    for (const auto& m : d.modules) {
      auto once = forge::sanitize_fsm_partial(m);
      auto twice = forge::sanitize_fsm_partial(once.module);
      if (!(twice.module == once.module) || !twice.fixes.empty()) o.fail("not idempotent on " + path);
    }
    ++files;
  }

  // Equivalence on the paths the original assigns: the listing over random
  // input with the plaintexts planted twice, and the latch design with load
  // held high.
  auto equivalent = [&](const rtl::RtlDesign& a, const std::string& top, const sim::StimulusProgram& stim,
                        const std::string& what) {
    rtl::RtlDesign b = a;
    for (auto& m : b.modules) m = forge::sanitize_fsm_partial(m).module;
    auto ea = rtl::elaborate(a, top);
    auto eb = rtl::elaborate(b, top);
    auto r = sim::compare_traces(sim::simulate(ea, stim, 1000), sim::simulate(eb, stim, 1000), ea.outputs);
    if (r.diverged()) o.fail(what + " diverges at cycle " + std::to_string(*r.first_divergence_cycle));
  };
  sim::StimulusProgram s1;
  s1.reset_net = "rst";
  s1.reset_cycles = 2;
  s1.random = sim::RandomGenerator{kSeed, {}, {"rst"}};
  auto fire = sim::parse_stimulus(slurp(corpus("stimuli/listing_fire.json")));
  for (int base : {100, 500}) {
    for (const auto& d : fire.drives) s1.drives.push_back({d.cycle - 2 + base, d.input, d.value});
  }
  equivalent(broken, "sequence_detector", s1, "de-defaulted listing");

  auto latch = rtl::parse_verilog(slurp(corpus("flag_latch.v")), "flag_latch.v");
  sim::StimulusProgram s2;
  s2.reset_net = "rst";
  s2.reset_cycles = 2;
  s2.generators["load"] = {sim::ValueGenerator::Kind::Constant, BitVec(1, 1)};
  s2.random = sim::RandomGenerator{kSeed, {}, {"rst"}};
  equivalent(latch, "flag_latch", s2, "flag_latch");

  if (o.pass) {
    o.detail = "listing restored (" + std::to_string(fixed.fixes.size()) + " fix), idempotent on " +
               std::to_string(files) + " files, covered-path equivalence over 1000 cycles";
  }
  return o;
}

Outcome round_trip_determinism() {
  Outcome o;
  int files = 0;
  for (const auto& path : corpus_files()) {
    auto d1 = rtl::parse_verilog(slurp(path), path);
    auto text = rtl::emit_verilog(d1);
    auto d2 = rtl::parse_verilog(text, path);
    if (!(d1 == d2)) o.fail("round trip changed " + path);
    if (rtl::emit_verilog(d2) != text) o.fail("emit not a fixed point on " + path);
    ++files;
  }

  auto run_once = [](std::uint64_t seed) {
    auto ins = oracle::insert_into_ram("seq:din_a:0x55,0xAA,0xFF", "perf");
    auto elab = rtl::elaborate(ins.design, "dpram");
    sim::StimulusProgram s;
    s.reset_net = "rst";
    s.reset_cycles = 2;
    s.random = sim::RandomGenerator{seed, {}, {"rst"}};
    auto report = assess::assess(elab, "dpram.v");
    report.metrics = assess::rare_net_metrics(elab, seed, 500);
    return std::array<std::string, 3>{rtl::emit_verilog(ins.design), sim::trace_to_json(sim::simulate(elab, s, 500)),
                                      assess::report_to_json(report)};
  };
  auto a = run_once(kSeed), b = run_once(kSeed), c = run_once(kSeed + 1);
  if (a != b) o.fail("identical seeds produced different bytes");
  if (a[1] == c[1]) o.fail("different seeds produced the same trace");
  if (o.pass) o.detail = std::to_string(files) + "/" + std::to_string(files) +
                         " files round-trip; RTL, trace and report byte-identical per seed";
  return o;
}

Outcome offline_llm() {
  Outcome o;
  llm::BackendConfig cfg;
  cfg.api_key_env = "HTKIT_ACCEPTANCE_UNSET_KEY";
  llm::MockBackend mock;
  auto listing_trigger = forge::parse_trigger(
      "seq:state:0x3243f6a8885a308d313198a2e0370734,0x00112233445566778899aabbccddeeff,0x0,0x1");
  auto bundle = llm::build_generation_prompt("", listing_trigger, forge::parse_effect("dos", "out"));
  std::string code = llm::extract_verilog(llm::invoke(cfg, bundle, mock));
  auto ok = llm::validate_generated(code, listing_trigger);
  if (!ok.accepted) o.fail("canned listing rejected: " + ok.reason + " " + ok.detail);

  auto latchy = std::regex_replace(code, std::regex(R"(default:\s*\n\s*next_state = IDLE;)"), "");
  auto v1 = llm::validate_generated(latchy, listing_trigger);
  if (latchy == code || v1.accepted || v1.reason != "lint") o.fail("latch-inferring mutant not rejected by lint");

  auto eager = std::regex_replace(code, std::regex(R"(current_state <= IDLE;)"), "current_state <= SEQ4;");
  auto v2 = llm::validate_generated(eager, listing_trigger);
  if (eager == code || v2.accepted || v2.reason != "persistence") o.fail("reset-firing mutant not rejected");

  // The HTTP backend must refuse before touching the network without a key.
  llm::HttpBackend http;
  try {
    http.complete(cfg, bundle);
    o.fail("HTTP backend ran without a key");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Auth) o.fail(std::string("expected Auth, got ") + error_code_name(e.code()));
  }
  if (o.pass) o.detail = "mock path accepted the canned listing; latch and reset-firing mutants rejected";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"trigger-exactness", trigger_exactness},   {"listing-reproduction", listing_reproduction},
      {"payload-semantics", payload_semantics},   {"assessment-pattern", assessment_pattern},
      {"sanitizer", sanitizer},                   {"round-trip-determinism", round_trip_determinism},
      {"offline-llm", offline_llm},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-24s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
