// SPDX-License-Identifier: Apache-2.0
#include "htkit/llm/bridge.hpp"

#include "htkit/rtl/elaborate.hpp"
#include "htkit/rtl/parser.hpp"
#include "htkit/sim/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace htkit::llm {

const char* to_string(Purpose p) {
  switch (p) {
    case Purpose::Generate: return "generate";
    case Purpose::AssessLogic: return "assess_logic";
    case Purpose::AssessFsm: return "assess_fsm";
    case Purpose::AssessIo: return "assess_io";
    case Purpose::AssessSignal: return "assess_signal";
  }
  return "?";
}

namespace {

const char* kClosing = "Write a hardware module in Verilog that is synthesizable.";

std::string describe_payload(const forge::PayloadSpec& p) {
  switch (p.effect) {
    case forge::PayloadEffect::Dos:
      return "force output " + p.target_output + " to zero while the Trojan is enabled";
    case forge::PayloadEffect::PerfDegrade:
      return "force output " + p.target_output + " to zero during the first " +
             std::to_string(p.width) + " cycles of every " + std::to_string(p.period) +
             "-cycle window while the Trojan is enabled";
    case forge::PayloadEffect::InfoLeak:
      return "copy " + p.source_net + " onto a new output port " + p.leak_port +
             " while the Trojan is enabled and drive it to zero otherwise";
  }
  return "";
}

std::string fenced(const std::string& source) {
  std::string s = "```verilog\n" + source;
  if (!s.empty() && s.back() != '\n') s += '\n';
  return s + "```\n";
}

}  // namespace

PromptBundle build_generation_prompt(const std::string& spec_text, const forge::TriggerSpec& t,
                                     const forge::PayloadSpec& p, const std::string& alert_net) {
  forge::validate(t);
  forge::validate(p);
  PromptBundle b;
  b.purpose = Purpose::Generate;
  b.system_text =
      "You are a hardware security engineer writing synthesizable Verilog-2001 for Trojan "
      "benchmark research. Use a single clock named clk and a synchronous active-high reset "
      "named rst. Every combinational always block must assign each of its outputs on every "
      "path, and every case statement must have a default arm.";
  b.context = spec_text;
  std::ostringstream u;
  if (!spec_text.empty()) u << "Design description:\n" << spec_text << "\n\n";
  u << "Trigger: once " << forge::describe(t) << ", alert by setting a 1-bit signal (" << alert_net
    << ").\n";
  u << "The alert must stay low during reset and right after reset is released; it may rise only "
       "when the trigger condition has been met.\n";
  u << "Payload: " << describe_payload(p) << ".\n";
  u << kClosing;
  b.user_text = u.str();
  return b;
}

std::vector<PromptBundle> build_assessment_prompts(const std::string& source) {
  if (source.empty()) throw Error(ErrorCode::InvalidSpec, "assessment prompts need source text");
  const std::string system =
      "You review Verilog RTL for hardware Trojans. Answer with a JSON array only. Each element "
      "is an object {\"category\": string, \"nets\": [string], \"line_start\": integer, "
      "\"line_end\": integer, \"rationale\": string}. Answer [] when nothing is suspicious.";
  struct Item {
    Purpose purpose;
    const char* category;
    const char* ask;
  };
  const Item items[] = {
      {Purpose::AssessIo, "io",
       "Inspect the I/O pins. Flag inputs that act as a condition or trigger, for example by "
       "advancing a counter, and can thereby change an output."},
      {Purpose::AssessFsm, "fsm",
       "Inspect every state machine. Flag state machines that perform sequence detection, i.e. "
       "advance only when inputs match particular values in a particular order."},
      {Purpose::AssessLogic, "logic",
       "Inspect the logic. Flag conditions that compare signals against specific constants or "
       "ranges and alter an output only when they hold."},
      {Purpose::AssessSignal, "signal",
       "Inspect the internal signals. Flag signals that stay inactive in normal operation and "
       "only activate otherwise inactive logic under rare conditions."},
  };
  std::vector<PromptBundle> out;
  for (const auto& it : items) {
    PromptBundle b;
    b.purpose = it.purpose;
    b.system_text = system;
    b.context = source;
    b.user_text = std::string(it.ask) + " Use \"" + it.category +
                  "\" as the category of every finding.\n\n" + fenced(source);
    out.push_back(std::move(b));
  }
  return out;
}

BackendConfig BackendConfig::from_env() {
  BackendConfig c;
  if (const char* u = std::getenv("SENTAUR_LLM_URL")) c.endpoint = u;
  if (const char* m = std::getenv("SENTAUR_LLM_MODEL")) c.model = m;
  return c;
}

nlohmann::json config_to_json(const BackendConfig& cfg) {
  return {{"endpoint", cfg.endpoint},     {"model", cfg.model},
          {"api_key_env", cfg.api_key_env}, {"timeout_s", cfg.timeout_s},
          {"max_retries", cfg.max_retries}, {"temperature", BackendConfig::kTemperature}};
}

const std::string& canned_sequence_detector_completion() {
  static const std::string text =
      "Here is a synthesizable sequence detector that raises Tj_Trig once the four plaintexts "
      "have been observed in order.\n\n```verilog\n" R"V(module sequence_detector(input wire clk, input wire rst,  input wire [127:0] state, output reg Tj_Trig);

localparam [2:0] IDLE = 3'b000, SEQ1 = 3'b001,    SEQ2 = 3'b010, SEQ3 = 3'b011,     SEQ4     = 3'b100, TRIGGER  = 3'b101;
reg [2:0] current_state, next_state;
always @(*) begin
    case (current_state)
        IDLE: 
            if (state == 128'h3243f6a8_885a308d_313198a2_e0370734) 
                next_state = SEQ1;
            else 
                next_state = IDLE;

        SEQ1: 
            if (state == 128'h00112233_44556677_8899aabb_ccddeeff) 
                next_state = SEQ2;
            else 
                next_state = IDLE;

        SEQ2: 
            if (state == 128'h00000000_00000000_00000000_00000000) 
                next_state = SEQ3;
            else 
                next_state = IDLE;

        SEQ3: 
            if (state == 128'h00000000_00000000_00000000_00000001) 
                next_state = SEQ4;
            else 
                next_state = IDLE;

        SEQ4: 
            next_state = TRIGGER;

        TRIGGER: 
            next_state = IDLE;

        default: 
            next_state = IDLE;
    endcase
end

always @(posedge clk) begin
    if (rst)
        current_state <= IDLE;
    else
        current_state <= next_state;
end

always @(current_state) begin
    Tj_Trig = (current_state == TRIGGER) ? 1'b1 : 1'b0;
end
endmodule)V" "\n```\n\n"
      "The default arm keeps the next-state logic free of latches.\n";
  return text;
}

MockBackend::MockBackend() {
  responses[Purpose::Generate] = canned_sequence_detector_completion();
  for (auto p : {Purpose::AssessLogic, Purpose::AssessFsm, Purpose::AssessIo, Purpose::AssessSignal}) {
    responses[p] = "[]";
  }
}

std::string MockBackend::complete(const BackendConfig&, const PromptBundle& bundle) {
  ++calls;
  if (!failures.empty()) {
    BackendError e = failures.front();
    failures.pop_front();
    throw e;
  }
  auto it = responses.find(bundle.purpose);
  if (it == responses.end()) throw BackendError(ErrorCode::MalformedResponse, "no canned response");
  return it->second;
}

std::string invoke(const BackendConfig& cfg, const PromptBundle& bundle, Backend& backend,
                   const SleepFn& sleep) {
  if (bundle.user_text.empty()) throw Error(ErrorCode::InvalidSpec, "prompt has no user text");
  for (int attempt = 0;; ++attempt) {
    try {
      return backend.complete(cfg, bundle);
    } catch (const BackendError& e) {
      bool transient = e.code() == ErrorCode::Transport || e.code() == ErrorCode::RateLimited;
      if (!transient || attempt >= cfg.max_retries) throw;
      double delay = cfg.base_delay_s * std::ldexp(1.0, attempt);
      if (e.retry_after_s() && *e.retry_after_s() > delay) delay = *e.retry_after_s();
      if (sleep) {
        sleep(delay);
      } else {
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
    }
  }
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::string ltrim(const std::string& s) {
  auto i = s.find_first_not_of(" \t\r");
  return i == std::string::npos ? "" : s.substr(i);
}

std::optional<std::string> first_fence(const std::string& text) {
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (ltrim(lines[i]).rfind("```", 0) != 0) continue;
    std::string body;
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (ltrim(lines[j]).rfind("```", 0) == 0) return body;
      body += lines[j] + "\n";
    }
    return std::nullopt;
  }
  return std::nullopt;
}

bool starts_with_word(const std::string& line, const std::string& word) {
  std::string t = ltrim(line);
  if (t.rfind(word, 0) != 0) return false;
  return t.size() == word.size() || !(std::isalnum(static_cast<unsigned char>(t[word.size()])) ||
                                      t[word.size()] == '_');
}

}  // namespace

std::string extract_verilog(const std::string& completion) {
  if (auto f = first_fence(completion)) return *f;
  auto lines = split_lines(completion);
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!first && starts_with_word(lines[i], "module")) first = i;
    if (first && lines[i].find("endmodule") != std::string::npos) last = i;
  }
  if (!first || !last) throw Error(ErrorCode::NoCodeFound, "completion contains no Verilog module");
  std::string out;
  for (std::size_t i = *first; i <= *last; ++i) out += lines[i] + "\n";
  return out;
}

namespace {

std::optional<std::vector<LlmFinding>> parse_findings(const std::string& text, const char* category) {
  std::string body = first_fence(text).value_or(text);
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_array()) return std::nullopt;
  std::vector<LlmFinding> out;
  for (const auto& x : j) {
    if (!x.is_object()) return std::nullopt;
    LlmFinding f;
    f.category = x.value("category", std::string(category));
    if (x.contains("nets") && x["nets"].is_array()) {
      for (const auto& n : x["nets"]) {
        if (n.is_string()) f.nets.push_back(n.get<std::string>());
      }
    }
    f.line_start = x.value("line_start", 0);
    f.line_end = x.value("line_end", f.line_start);
    f.rationale = x.value("rationale", std::string());
    out.push_back(std::move(f));
  }
  return out;
}

const char* category_of(Purpose p) {
  switch (p) {
    case Purpose::AssessIo: return "io";
    case Purpose::AssessFsm: return "fsm";
    case Purpose::AssessLogic: return "logic";
    case Purpose::AssessSignal: return "signal";
    case Purpose::Generate: break;
  }
  return "";
}

}  // namespace

LlmAssessment assess_with_llm(const BackendConfig& cfg, Backend& backend, const std::string& source,
                              const SleepFn& sleep) {
  LlmAssessment out;
  for (auto bundle : build_assessment_prompts(source)) {
    const char* cat = category_of(bundle.purpose);
    auto found = parse_findings(invoke(cfg, bundle, backend, sleep), cat);
    if (!found) {
      bundle.user_text += "\nYour previous answer was not a JSON array. Reply with the JSON array only.";
      found = parse_findings(invoke(cfg, bundle, backend, sleep), cat);
    }
    if (!found) {
      out.failed.push_back(cat);
      continue;
    }
    out.findings.insert(out.findings.end(), found->begin(), found->end());
  }
  return out;
}

namespace {

struct Plan {
  sim::StimulusProgram satisfy;
  sim::StimulusProgram quiet;
  int satisfy_cycles = 0;
  int quiet_cycles = 0;
  int earliest = 0;  // first cycle at which the alert may legitimately rise
  // Each probe cycle must see the alert within kProbeLatency cycles.
  std::vector<int> probes;
};

constexpr int kProbeLatency = 2;

void hold(sim::StimulusProgram& s, const std::string& net, int cycle, const BitVec& v) {
  s.drives.push_back({cycle, net, v});
}

std::optional<BitVec> above(const forge::TriggerSpec& t, int width) {
  BitVec hi = t.hi.resized(width + 1) + BitVec(width + 1, 1);
  if (hi.bit_length() <= width) return hi.resized(width);
  return std::nullopt;
}

std::optional<BitVec> below(const forge::TriggerSpec& t, int width) {
  if (t.lo.is_zero()) return std::nullopt;
  return t.lo.resized(width) - BitVec(width, 1);
}

Plan plan_for(const forge::TriggerSpec& t, const rtl::ElaboratedDesign& e, const std::string& clock,
              const std::string& reset) {
  Plan p;
  for (auto* s : {&p.satisfy, &p.quiet}) {
    s->clock = clock;
    s->reset_net = reset;
    s->reset_cycles = reset.empty() ? 0 : 2;
  }
  const int r = p.satisfy.reset_cycles;
  const int start = r + kPersistenceWindow;
  auto width_of = [&](const std::string& n) {
    const auto* f = e.find_net(n);
    if (!f || !f->top_input) throw Error(ErrorCode::UnknownInput, "'" + n + "' is not a top input");
    return f->width;
  };
  switch (t.cls) {
    case forge::TriggerClass::Time: {
      std::uint64_t lo = t.lo.to_u64();
      std::uint64_t hi = t.hi.to_u64();
      if (hi > 100000) throw Error(ErrorCode::InvalidSpec, "time window too long to simulate");
      p.earliest = r + static_cast<int>(lo) - 1;
      p.satisfy_cycles = r + static_cast<int>(hi) + 8;
      p.quiet_cycles = std::max(1, p.earliest);
      break;
    }
    case forge::TriggerClass::Logic:
    case forge::TriggerClass::Address: {
      int w = width_of(t.net);
      auto up = above(t, w);
      auto down = below(t, w);
      auto off = up ? up : down;
      if (off) {
        hold(p.satisfy, t.net, 0, *off);
        hold(p.quiet, t.net, 0, *off);
      }
      // Probe both bounds and the midpoint, returning out of range between.
      BitVec lo = t.lo.resized(w), hi = t.hi.resized(w);
      BitVec mid = (lo.resized(w + 1) + hi.resized(w + 1)).slice(w, 1);
      int c = start;
      for (const BitVec& v : {lo, mid, hi}) {
        hold(p.satisfy, t.net, c, v);
        p.probes.push_back(c);
        if (off) hold(p.satisfy, t.net, c + 1, *off);
        c += 2 + kProbeLatency;
      }
      if (up && down) {
        for (int q = start; q < start + 1000; q += 2) {
          hold(p.quiet, t.net, q, *down);
          hold(p.quiet, t.net, q + 1, *up);
        }
      }
      p.earliest = off ? start : 0;
      p.satisfy_cycles = c + kProbeLatency;
      p.quiet_cycles = off ? start + 1000 : 0;  // every value satisfies: no quiet run
      break;
    }
    case forge::TriggerClass::StateSequence: {
      int w = width_of(t.net);
      BitVec other(w, 0);
      while (std::any_of(t.sequence.begin(), t.sequence.end(),
                         [&](const BitVec& v) { return v.resized(w) == other; })) {
        other = other + BitVec(w, 1);
      }
      hold(p.satisfy, t.net, 0, other);
      hold(p.quiet, t.net, 0, other);
      const int n = static_cast<int>(t.sequence.size());
      for (int i = 0; i < n; ++i) hold(p.satisfy, t.net, start + i, t.sequence[i].resized(w));
      hold(p.satisfy, t.net, start + n, other);
      p.earliest = start + n - 1;
      p.satisfy_cycles = start + n + 8;
      p.quiet_cycles = start + 1000;
      break;
    }
    case forge::TriggerClass::InputCount: {
      if (width_of(t.net) != 1) throw Error(ErrorCode::WidthMismatch, "event input must be 1 bit");
      if (t.threshold > 100000) throw Error(ErrorCode::InvalidSpec, "threshold too large to simulate");
      const int k = static_cast<int>(t.threshold);
      hold(p.satisfy, t.net, 0, BitVec(1, 0));
      hold(p.satisfy, t.net, start, BitVec(1, 1));
      p.earliest = start + k - 1;
      p.satisfy_cycles = start + k + 8;
      p.quiet_cycles = start + k + 1000;
      break;
    }
  }
  return p;
}

}  // namespace

ValidationResult validate_generated(const std::string& source,
                                    const std::optional<forge::TriggerSpec>& expected,
                                    const std::string& alert_net) {
  ValidationResult v;
  rtl::RtlDesign d;
  try {
    d = rtl::parse_verilog(source, "generated.v");
    v.parsed = true;
  } catch (const Error& e) {
    v.reason = "parse";
    v.detail = e.what();
    return v;
  }
  for (const auto& m : d.modules) {
    auto f = rtl::lint(m);
    v.lint_findings.insert(v.lint_findings.end(), f.begin(), f.end());
  }
  if (!v.lint_findings.empty()) {
    v.reason = "lint";
    for (const auto& f : v.lint_findings) {
      if (!v.detail.empty()) v.detail += "; ";
      v.detail += std::string(rtl::to_string(f.rule)) + ": " + f.message;
    }
    return v;
  }
  if (!expected) {
    v.accepted = true;
    return v;
  }
  v.trigger_verified = false;
  try {
    const rtl::RtlModule* top = nullptr;
    for (auto it = d.modules.rbegin(); it != d.modules.rend() && !top; ++it) {
      if (it->declares(alert_net)) top = &*it;
    }
    if (!top) throw Error(ErrorCode::UnknownNet, "no module declares '" + alert_net + "'");
    auto elab = rtl::elaborate(d, top->name);
    std::string clock = "clk";
    for (const auto& p : elab.processes) {
      if (p.kind == rtl::AlwaysKind::Clocked) {
        clock = p.clock;
        break;
      }
    }
    std::string reset;
    for (const auto& r : elab.state_regs) {
      if (!r.reset_net.empty()) {
        reset = r.reset_net;
        break;
      }
    }
    Plan plan = plan_for(*expected, elab, clock, reset);
    sim::SimOptions opt;
    opt.record = {alert_net};
    v.satisfying_activations =
        sim::activation_cycles(sim::simulate(elab, plan.satisfy, plan.satisfy_cycles, opt), alert_net);
    if (plan.quiet_cycles > 0) {
      v.quiet_activations =
          sim::activation_cycles(sim::simulate(elab, plan.quiet, plan.quiet_cycles, opt), alert_net);
    }
    bool early = !v.satisfying_activations.empty() && v.satisfying_activations.front() < plan.earliest;
    const int settle = plan.satisfy.reset_cycles + kPersistenceWindow;
    bool quiet_early = !v.quiet_activations.empty() && v.quiet_activations.front() < settle;
    if (early || quiet_early) {
      v.reason = "persistence";
      int at = early ? v.satisfying_activations.front() : v.quiet_activations.front();
      v.detail = "alert rose at cycle " + std::to_string(at) + ", before the trigger condition was met";
      return v;
    }
    if (v.satisfying_activations.empty()) {
      v.reason = "trigger";
      v.detail = "alert never rose under the satisfying stimulus";
      return v;
    }
    for (int probe : plan.probes) {
      auto it = std::lower_bound(v.satisfying_activations.begin(), v.satisfying_activations.end(), probe);
      if (it == v.satisfying_activations.end() || *it > probe + kProbeLatency) {
        v.reason = "trigger";
        v.detail = "alert stayed low for the in-range value applied at cycle " + std::to_string(probe);
        return v;
      }
    }
    if (!v.quiet_activations.empty()) {
      v.reason = "trigger";
      v.detail = "alert rose at cycle " + std::to_string(v.quiet_activations.front()) +
                 " under the non-satisfying stimulus";
      return v;
    }
  } catch (const Error& e) {
    v.reason = "trigger";
    v.detail = e.what();
    return v;
  }
  v.trigger_verified = true;
  v.accepted = true;
  return v;
}

nlohmann::json validation_to_json(const ValidationResult& v) {
  nlohmann::json j;
  j["parsed"] = v.parsed;
  j["lint_findings"] = nlohmann::json::array();
  for (const auto& f : v.lint_findings) {
    j["lint_findings"].push_back({{"rule", rtl::to_string(f.rule)},
                                  {"net", f.net},
                                  {"line", f.location.line},
                                  {"message", f.message}});
  }
  j["trigger_verified"] = v.trigger_verified ? nlohmann::json(*v.trigger_verified) : nlohmann::json();
  j["satisfying_activations"] = v.satisfying_activations;
  j["quiet_activations"] = v.quiet_activations;
  j["verdict"] = v.accepted ? "accepted" : "rejected";
  j["reason"] = v.reason;
  j["detail"] = v.detail;
  return j;
}

}  // namespace htkit::llm
