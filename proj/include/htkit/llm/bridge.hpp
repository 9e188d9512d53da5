// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/errors.hpp"
#include "htkit/forge/spec.hpp"
#include "htkit/rtl/lint.hpp"

#include <nlohmann/json_fwd.hpp>

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace htkit::llm {

enum class Purpose { Generate, AssessLogic, AssessFsm, AssessIo, AssessSignal };

const char* to_string(Purpose p);

struct PromptBundle {
  Purpose purpose = Purpose::Generate;
  std::string system_text;
  std::string user_text;
  std::string context;  // embedded RTL or design description, may be empty
};

/// The templates are reconstructions; only the closing instruction of the
/// generation prompt is fixed wording.
PromptBundle build_generation_prompt(const std::string& spec_text, const forge::TriggerSpec& t,
                                     const forge::PayloadSpec& p,
                                     const std::string& alert_net = "Tj_Trig");

/// One bundle per assessment category, in io, fsm, logic, signal order.
/// Throws Error(InvalidSpec) on empty source.
std::vector<PromptBundle> build_assessment_prompts(const std::string& source);

/// Connection settings. The key is referenced by environment variable name
/// and read only when a request is sent.
struct BackendConfig {
  std::string endpoint;
  std::string model;
  std::string api_key_env = "SENTAUR_LLM_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 3;
  double base_delay_s = 1.0;

  static constexpr double kTemperature = 0.0;

  /// Endpoint from SENTAUR_LLM_URL, model from SENTAUR_LLM_MODEL.
  static BackendConfig from_env();
};

/// Never contains key material.
nlohmann::json config_to_json(const BackendConfig& cfg);

/// Backend failure. `retry_after_s` is set for RateLimited when the server
/// sent a Retry-After header.
class BackendError : public Error {
 public:
  BackendError(ErrorCode code, std::string message, std::optional<double> retry_after_s = {})
      : Error(code, std::move(message)), retry_after_s_(retry_after_s) {}
  std::optional<double> retry_after_s() const { return retry_after_s_; }

 private:
  std::optional<double> retry_after_s_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// One attempt. Throws BackendError.
  virtual std::string complete(const BackendConfig& cfg, const PromptBundle& bundle) = 0;
};

/// Chat-completion over HTTP(S): POST {model, messages, temperature} and read
/// choices[0].message.content.
class HttpBackend : public Backend {
 public:
  std::string complete(const BackendConfig& cfg, const PromptBundle& bundle) override;
};

/// Deterministic offline backend: canned completions keyed by purpose, with
/// an optional queue of failures to raise first.
class MockBackend : public Backend {
 public:
  MockBackend();
  std::string complete(const BackendConfig& cfg, const PromptBundle& bundle) override;

  std::map<Purpose, std::string> responses;
  std::deque<BackendError> failures;
  int calls = 0;
};

/// Canned completion for the sequence-detector generation request: prose
/// around a fenced block holding the detector module.
const std::string& canned_sequence_detector_completion();

using SleepFn = std::function<void(double seconds)>;

/// Calls the backend, retrying Transport and RateLimited failures up to
/// cfg.max_retries times with delays base, 2*base, 4*base, ... A Retry-After
/// longer than the computed delay is honored. Auth and MalformedResponse
/// are raised immediately.
std::string invoke(const BackendConfig& cfg, const PromptBundle& bundle, Backend& backend,
                   const SleepFn& sleep = {});

/// First fenced code block, else the region from the first line starting
/// with `module` through the last `endmodule`. Throws Error(NoCodeFound).
std::string extract_verilog(const std::string& completion);

struct LlmFinding {
  std::string category;
  std::vector<std::string> nets;
  int line_start = 0;
  int line_end = 0;
  std::string rationale;
};

struct LlmAssessment {
  std::vector<LlmFinding> findings;
  /// Categories whose answer stayed unparseable after one re-request.
  std::vector<std::string> failed;
};

/// Runs the four assessment prompts. A non-JSON answer is re-requested once.
LlmAssessment assess_with_llm(const BackendConfig& cfg, Backend& backend, const std::string& source,
                              const SleepFn& sleep = {});

struct ValidationResult {
  bool parsed = false;
  std::vector<rtl::LintFinding> lint_findings;
  std::optional<bool> trigger_verified;
  std::vector<int> satisfying_activations;
  std::vector<int> quiet_activations;
  bool accepted = false;
  std::string reason;  // "parse", "lint", "trigger", "persistence" or empty
  std::string detail;
};

/// Cycles after reset release during which the alert must stay low.
inline constexpr int kPersistenceWindow = 8;

/// Parse, lint and, when a trigger is expected, simulate a satisfying and a
/// non-satisfying stimulus. The alert must fire on the first, never on the
/// second, and never during reset or the persistence window after it.
ValidationResult validate_generated(const std::string& source,
                                    const std::optional<forge::TriggerSpec>& expected,
                                    const std::string& alert_net = "Tj_Trig");

nlohmann::json validation_to_json(const ValidationResult& v);

}  // namespace htkit::llm
