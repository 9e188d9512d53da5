// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/forge/spec.hpp"
#include "htkit/rtl/ast.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace htkit::forge {

/// Names used for inserted logic. Empty trigger/enable names default to
/// prefix + "Trig" and prefix + "En".
struct InsertOptions {
  std::string prefix = "Tj_";
  std::string trigger_name;
  std::string enable_name;
  std::string clock = "clk";
  std::string reset = "rst";

  std::string name(const std::string& stem) const { return prefix + stem; }
  std::string trigger() const { return trigger_name.empty() ? name("Trig") : trigger_name; }
  std::string enable() const { return enable_name.empty() ? name("En") : enable_name; }
};

/// Declarations and logic to append to a host module.
struct Fragment {
  std::vector<rtl::PortDecl> ports;
  std::vector<rtl::NetDecl> nets;
  std::vector<rtl::LocalParamGroup> params;
  std::vector<rtl::ContinuousAssign> assigns;
  std::vector<rtl::AlwaysBlock> processes;

  void append(const Fragment& other);
};

struct TriggerFragment {
  Fragment fragment;
  std::string trigger_net;
};

/// Payload logic plus the rerouting of the target output's original driver
/// to `original_net`.
struct PayloadFragment {
  Fragment fragment;
  std::string target_output;
  std::string original_net;
};

/// Trigger circuit for `spec` in `host`. Throws UnknownNet, WidthMismatch,
/// InvalidSpec, HostUnsupported (missing clock or reset) or NameCollision.
TriggerFragment make_trigger(const TriggerSpec& spec, const rtl::RtlModule& host,
                             const InsertOptions& options = {});

/// Logic realizing `spec` under the 1-bit enable `enable_net`. When the
/// enable is a same-cycle function of the inputs, the deadband phase counter
/// is aligned one edge later than for a registered enable.
PayloadFragment make_payload(const PayloadSpec& spec, const std::string& enable_net,
                             bool enable_from_inputs, const rtl::RtlModule& host,
                             const InsertOptions& options = {});

struct SpanRecord {
  std::string construct;  // "assign" or "always"
  std::string target;     // first net written
  int line_start = 0;
  int line_end = 0;
};

struct Modification {
  std::string construct;  // "port", "driver", "instance", "assign", "always"
  std::string name;
  std::string detail;
};

/// Exact record of what an insertion changed.
struct TrojanManifest {
  std::string host_module;
  TriggerSpec trigger;
  PayloadSpec payload;
  std::string trigger_net;
  std::string enable_net;
  std::string enable_semantics;  // "level" or "sticky"
  std::vector<rtl::PortDecl> added_ports;
  std::vector<rtl::NetDecl> added_nets;
  std::vector<std::string> added_params;
  std::vector<SpanRecord> added_assigns;
  std::vector<SpanRecord> added_processes;
  std::vector<Modification> modified;

  /// Every identifier the insertion added: ports, nets and localparams.
  std::vector<std::string> touched_names() const;
};

struct Insertion {
  rtl::RtlDesign design;
  TrojanManifest manifest;
};

/// Weaves trigger, enable and payload into `module_name`. The returned design
/// is reparsed from its emitted text, so every span refers to that text.
/// Throws HostUnsupported when the module is missing or lacks clock/reset.
Insertion insert_trojan(const rtl::RtlDesign& design, const std::string& module_name,
                        const TriggerSpec& trigger, const PayloadSpec& payload,
                        const InsertOptions& options = {});

nlohmann::json manifest_to_json(const TrojanManifest& m);
TrojanManifest manifest_from_json(const nlohmann::json& j);

}  // namespace htkit::forge
