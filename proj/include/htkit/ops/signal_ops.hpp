// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htkit/rtl/ast.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace htkit::ops {

enum class EditKind { AddPort, AddNet, Join, Route, RenameModule, RenameSignal };

const char* to_string(EditKind k);

/// One signal-surgery step. Field use per kind:
///   add_port       module, name, direction, width
///   add_net        module, name, kind, width
///   join           module, originals, name (the joint net)
///   route          module (source), name (source net), dest_module
///   rename_module  name (old), new_name
///   rename_signal  module, name (old), new_name
struct SignalEdit {
  EditKind kind = EditKind::AddPort;
  std::string module;
  std::string name;
  std::string new_name;
  std::string dest_module;
  std::vector<std::string> originals;
  rtl::Direction direction = rtl::Direction::Input;
  rtl::NetKind net_kind = rtl::NetKind::Wire;
  int width = 1;
  /// Informational: names chosen by route after collision suffixing. Replay
  /// recomputes them deterministically.
  std::vector<std::string> resolved;
};

/// Adds a port to `module`. Existing instantiations gain `.name(W'd0)` for an
/// input and an open `.name()` for an output. Throws NameCollision.
rtl::RtlDesign add_port(const rtl::RtlDesign& d, const std::string& module,
                        const std::string& name, rtl::Direction dir, int width);

rtl::RtlDesign add_net(const rtl::RtlDesign& d, const std::string& module,
                       const std::string& name, rtl::NetKind kind, int width);

/// Declares `joint`, drives it from the originals and points every read of an
/// original at it, except reads in the combinational fan-in of an original,
/// which would close a loop. 1-bit originals are ORed; wider ones use the
/// first nonzero original in list order. Throws WidthMismatch, NameCollision, UnknownNet.
rtl::RtlDesign join_signals(const rtl::RtlDesign& d, const std::string& module,
                            const std::vector<std::string>& originals, const std::string& joint);

struct RouteResult {
  rtl::RtlDesign design;
  /// Net carrying the routed value in each module along the path, source first.
  std::vector<std::string> carriers;
};

/// Carries `net` from `src_module` to `dest_module` along the shortest
/// instance path, adding an output port per upward hop and an input port per
/// downward hop. Colliding names get `_r1`, `_r2`, ... suffixes. Throws NoPath.
RouteResult route_signal(const rtl::RtlDesign& d, const std::string& src_module,
                         const std::string& net, const std::string& dest_module);

/// Throws UnknownModule or NameCollision.
rtl::RtlDesign rename_module(const rtl::RtlDesign& d, const std::string& old_name,
                             const std::string& new_name);

/// Renames a port, net or localparam of `module`, including port references
/// in instantiations of it. Throws UnknownNet or NameCollision.
rtl::RtlDesign rename_signal(const rtl::RtlDesign& d, const std::string& module,
                             const std::string& old_name, const std::string& new_name);

/// Applies one edit; route edits get `resolved` filled in.
rtl::RtlDesign apply_edit(const rtl::RtlDesign& d, SignalEdit& edit);

struct EditRun {
  rtl::RtlDesign design;
  std::vector<SignalEdit> log;
};

EditRun apply_edits(const rtl::RtlDesign& d, std::vector<SignalEdit> edits);

nlohmann::json edits_to_json(const std::vector<SignalEdit>& edits);
/// Accepts {"edits":[...]} or a bare array. Throws Error(InvalidSpec).
std::vector<SignalEdit> edits_from_json(const nlohmann::json& j);

}  // namespace htkit::ops
