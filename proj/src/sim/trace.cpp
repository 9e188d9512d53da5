// SPDX-License-Identifier: Apache-2.0
#include "htkit/sim/trace.hpp"

#include "htkit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace htkit::sim {

int SimTrace::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

const BitVec& SimTrace::at(int cycle, const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw Error(ErrorCode::UnknownNet, "trace has no net '" + name + "'");
  return values.at(cycle)[i];
}

std::vector<int> activation_cycles(const SimTrace& trace, const std::string& net) {
  int i = trace.index_of(net);
  if (i < 0) throw Error(ErrorCode::UnknownNet, "trace has no net '" + net + "'");
  if (trace.widths[i] != 1) {
    throw Error(ErrorCode::WidthNotOne, "'" + net + "' is " + std::to_string(trace.widths[i]) +
                                            " bits wide");
  }
  std::vector<int> out;
  for (int c = 0; c < trace.cycles; ++c) {
    if (!trace.values[c][i].is_zero()) out.push_back(c);
  }
  return out;
}

DivergenceReport compare_traces(const SimTrace& golden, const SimTrace& suspect,
                                const std::vector<std::string>& outputs) {
  if (golden.cycles != suspect.cycles) {
    throw Error(ErrorCode::LengthMismatch, "traces have " + std::to_string(golden.cycles) +
                                               " and " + std::to_string(suspect.cycles) +
                                               " cycles");
  }
  std::vector<std::pair<int, int>> idx;
  for (const auto& o : outputs) {
    int a = golden.index_of(o);
    int b = suspect.index_of(o);
    if (a < 0 || b < 0) throw Error(ErrorCode::UnknownNet, "output '" + o + "' missing from a trace");
    idx.emplace_back(a, b);
  }
  DivergenceReport r;
  int matching = 0;
  for (const auto& o : outputs) r.per_output.push_back({o, {}});
  for (int c = 0; c < golden.cycles; ++c) {
    bool same = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const BitVec& g = golden.values[c][idx[k].first];
      const BitVec& s = suspect.values[c][idx[k].second];
      if (BitVec::compare(g, s) != 0) {
        r.per_output[k].cycles.push_back(c);
        same = false;
      }
    }
    if (same) {
      ++matching;
    } else if (!r.first_divergence_cycle) {
      r.first_divergence_cycle = c;
    }
  }
  r.match_fraction = golden.cycles ? static_cast<double>(matching) / golden.cycles : 1.0;
  return r;
}

std::string divergence_to_json(const DivergenceReport& r) {
  nlohmann::json j;
  j["first_divergence_cycle"] =
      r.first_divergence_cycle ? nlohmann::json(*r.first_divergence_cycle) : nlohmann::json();
  j["match_fraction"] = r.match_fraction;
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : r.per_output) {
    j["outputs"].push_back({{"output", o.output}, {"cycles", o.cycles}});
  }
  return j.dump(2);
}

std::string trace_to_json(const SimTrace& t) {
  nlohmann::json j;
  j["cycles"] = t.cycles;
  j["nets"] = nlohmann::json::array();
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    nlohmann::json vals = nlohmann::json::array();
    for (int c = 0; c < t.cycles; ++c) vals.push_back(t.values[c][i].to_json_string());
    j["nets"].push_back({{"name", t.names[i]}, {"width", t.widths[i]}, {"values", vals}});
  }
  return j.dump();
}

}  // namespace htkit::sim
