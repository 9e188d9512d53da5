// SPDX-License-Identifier: Apache-2.0
#include "htkit/sim/vcd.hpp"

#include "htkit/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace htkit::sim {

namespace {

// Identifier codes are base-94 numbers over the printable range '!'..'~'.
std::string id_code(std::size_t n) {
  std::string s;
  do {
    s.push_back(static_cast<char>('!' + n % 94));
    n /= 94;
  } while (n > 0);
  return s;
}

std::vector<std::string> split(const std::string& name) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : name) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string value_text(const BitVec& v, int width, const std::string& code) {
  if (width == 1) return std::string(v.bit(0) ? "1" : "0") + code;
  std::string bits = v.to_bin();
  return "b" + bits + " " + code;
}

}  // namespace

std::string emit_vcd(const SimTrace& trace, const std::string& scope) {
  std::ostringstream out;
  out << "$version htkit $end\n$timescale 1ns $end\n";
  out << "$scope module " << scope << " $end\n";

  // Nets sharing a dotted prefix are grouped in first-appearance order.
  std::vector<std::string> open;
  std::vector<std::string> codes(trace.names.size());
  std::vector<std::size_t> order(trace.names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto pa = split(trace.names[a]);
    auto pb = split(trace.names[b]);
    pa.pop_back();
    pb.pop_back();
    return pa < pb;
  });
  for (std::size_t i : order) {
    auto parts = split(trace.names[i]);
    std::string leaf = parts.back();
    parts.pop_back();
    std::size_t common = 0;
    while (common < open.size() && common < parts.size() && open[common] == parts[common]) ++common;
    while (open.size() > common) {
      out << "$upscope $end\n";
      open.pop_back();
    }
    for (std::size_t k = common; k < parts.size(); ++k) {
      out << "$scope module " << parts[k] << " $end\n";
      open.push_back(parts[k]);
    }
    codes[i] = id_code(i);
    out << "$var wire " << trace.widths[i] << " " << codes[i] << " " << leaf;
    if (trace.widths[i] > 1) out << " [" << trace.widths[i] - 1 << ":0]";
    out << " $end\n";
  }
  while (!open.empty()) {
    out << "$upscope $end\n";
    open.pop_back();
  }
  out << "$upscope $end\n$enddefinitions $end\n";

  for (int c = 0; c < trace.cycles; ++c) {
    std::ostringstream changes;
    for (std::size_t i = 0; i < trace.names.size(); ++i) {
      const BitVec& v = trace.values[c][i];
      if (c > 0 && trace.values[c - 1][i] == v) continue;
      changes << value_text(v, trace.widths[i], codes[i]) << "\n";
    }
    if (c == 0) {
      out << "#0\n$dumpvars\n" << changes.str() << "$end\n";
    } else if (!changes.str().empty()) {
      out << "#" << c << "\n" << changes.str();
    }
  }
  out << "#" << trace.cycles << "\n";
  return out.str();
}

SimTrace read_vcd(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);

  SimTrace t;
  std::map<std::string, int> by_code;
  std::vector<std::string> scopes;
  std::size_t i = 0;
  auto fail = [](const std::string& what) -> void {
    throw Error(ErrorCode::BadStimulus, "vcd: " + what);
  };
  auto skip_to_end = [&]() {
    while (i < tokens.size() && tokens[i] != "$end") ++i;
    ++i;
  };
  while (i < tokens.size() && tokens[i] != "$enddefinitions") {
    if (tokens[i] == "$scope") {
      if (i + 2 >= tokens.size()) fail("truncated $scope");
      scopes.push_back(tokens[i + 2]);
      skip_to_end();
    } else if (tokens[i] == "$upscope") {
      if (scopes.empty()) fail("unbalanced $upscope");
      scopes.pop_back();
      skip_to_end();
    } else if (tokens[i] == "$var") {
      if (i + 4 >= tokens.size()) fail("truncated $var");
      int width = std::stoi(tokens[i + 2]);
      std::string code = tokens[i + 3];
      std::string name;
      for (std::size_t k = 1; k < scopes.size(); ++k) name += scopes[k] + ".";
      name += tokens[i + 4];
      by_code[code] = static_cast<int>(t.names.size());
      t.names.push_back(name);
      t.widths.push_back(width);
      skip_to_end();
    } else {
      skip_to_end();
    }
  }
  skip_to_end();

  std::vector<BitVec> current;
  for (int w : t.widths) current.emplace_back(w);
  long time = -1;
  auto set = [&](const std::string& code, const std::string& bits) {
    auto it = by_code.find(code);
    if (it == by_code.end()) fail("unknown identifier code '" + code + "'");
    int w = t.widths[it->second];
    BitVec v(w);
    int n = static_cast<int>(bits.size());
    for (int k = 0; k < n && k < w; ++k) v.set_bit(k, bits[n - 1 - k] == '1');
    current[it->second] = v;
  };
  auto flush_until = [&](long next) {
    // Cycle `time` ends where the next timestamp begins.
    for (long c = std::max<long>(time, 0); c < next; ++c) {
      if (time < 0) break;
      t.values.push_back(current);
    }
  };
  for (; i < tokens.size(); ++i) {
    const std::string& s = tokens[i];
    if (s[0] == '#') {
      long next = std::stol(s.substr(1));
      flush_until(next);
      time = next;
    } else if (s == "$dumpvars" || s == "$end") {
      continue;
    } else if (s[0] == 'b' || s[0] == 'B') {
      if (i + 1 >= tokens.size()) fail("truncated vector change");
      set(tokens[i + 1], s.substr(1));
      ++i;
    } else if (s[0] == '0' || s[0] == '1') {
      set(s.substr(1), s.substr(0, 1));
    } else {
      fail("unsupported value change '" + s + "'");
    }
  }
  t.cycles = static_cast<int>(t.values.size());
  return t;
}

}  // namespace htkit::sim
