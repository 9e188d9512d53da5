// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace htkit {

struct SourceSpan {
  int line = 0;
  int col = 0;
  int end_line = 0;

  bool valid() const { return line > 0; }
};

enum class ErrorCode {
  // rtl-core
  Syntax,
  UnsupportedConstruct,
  MultiDriver,
  UnknownTop,
  RecursiveInstantiation,
  UnresolvedInstance,
  CombinationalCycle,
  // rtl-sim
  UnknownInput,
  UnknownNet,
  WidthNotOne,
  LengthMismatch,
  BadStimulus,
  // trojan-forge
  WidthMismatch,
  InvalidSpec,
  TargetNotOutput,
  LeakPortNameCollision,
  HostUnsupported,
  CannotInferHoldValue,
  // signal-ops
  NameCollision,
  NoPath,
  UnknownModule,
  // llm-bridge
  Transport,
  Auth,
  RateLimited,
  MalformedResponse,
  NoCodeFound,
};

const char* error_code_name(ErrorCode code);

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, std::string expected);

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

class UnsupportedConstruct : public Error {
 public:
  UnsupportedConstruct(std::string name, SourceSpan span);

  const std::string& name() const { return name_; }
  const SourceSpan& span() const { return span_; }

 private:
  std::string name_;
  SourceSpan span_;
};

class MultiDriverError : public Error {
 public:
  MultiDriverError(std::string net, std::vector<SourceSpan> spans);

  const std::string& net() const { return net_; }
  const std::vector<SourceSpan>& spans() const { return spans_; }

 private:
  std::string net_;
  std::vector<SourceSpan> spans_;
};

}  // namespace htkit
