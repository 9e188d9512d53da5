// SPDX-License-Identifier: Apache-2.0
#include "htkit/errors.hpp"

namespace htkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::MultiDriver: return "MultiDriver";
    case ErrorCode::UnknownTop: return "UnknownTop";
    case ErrorCode::RecursiveInstantiation: return "RecursiveInstantiation";
    case ErrorCode::UnresolvedInstance: return "UnresolvedInstance";
    case ErrorCode::CombinationalCycle: return "CombinationalCycle";
    case ErrorCode::UnknownInput: return "UnknownInput";
    case ErrorCode::UnknownNet: return "UnknownNet";
    case ErrorCode::WidthNotOne: return "WidthNotOne";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadStimulus: return "BadStimulus";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TargetNotOutput: return "TargetNotOutput";
    case ErrorCode::LeakPortNameCollision: return "LeakPortNameCollision";
    case ErrorCode::HostUnsupported: return "HostUnsupported";
    case ErrorCode::CannotInferHoldValue: return "CannotInferHoldValue";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::Auth: return "Auth";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::NoCodeFound: return "NoCodeFound";
  }
  return "Error";
}

SyntaxError::SyntaxError(int line, int col, std::string expected)
    : Error(ErrorCode::Syntax,
            std::to_string(line) + ":" + std::to_string(col) + ": syntax error, expected " + expected),
      line_(line),
      col_(col),
      expected_(std::move(expected)) {}

UnsupportedConstruct::UnsupportedConstruct(std::string name, SourceSpan span)
    : Error(ErrorCode::UnsupportedConstruct,
            std::to_string(span.line) + ":" + std::to_string(span.col) + ": unsupported construct '" +
                name + "'"),
      name_(std::move(name)),
      span_(span) {}

MultiDriverError::MultiDriverError(std::string net, std::vector<SourceSpan> spans)
    : Error(ErrorCode::MultiDriver, "net '" + net + "' has multiple drivers"),
      net_(std::move(net)),
      spans_(std::move(spans)) {}

}  // namespace htkit
