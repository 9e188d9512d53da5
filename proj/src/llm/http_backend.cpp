// SPDX-License-Identifier: Apache-2.0
#include "htkit/llm/bridge.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <regex>

namespace htkit::llm {

std::string HttpBackend::complete(const BackendConfig& cfg, const PromptBundle& bundle) {
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (!key || !*key) {
    throw BackendError(ErrorCode::Auth, "environment variable " + cfg.api_key_env + " is not set");
  }
  static const std::regex url_re(R"(^(https?)://([^/:]+)(:[0-9]+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg.endpoint, m, url_re)) {
    throw BackendError(ErrorCode::Transport, "endpoint '" + cfg.endpoint + "' is not an http(s) URL");
  }
  std::string path = m[4].matched ? m[4].str() : "/v1/chat/completions";

  httplib::Client cli(m[1].str() + "://" + m[2].str() + m[3].str());
  auto secs = static_cast<time_t>(cfg.timeout_s);
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);

  nlohmann::json body = {
      {"model", cfg.model},
      {"messages",
       {{{"role", "system"}, {"content", bundle.system_text}},
        {{"role", "user"}, {"content", bundle.user_text}}}},
      {"temperature", BackendConfig::kTemperature}};
  httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res) throw BackendError(ErrorCode::Transport, "request failed: " + httplib::to_string(res.error()));

  const int status = res->status;
  if (status == 401 || status == 403) {
    throw BackendError(ErrorCode::Auth, "endpoint rejected the credentials (HTTP " + std::to_string(status) + ")");
  }
  if (status == 429) {
    std::optional<double> after;
    if (res->has_header("Retry-After")) {
      char* end = nullptr;
      std::string v = res->get_header_value("Retry-After");
      double d = std::strtod(v.c_str(), &end);
      if (end != v.c_str()) after = d;
    }
    throw BackendError(ErrorCode::RateLimited, "rate limited (HTTP 429)", after);
  }
  if (status >= 500) throw BackendError(ErrorCode::Transport, "server error (HTTP " + std::to_string(status) + ")");
  if (status != 200) {
    throw BackendError(ErrorCode::MalformedResponse, "unexpected HTTP status " + std::to_string(status));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  try {
    if (!j.is_discarded()) {
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (content.is_string()) return content.get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  throw BackendError(ErrorCode::MalformedResponse, "response has no choices[0].message.content");
}

}  // namespace htkit::llm
