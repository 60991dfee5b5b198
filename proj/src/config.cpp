#include "writor/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/scripted.hpp"

namespace writor {

using nlohmann::json;

ProviderMode parse_provider_mode(std::string_view s) {
  if (s == "live") return ProviderMode::live;
  if (s == "replay") return ProviderMode::replay;
  if (s == "record") return ProviderMode::record;
  if (s == "mock") return ProviderMode::mock;
  throw PreconditionError("unknown provider mode '" + std::string(s) + "' (expected live, replay, record or mock)");
}

AppConfig AppConfig::from_json(const json& j) {
  AppConfig c;
  try {
    c.store_path = j.value("store_path", c.store_path);
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.cors_origin = j.value("cors_origin", c.cors_origin);
    c.auth_token_env = j.value("auth_token_env", c.auth_token_env);
    c.max_concurrent_provider_calls = j.value("max_concurrent_provider_calls", c.max_concurrent_provider_calls);
    c.guardrails_path = j.value("guardrails_path", c.guardrails_path);
    c.prompts_dir = j.value("prompts_dir", c.prompts_dir);
    if (auto it = j.find("provider"); it != j.end()) {
      const json& p = *it;
      ProviderSettings& s = c.provider;
      s.mode = parse_provider_mode(p.value("mode", std::string("live")));
      s.http.base_url = p.value("base_url", s.http.base_url);
      s.http.api_key_env = p.value("api_key_env", s.http.api_key_env);
      s.http.timeout_seconds = p.value("timeout_seconds", s.http.timeout_seconds);
      s.params.model = p.value("model", s.params.model);
      s.params.temperature = p.value("temperature", s.params.temperature);
      s.params.max_output_tokens = p.value("max_output_tokens", s.params.max_output_tokens);
      s.transcript = p.value("transcript", s.transcript);
      s.repair_attempts = p.value("repair_attempts", s.repair_attempts);
      if (auto m = p.find("stage_max_tokens"); m != p.end()) {
        for (const auto& [stage, tokens] : m->items()) s.stage_max_tokens[parse_stage(stage)] = tokens.get<int>();
      }
    }
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("invalid config: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) throw PreconditionError("port out of range");
  if (c.max_concurrent_provider_calls < 1) throw PreconditionError("max_concurrent_provider_calls must be >= 1");
  if (c.provider.repair_attempts < 1) throw PreconditionError("repair_attempts must be >= 1");
  return c;
}

AppConfig AppConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("config " + path + " is not valid JSON: " + e.what());
  }
  AppConfig c = from_json(j);
  c.apply_env_overrides();
  return c;
}

void AppConfig::apply_env_overrides() {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("WRITOR_STORE_PATH")) store_path = *v;
  if (auto v = env("WRITOR_HOST")) host = *v;
  if (auto v = env("WRITOR_PORT")) {
    int parsed = 0;
    auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (ec != std::errc() || end != v->data() + v->size() || parsed < 0 || parsed > 65535) {
      throw PreconditionError("WRITOR_PORT must be a port number, got '" + *v + "'");
    }
    port = parsed;
  }
  if (auto v = env("WRITOR_PROVIDER_MODE")) provider.mode = parse_provider_mode(*v);
  if (auto v = env("WRITOR_TRANSCRIPT")) provider.transcript = *v;
  if (auto v = env("WRITOR_BASE_URL")) provider.http.base_url = *v;
  if (auto v = env("WRITOR_MODEL")) provider.params.model = *v;
}

GuardrailConfig AppConfig::guardrails() const {
  return guardrails_path.empty() ? GuardrailConfig::defaults() : GuardrailConfig::load(guardrails_path);
}

PromptLibrary AppConfig::prompts() const {
  return prompts_dir.empty() ? PromptLibrary::defaults() : PromptLibrary::with_overrides(prompts_dir);
}

PipelineOptions AppConfig::pipeline_options() const {
  PipelineOptions o;
  o.params = provider.params;
  o.stage_max_tokens = provider.stage_max_tokens;
  o.repair_attempts = provider.repair_attempts;
  return o;
}

ProviderStack::ProviderStack(const ProviderSettings& settings) : settings_(settings) {
  switch (settings_.mode) {
    case ProviderMode::live:
      base_ = std::make_unique<HttpProvider>(settings_.http);
      break;
    case ProviderMode::record:
      if (settings_.transcript.empty()) throw PreconditionError("record mode needs a transcript path");
      base_ = std::make_unique<HttpProvider>(settings_.http);
      recorder_ = std::make_unique<RecordingProvider>(*base_);
      break;
    case ProviderMode::replay:
      if (settings_.transcript.empty()) throw PreconditionError("replay mode needs a transcript path");
      base_ = std::make_unique<ReplayProvider>(Transcript::load(settings_.transcript));
      break;
    case ProviderMode::mock:
      base_ = std::make_unique<ScriptedResponder>();
      break;
  }
}

Provider& ProviderStack::provider() {
  if (recorder_) return *recorder_;
  return *base_;
}

void ProviderStack::flush() const {
  if (recorder_) recorder_->transcript().save(settings_.transcript);
}

}  // namespace writor
