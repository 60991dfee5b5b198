#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "writor/guardrails.hpp"
#include "writor/pipeline.hpp"
#include "writor/prompts.hpp"
#include "writor/provider.hpp"

namespace writor {

enum class ProviderMode { live, replay, record, mock };
ProviderMode parse_provider_mode(std::string_view s);

struct ProviderSettings {
  ProviderMode mode = ProviderMode::live;
  HttpProviderConfig http;
  ModelParams params;
  std::map<Stage, int> stage_max_tokens;
  std::string transcript;  // replay source / record destination
  int repair_attempts = 2;
};

struct AppConfig {
  std::string store_path = "./sessions";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;
  std::string auth_token_env;
  int max_concurrent_provider_calls = 4;
  std::string guardrails_path;
  std::string prompts_dir;
  ProviderSettings provider;

  static AppConfig from_json(const nlohmann::json& j);
  // Reads the file, then applies WRITOR_* environment overrides.
  static AppConfig load(const std::string& path);
  void apply_env_overrides();

  GuardrailConfig guardrails() const;
  PromptLibrary prompts() const;
  PipelineOptions pipeline_options() const;
};

// Owns whatever provider stack a mode needs (live client, replay, recorder).
class ProviderStack {
 public:
  explicit ProviderStack(const ProviderSettings& settings);

  Provider& provider();
  // Saves the recorded transcript when in record mode; no-op otherwise.
  void flush() const;

 private:
  ProviderSettings settings_;
  std::unique_ptr<Provider> base_;
  std::unique_ptr<RecordingProvider> recorder_;
};

}  // namespace writor
