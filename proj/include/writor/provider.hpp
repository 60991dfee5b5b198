#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace writor {

enum class Stage {
  goals,
  topics,
  sentences,
  feedback_type,
  final_feedback,
  praise,
  chat,
  find_example,
  targeted,
  baseline,
};

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

struct ModelParams {
  std::string model = "gpt-4.1-mini";
  double temperature = 0.2;
  int max_output_tokens = 1200;

  bool operator==(const ModelParams&) const = default;
};

struct PromptRequest {
  Stage stage = Stage::chat;
  std::string rendered_prompt;
  ModelParams params;

  std::string fingerprint() const;  // sha256 of rendered_prompt
};

class Provider {
 public:
  virtual ~Provider() = default;
  // Safe for concurrent calls.
  virtual std::string complete(const PromptRequest& request) = 0;
};

struct TranscriptEntry {
  PromptRequest request;
  std::string fingerprint;
  std::string response;
};

// Ordered prompt/response record. Stored as JSON Lines with a header line:
//   {"format":"writor-transcript","version":1}
//   {"stage":"topics","fingerprint":"…","params":{…},"prompt":"…","response":"…"}
class Transcript {
 public:
  static inline constexpr int kVersion = 1;

  void append(TranscriptEntry entry);
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::string to_jsonl() const;
  static Transcript from_jsonl(std::string_view text);
  static Transcript load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<TranscriptEntry> entries_;
};

// Returns scripted responses in order; the last one repeats once the script
// is exhausted. Keeps every request it saw.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::vector<std::string> script);
  std::string complete(const PromptRequest& request) override;

  std::size_t calls() const;
  std::vector<PromptRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> script_;
  std::vector<PromptRequest> requests_;
};

// Serves a loaded transcript. Requests match on stage + fingerprint; the n-th
// identical request gets the n-th recorded response, and the last recorded
// response repeats after that. Anything unrecorded is a ReplayMissError.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(Transcript transcript);
  std::string complete(const PromptRequest& request) override;

  std::size_t calls() const;

 private:
  using Key = std::pair<Stage, std::string>;
  mutable std::mutex mu_;
  std::map<Key, std::vector<std::string>> responses_;
  std::map<Key, std::size_t> cursor_;
  std::size_t calls_ = 0;
};

// Forwards to another provider and appends each exchange to a transcript.
class RecordingProvider : public Provider {
 public:
  explicit RecordingProvider(Provider& inner);
  std::string complete(const PromptRequest& request) override;

  Transcript transcript() const;
  void clear();

 private:
  Provider& inner_;
  mutable std::mutex mu_;
  Transcript transcript_;
};

// Caps the number of requests in flight against an underlying provider.
class ConcurrencyLimitedProvider : public Provider {
 public:
  ConcurrencyLimitedProvider(Provider& inner, std::ptrdiff_t max_in_flight);
  std::string complete(const PromptRequest& request) override;

 private:
  Provider& inner_;
  std::counting_semaphore<1024> slots_;
};

struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
};

// OpenAI-compatible chat-completions client. When the process environment
// has WRITOR_OFFLINE set to a non-empty value other than "0", every call
// fails with TransportError before touching the network.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  std::string complete(const PromptRequest& request) override;

  // Request body sent for a prompt; exposed for tests.
  static nlohmann::json request_body(const PromptRequest& request);
  // Extracts choices[0].message.content; throws TransportError.
  static std::string parse_response(std::string_view body);

 private:
  HttpProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// Process-wide count of HTTP requests attempted by HttpProvider instances.
std::uint64_t network_request_count();
bool network_disabled_by_env();

// --- structured output -------------------------------------------------

// Finds the first balanced JSON object in raw text (code fences and prose
// around it are ignored) and validates it against the stage schema.
// Throws MalformedOutputError or SchemaError.
nlohmann::json extract_structured(std::string_view raw, Stage stage);

// Returns the first parseable object without schema validation.
std::optional<nlohmann::json> find_first_json_object(std::string_view raw);

// Schema violations as JSON-pointer-like paths; empty when valid.
std::vector<std::string> schema_violations(const nlohmann::json& doc, Stage stage);

// Extra stage-specific check run after schema validation; returns a problem
// description, or nullopt if the document is acceptable.
using DocumentCheck = std::function<std::optional<std::string>(const nlohmann::json&)>;

inline constexpr std::string_view kRepairInstruction =
    "\n\nYour previous reply could not be used. Return only the JSON object "
    "in the requested structure, with no other text.";

struct RepairResult {
  nlohmann::json document;
  std::size_t calls = 0;
  std::vector<std::string> raw_responses;
};

// Calls the provider and extracts the stage document. On extraction or check
// failure the request is reissued with kRepairInstruction appended. After
// max_attempts failures throws StageError carrying every raw response.
// Transport errors propagate unchanged.
RepairResult complete_with_repair(Provider& provider, const PromptRequest& request,
                                  int max_attempts, const DocumentCheck& check = {});

}  // namespace writor
