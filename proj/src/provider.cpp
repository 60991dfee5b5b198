#include "writor/provider.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/hash.hpp"

namespace writor {

using nlohmann::json;

namespace {

constexpr std::array kStages = {Stage::goals,          Stage::topics,  Stage::sentences,
                                Stage::feedback_type,  Stage::final_feedback,
                                Stage::praise,         Stage::chat,    Stage::find_example,
                                Stage::targeted,       Stage::baseline};

std::atomic<std::uint64_t> g_network_requests{0};

json params_to_json(const ModelParams& p) {
  return json{{"model", p.model}, {"temperature", p.temperature}, {"max_output_tokens", p.max_output_tokens}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.model = j.value("model", p.model);
  p.temperature = j.value("temperature", p.temperature);
  p.max_output_tokens = j.value("max_output_tokens", p.max_output_tokens);
  return p;
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::goals: return "goals";
    case Stage::topics: return "topics";
    case Stage::sentences: return "sentences";
    case Stage::feedback_type: return "feedback_type";
    case Stage::final_feedback: return "final_feedback";
    case Stage::praise: return "praise";
    case Stage::chat: return "chat";
    case Stage::find_example: return "find_example";
    case Stage::targeted: return "targeted";
    case Stage::baseline: return "baseline";
  }
  return "chat";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : kStages) {
    if (to_string(st) == s) return st;
  }
  throw PreconditionError("unknown stage '" + std::string(s) + "'");
}

std::string PromptRequest::fingerprint() const { return sha256_hex(rendered_prompt); }

// --- Transcript -----------------------------------------------------------

void Transcript::append(TranscriptEntry entry) {
  if (entry.fingerprint.empty()) entry.fingerprint = entry.request.fingerprint();
  entries_.push_back(std::move(entry));
}

std::string Transcript::to_jsonl() const {
  std::string out = json{{"format", "writor-transcript"}, {"version", kVersion}}.dump() + "\n";
  for (const auto& e : entries_) {
    json line{{"stage", std::string(to_string(e.request.stage))},
              {"fingerprint", e.fingerprint},
              {"params", params_to_json(e.request.params)},
              {"prompt", e.request.rendered_prompt},
              {"response", e.response}};
    out += line.dump() + "\n";
  }
  return out;
}

Transcript Transcript::from_jsonl(std::string_view text) {
  Transcript t;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw PreconditionError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!saw_header) {
      if (j.value("format", "") != "writor-transcript" || j.value("version", 0) != kVersion) {
        throw PreconditionError("transcript header missing or unsupported version");
      }
      saw_header = true;
      continue;
    }
    try {
      TranscriptEntry e;
      e.request.stage = parse_stage(j.at("stage").get<std::string>());
      e.request.rendered_prompt = j.at("prompt").get<std::string>();
      e.request.params = params_from_json(j.value("params", json::object()));
      e.response = j.at("response").get<std::string>();
      e.fingerprint = j.value("fingerprint", std::string());
      std::string computed = e.request.fingerprint();
      if (!e.fingerprint.empty() && e.fingerprint != computed) {
        throw PreconditionError("transcript line " + std::to_string(line_no) +
                                ": fingerprint does not match prompt");
      }
      e.fingerprint = computed;
      t.entries_.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw PreconditionError("transcript line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  if (!saw_header) throw PreconditionError("transcript is empty");
  return t;
}

Transcript Transcript::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open transcript " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

void Transcript::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write transcript " + path);
  out << to_jsonl();
  if (!out) throw Error("failed writing transcript " + path);
}

// --- Mock / replay / record ---------------------------------------------

MockProvider::MockProvider(std::vector<std::string> script) : script_(std::move(script)) {
  if (script_.empty()) throw PreconditionError("mock provider needs at least one scripted response");
}

std::string MockProvider::complete(const PromptRequest& request) {
  std::lock_guard lock(mu_);
  std::size_t i = std::min(requests_.size(), script_.size() - 1);
  requests_.push_back(request);
  return script_[i];
}

std::size_t MockProvider::calls() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::vector<PromptRequest> MockProvider::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

ReplayProvider::ReplayProvider(Transcript transcript) {
  for (const auto& e : transcript.entries()) {
    responses_[{e.request.stage, e.fingerprint}].push_back(e.response);
  }
}

std::string ReplayProvider::complete(const PromptRequest& request) {
  Key key{request.stage, request.fingerprint()};
  std::lock_guard lock(mu_);
  ++calls_;
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    throw ReplayMissError(std::string(to_string(request.stage)), key.second);
  }
  std::size_t& cursor = cursor_[key];
  const std::string& out = it->second[std::min(cursor, it->second.size() - 1)];
  ++cursor;
  return out;
}

std::size_t ReplayProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

RecordingProvider::RecordingProvider(Provider& inner) : inner_(inner) {}

std::string RecordingProvider::complete(const PromptRequest& request) {
  std::string response = inner_.complete(request);
  std::lock_guard lock(mu_);
  transcript_.append(TranscriptEntry{request, request.fingerprint(), response});
  return response;
}

Transcript RecordingProvider::transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

void RecordingProvider::clear() {
  std::lock_guard lock(mu_);
  transcript_ = Transcript{};
}

ConcurrencyLimitedProvider::ConcurrencyLimitedProvider(Provider& inner, std::ptrdiff_t max_in_flight)
    : inner_(inner), slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {}

std::string ConcurrencyLimitedProvider::complete(const PromptRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return inner_.complete(request);
}

// --- HTTP -----------------------------------------------------------------

std::uint64_t network_request_count() { return g_network_requests.load(); }

bool network_disabled_by_env() {
  const char* v = std::getenv("WRITOR_OFFLINE");
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  std::string url = config_.base_url;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw PreconditionError("provider base_url must include a scheme: " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
    path_prefix_.clear();
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
  }
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json HttpProvider::request_body(const PromptRequest& request) {
  return json{{"model", request.params.model},
              {"temperature", request.params.temperature},
              {"max_tokens", request.params.max_output_tokens},
              {"messages", json::array({json{{"role", "user"}, {"content", request.rendered_prompt}}})}};
}

std::string HttpProvider::parse_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    throw TransportError("provider returned a non-JSON body");
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("provider message content is not a string");
    return content.get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("provider response has no choices[0].message.content");
  }
}

std::string HttpProvider::complete(const PromptRequest& request) {
  if (network_disabled_by_env()) {
    throw TransportError("network access disabled (WRITOR_OFFLINE is set)");
  }
  g_network_requests.fetch_add(1);
  std::string key;
  if (!config_.api_key_env.empty()) {
    if (const char* v = std::getenv(config_.api_key_env.c_str())) key = v;
  }
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body(request).dump(),
                         "application/json");
  if (!res) {
    throw TransportError("provider request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw TransportError("provider rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status));
  }
  return parse_response(res->body);
}

}  // namespace writor
