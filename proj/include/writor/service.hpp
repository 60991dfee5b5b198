#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "writor/pipeline.hpp"
#include "writor/progress.hpp"
#include "writor/store.hpp"

namespace writor {

enum class ApiErrorCode { bad_request, not_found, conflict, provider_unavailable, internal };

std::string_view to_string(ApiErrorCode c);
int http_status(ApiErrorCode c);

struct ApiError {
  ApiErrorCode code = ApiErrorCode::internal;
  std::string message;
  nlohmann::json detail;  // null when absent

  nlohmann::json to_json() const;
};

// Converts an in-flight exception into the error body the API returns.
ApiError api_error_from(const std::exception& e);

// Telemetry events the client may post directly.
bool is_client_event(std::string_view name);

// Transport-independent session workflow. Handlers load, mutate and
// compare-and-swap a session. Writes to one session are serialized within the
// process; a compare-and-swap lost to another process is retried for plain
// writes and surfaces as ConflictError for draft updates and provider calls.
class SessionService {
 public:
  SessionService(SessionStore& store, FeedbackPipeline& pipeline);

  Session create_session();
  Session get_session(const std::string& id) const;

  Session set_context(const std::string& id, const AssignmentContext& context);
  std::vector<Goal> suggest_goals(const std::string& id);
  std::vector<Goal> select_goals(const std::string& id, const std::vector<std::string>& goal_ids,
                                 const std::vector<std::string>& custom_goals);

  // `base_version` is the draft version the client edited (absent means no
  // draft yet, i.e. 0); a mismatch with the stored current version is a
  // conflict. Existing card anchors are
  // rebound to the new version.
  Draft put_draft(const std::string& id, std::string content, std::optional<int> base_version);

  std::vector<FeedbackCard> run_feedback(const std::string& id);
  ChatTurn chat(const std::string& id, const std::string& card_id, std::string_view message);
  ChatTurn find_example(const std::string& id, const std::string& card_id);
  FeedbackCard targeted(const std::string& id, std::size_t start, std::size_t end,
                        std::string_view question);
  FeedbackCard mark_addressed(const std::string& id, const std::string& card_id);
  Progress progress(const std::string& id) const;
  void record_event(const std::string& id, const std::string& name, nlohmann::json payload);

  nlohmann::json export_session(const std::string& id) const;
  Session import_session(const nlohmann::json& document);

 private:
  Session load(const std::string& id) const;
  Session update(const std::string& id, const std::function<void(Session&)>& mutate, int attempts = 3);
  std::shared_ptr<std::mutex> lock_for(const std::string& id);

  SessionStore& store_;
  FeedbackPipeline& pipeline_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace writor
