#include "writor/service.hpp"

#include <algorithm>

#include "writor/anchoring.hpp"
#include "writor/errors.hpp"
#include "writor/serialize.hpp"
#include "writor/text.hpp"

namespace writor {

using nlohmann::json;

std::string_view to_string(ApiErrorCode c) {
  switch (c) {
    case ApiErrorCode::bad_request: return "bad_request";
    case ApiErrorCode::not_found: return "not_found";
    case ApiErrorCode::conflict: return "conflict";
    case ApiErrorCode::provider_unavailable: return "provider_unavailable";
    case ApiErrorCode::internal: return "internal";
  }
  return "internal";
}

int http_status(ApiErrorCode c) {
  switch (c) {
    case ApiErrorCode::bad_request: return 400;
    case ApiErrorCode::not_found: return 404;
    case ApiErrorCode::conflict: return 409;
    case ApiErrorCode::provider_unavailable: return 502;
    case ApiErrorCode::internal: return 500;
  }
  return 500;
}

json ApiError::to_json() const {
  json j{{"code", std::string(to_string(code))}, {"message", message}};
  if (!detail.is_null()) j["detail"] = detail;
  return j;
}

ApiError api_error_from(const std::exception& e) {
  ApiError err;
  err.message = e.what();
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const json::exception*>(&e)) {
    err.code = ApiErrorCode::bad_request;
  } else if (dynamic_cast<const NotFoundError*>(&e)) {
    err.code = ApiErrorCode::not_found;
  } else if (dynamic_cast<const ConflictError*>(&e)) {
    err.code = ApiErrorCode::conflict;
  } else if (const auto* stage = dynamic_cast<const StageError*>(&e)) {
    err.code = ApiErrorCode::provider_unavailable;
    err.detail = json{{"stage", stage->stage()}};
  } else if (const auto* miss = dynamic_cast<const ReplayMissError*>(&e)) {
    err.code = ApiErrorCode::provider_unavailable;
    err.detail = json{{"stage", miss->stage()}, {"fingerprint", miss->fingerprint()}};
  } else if (dynamic_cast<const ProviderError*>(&e)) {
    err.code = ApiErrorCode::provider_unavailable;
  } else {
    err.code = ApiErrorCode::internal;
  }
  return err;
}

bool is_client_event(std::string_view name) { return name == "card_viewed" || name == "page_nav"; }

SessionService::SessionService(SessionStore& store, FeedbackPipeline& pipeline) : store_(store), pipeline_(pipeline) {}

std::shared_ptr<std::mutex> SessionService::lock_for(const std::string& id) {
  std::lock_guard lock(locks_mu_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

Session SessionService::load(const std::string& id) const {
  auto s = store_.load(id);
  if (!s) throw NotFoundError("no session " + id);
  return *s;
}

Session SessionService::update(const std::string& id, const std::function<void(Session&)>& mutate, int attempts) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  for (int attempt = 1;; ++attempt) {
    Session s = load(id);
    mutate(s);
    try {
      return store_.compare_and_swap(std::move(s));
    } catch (const ConflictError&) {
      if (attempt >= attempts) throw;
    }
  }
}

Session SessionService::create_session() {
  for (int attempt = 0; attempt < 5; ++attempt) {
    Session s;
    s.id = random_session_id();
    s.created_at = now();
    s.record("session_created", json::object(), s.created_at);
    try {
      return store_.create(std::move(s));
    } catch (const ConflictError&) {
    }
  }
  throw Error("could not allocate a session id");
}

Session SessionService::get_session(const std::string& id) const { return load(id); }

Session SessionService::set_context(const std::string& id, const AssignmentContext& context) {
  return update(id, [&](Session& s) {
    s.context = context;
    s.record("context_set");
  });
}

std::vector<Goal> SessionService::suggest_goals(const std::string& id) {
  std::vector<Goal> goals;
  update(
      id,
      [&](Session& s) {
        goals = pipeline_.generate_goals(s);
        std::erase_if(s.goals, [](const Goal& g) { return g.origin == GoalOrigin::suggested && !g.selected; });
        s.goals.insert(s.goals.end(), goals.begin(), goals.end());
        s.record("goals_suggested", json{{"count", goals.size()}});
      },
      1);
  return goals;
}

std::vector<Goal> SessionService::select_goals(const std::string& id, const std::vector<std::string>& goal_ids,
                                               const std::vector<std::string>& custom_goals) {
  std::vector<std::string> customs;
  for (const auto& c : custom_goals) {
    if (text::trim(c).empty()) throw PreconditionError("custom goal text is empty");
    customs.emplace_back(text::trim(c));
  }
  if (goal_ids.empty() && customs.empty()) throw PreconditionError("select at least one goal or add a custom goal");
  Session saved = update(id, [&](Session& s) {
    for (const auto& gid : goal_ids) {
      bool known = std::any_of(s.goals.begin(), s.goals.end(), [&](const Goal& g) { return g.id == gid; });
      if (!known) throw PreconditionError("unknown goal id " + gid);
    }
    for (auto& g : s.goals) g.selected = std::find(goal_ids.begin(), goal_ids.end(), g.id) != goal_ids.end();
    for (const auto& text : customs) {
      Goal g;
      g.id = s.next_id("g");
      g.text = text;
      g.origin = GoalOrigin::custom;
      g.selected = true;
      s.goals.push_back(std::move(g));
    }
    s.record("goals_selected", json{{"selected", goal_ids.size()}, {"custom", customs.size()}});
  });
  return saved.goals;
}

Draft SessionService::put_draft(const std::string& id, std::string content, std::optional<int> base_version) {
  if (text::trim(content).empty()) throw PreconditionError("draft content is empty");
  Session saved = update(
      id,
      [&](Session& s) {
        const Draft* current = s.current_draft();
        int current_version = current ? current->version : 0;
        int base = base_version.value_or(0);
        if (base != current_version) {
          throw ConflictError("draft was edited from version " + std::to_string(base) + " but the current version is " +
                              std::to_string(current_version));
        }
        Draft next = Draft::make(content, current_version + 1);
        if (current) s.cards = rebind_anchors(std::move(s.cards), *current, next);
        s.drafts.push_back(std::move(next));
        s.record("draft_updated", json{{"version", current_version + 1}});
      },
      1);
  return *saved.current_draft();
}

std::vector<FeedbackCard> SessionService::run_feedback(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  Session s = load(id);
  std::vector<FeedbackCard> cards;
  try {
    cards = pipeline_.run_full_pipeline(s);
  } catch (const ProviderError& e) {
    // Keep the telemetry recorded up to the failing stage.
    std::string stage = "unknown";
    if (!s.telemetry.empty() && s.telemetry.back().name == "pipeline_failed") {
      stage = s.telemetry.back().payload.value("stage", stage);
    }
    store_.compare_and_swap(s);
    if (dynamic_cast<const StageError*>(&e) || dynamic_cast<const ReplayMissError*>(&e)) throw;
    throw StageError(stage, e.what());
  }
  store_.compare_and_swap(std::move(s));
  return cards;
}

ChatTurn SessionService::chat(const std::string& id, const std::string& card_id, std::string_view message) {
  ChatTurn turn;
  update(id, [&](Session& s) { turn = pipeline_.chat_on_card(s, card_id, message); }, 1);
  return turn;
}

ChatTurn SessionService::find_example(const std::string& id, const std::string& card_id) {
  ChatTurn turn;
  update(id, [&](Session& s) { turn = pipeline_.find_example(s, card_id); }, 1);
  return turn;
}

FeedbackCard SessionService::targeted(const std::string& id, std::size_t start, std::size_t end,
                                      std::string_view question) {
  FeedbackCard card;
  update(id, [&](Session& s) { card = pipeline_.targeted_feedback(s, start, end, question); }, 1);
  return card;
}

FeedbackCard SessionService::mark_addressed(const std::string& id, const std::string& card_id) {
  FeedbackCard card;
  update(id, [&](Session& s) {
    FeedbackCard* c = s.find_card(card_id);
    if (c == nullptr) throw NotFoundError("no card " + card_id);
    c->status = CardStatus::addressed;
    card = *c;
    s.record("addressed", json{{"card", card_id}});
  });
  return card;
}

Progress SessionService::progress(const std::string& id) const { return compute_progress(load(id)); }

void SessionService::record_event(const std::string& id, const std::string& name, json payload) {
  if (!is_client_event(name)) throw PreconditionError("unknown client event '" + name + "'");
  if (payload.is_null()) payload = json::object();
  if (!payload.is_object()) throw PreconditionError("event payload must be an object");
  update(id, [&](Session& s) { s.record(name, payload); });
}

json SessionService::export_session(const std::string& id) const { return session_to_json(load(id)); }

Session SessionService::import_session(const json& document) {
  Session s = session_from_json(document);
  if (!valid_session_id(s.id)) throw PreconditionError("invalid session id '" + s.id + "'");
  return store_.create(std::move(s));
}

}  // namespace writor
