#include <optional>
#include <string>
#include <vector>

#include "writor/errors.hpp"
#include "writor/pipeline.hpp"
#include "writor/provider.hpp"

namespace writor {

using nlohmann::json;

namespace {

enum class Need { required_nonempty, required, optional };

struct Field {
  const char* name;
  Need need;
  bool feedback_type_domain = false;  // must map to one of the two types
};

struct ListSchema {
  const char* key;
  std::size_t min_items;
  std::optional<std::size_t> max_items;
  std::vector<Field> item_fields;  // empty: items are non-empty strings
};

struct StageSchema {
  std::vector<ListSchema> lists;
  std::vector<Field> scalars;
};

const StageSchema& schema_for(Stage stage) {
  static const StageSchema goals{{{"goals", kGoalCount, kGoalCount, {}}}, {}};
  static const StageSchema topics{
      {{"HOCs", 0, std::nullopt,
        {{"Issue", Need::required_nonempty}, {"Category", Need::optional}, {"HOC", Need::optional}}}},
      {}};
  static const StageSchema sentences{
      {{"Sentences", 0, std::nullopt,
        {{"Sentence", Need::required_nonempty}, {"HOC", Need::required}, {"Reason", Need::required}}}},
      {}};
  static const StageSchema feedback_type{
      {{"Feedback_type", 0, std::nullopt,
        {{"Sentence", Need::required},
         {"HOC", Need::optional},
         {"Reason", Need::optional},
         {"FeedbackType", Need::required_nonempty, true}}}},
      {}};
  static const StageSchema final_feedback{
      {{"Feedback", 0, std::nullopt,
        {{"Sentence", Need::required},
         {"HOC", Need::required},
         {"Reason", Need::optional},
         {"FeedbackType", Need::optional},
         {"Feedback", Need::required_nonempty}}}},
      {}};
  static const StageSchema praise{
      {{"Encouragement", 0, std::nullopt,
        {{"Sentence", Need::required_nonempty},
         {"Feedback", Need::required_nonempty},
         {"Category", Need::required}}}},
      {}};
  static const StageSchema chat{{}, {{"Response", Need::required_nonempty}}};
  static const StageSchema find_example{{}, {{"Response", Need::required_nonempty}, {"Sentence", Need::optional}}};
  static const StageSchema targeted{{},
                                    {{"HOC", Need::required},
                                     {"FeedbackType", Need::required_nonempty, true},
                                     {"Feedback", Need::required_nonempty}}};
  static const StageSchema baseline{
      {{"Praise", kBaselinePraises, kBaselinePraises,
        {{"Sentence", Need::required_nonempty}, {"Feedback", Need::required_nonempty}}},
       {"Critiques", kBaselineCritiques, kBaselineCritiques,
        {{"Sentence", Need::required_nonempty}, {"Feedback", Need::required_nonempty}}}},
      {}};
  switch (stage) {
    case Stage::goals: return goals;
    case Stage::topics: return topics;
    case Stage::sentences: return sentences;
    case Stage::feedback_type: return feedback_type;
    case Stage::final_feedback: return final_feedback;
    case Stage::praise: return praise;
    case Stage::chat: return chat;
    case Stage::find_example: return find_example;
    case Stage::targeted: return targeted;
    case Stage::baseline: return baseline;
  }
  return chat;
}

void check_field(const json& obj, const Field& f, const std::string& base, std::vector<std::string>& out) {
  std::string path = base + "/" + f.name;
  auto it = obj.find(f.name);
  if (it == obj.end() || it->is_null()) {
    if (f.need != Need::optional) out.push_back(path + ": missing");
    return;
  }
  if (!it->is_string()) {
    out.push_back(path + ": expected string");
    return;
  }
  const auto& s = it->get_ref<const std::string&>();
  if (f.need == Need::required_nonempty && s.find_first_not_of(" \t\r\n") == std::string::npos) {
    out.push_back(path + ": empty");
    return;
  }
  if (f.feedback_type_domain && !map_feedback_type(s)) {
    out.push_back(path + ": '" + s + "' is neither reader-perspective nor example/analogy");
  }
}

// Index of the matching close brace for the '{' at `open`, honouring JSON
// string literals; npos when unbalanced.
std::size_t matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

// Drops commas that directly precede a closing brace or bracket (outside
// strings). The stage-4 prompt skeleton itself has one, and models copy it.
std::string strip_trailing_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\n' || s[j] == '\r' || s[j] == '\t')) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::optional<json> find_first_json_object(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    std::size_t close = matching_brace(raw, open);
    if (close == std::string_view::npos) continue;
    std::string_view candidate = raw.substr(open, close - open + 1);
    json doc = json::parse(candidate, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      doc = json::parse(strip_trailing_commas(candidate), nullptr, /*allow_exceptions=*/false);
    }
    if (!doc.is_discarded() && doc.is_object()) return doc;
  }
  return std::nullopt;
}

std::vector<std::string> schema_violations(const json& doc, Stage stage) {
  std::vector<std::string> out;
  if (!doc.is_object()) {
    out.emplace_back("/: expected object");
    return out;
  }
  const StageSchema& schema = schema_for(stage);
  for (const auto& f : schema.scalars) check_field(doc, f, "", out);
  for (const auto& list : schema.lists) {
    std::string path = std::string("/") + list.key;
    auto it = doc.find(list.key);
    if (it == doc.end()) {
      out.push_back(path + ": missing");
      continue;
    }
    if (!it->is_array()) {
      out.push_back(path + ": expected array");
      continue;
    }
    std::size_t n = it->size();
    if (list.max_items && list.min_items == *list.max_items && n != list.min_items) {
      out.push_back(path + ": " + list.key + " arity " + std::to_string(list.min_items) + ", got " +
                    std::to_string(n));
    } else if (n < list.min_items) {
      out.push_back(path + ": expected at least " + std::to_string(list.min_items) + " items");
    } else if (list.max_items && n > *list.max_items) {
      out.push_back(path + ": expected at most " + std::to_string(*list.max_items) + " items");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const json& item = (*it)[i];
      std::string ipath = path + "/" + std::to_string(i);
      if (list.item_fields.empty()) {
        if (!item.is_string() || item.get_ref<const std::string&>().find_first_not_of(" \t\r\n") ==
                                     std::string::npos) {
          out.push_back(ipath + ": expected non-empty string");
        }
        continue;
      }
      if (!item.is_object()) {
        out.push_back(ipath + ": expected object");
        continue;
      }
      for (const auto& f : list.item_fields) check_field(item, f, ipath, out);
    }
  }
  return out;
}

json extract_structured(std::string_view raw, Stage stage) {
  auto doc = find_first_json_object(raw);
  if (!doc) {
    throw MalformedOutputError("no JSON object found in provider output for stage '" +
                               std::string(to_string(stage)) + "'");
  }
  auto problems = schema_violations(*doc, stage);
  if (!problems.empty()) throw SchemaError(std::string(to_string(stage)), std::move(problems));
  return std::move(*doc);
}

RepairResult complete_with_repair(Provider& provider, const PromptRequest& request, int max_attempts,
                                  const DocumentCheck& check) {
  if (max_attempts < 1) throw PreconditionError("max_attempts must be at least 1");
  RepairResult result;
  std::string last_error;
  PromptRequest attempt = request;
  for (int i = 0; i < max_attempts; ++i) {
    if (i > 0) attempt.rendered_prompt = request.rendered_prompt + std::string(kRepairInstruction);
    std::string raw = provider.complete(attempt);
    ++result.calls;
    result.raw_responses.push_back(raw);
    try {
      json doc = extract_structured(raw, request.stage);
      if (check) {
        if (auto problem = check(doc)) {
          last_error = *problem;
          continue;
        }
      }
      result.document = std::move(doc);
      return result;
    } catch (const MalformedOutputError& e) {
      last_error = e.what();
    } catch (const SchemaError& e) {
      last_error = e.what();
    }
  }
  throw StageError(std::string(to_string(request.stage)),
                   last_error + " (after " + std::to_string(result.calls) + " attempts)",
                   std::move(result.raw_responses));
}

}  // namespace writor
