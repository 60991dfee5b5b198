#include "writor/prompts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/hash.hpp"
#include "writor/resources.hpp"

namespace writor {
namespace {

constexpr std::array kAllStages = {Stage::goals,         Stage::topics, Stage::sentences,
                                   Stage::feedback_type, Stage::final_feedback,
                                   Stage::praise,        Stage::chat,   Stage::find_example,
                                   Stage::targeted,      Stage::baseline};

bool is_marker_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls fn(name, begin, end) for every {name} marker, where [begin, end)
// spans the braces.
template <typename Fn>
void for_each_marker(std::string_view t, Fn&& fn) {
  std::size_t i = 0;
  while ((i = t.find('{', i)) != std::string_view::npos) {
    std::size_t j = i + 1;
    while (j < t.size() && is_marker_char(t[j])) ++j;
    if (j > i + 1 && j < t.size() && t[j] == '}') {
      fn(t.substr(i + 1, j - i - 1), i, j + 1);
      i = j + 1;
    } else {
      ++i;
    }
  }
}

}  // namespace

std::vector<std::string> placeholders(std::string_view template_text) {
  std::vector<std::string> out;
  for_each_marker(template_text, [&](std::string_view name, std::size_t, std::size_t) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  });
  return out;
}

std::string_view PromptLibrary::file_name(Stage stage) {
  switch (stage) {
    case Stage::goals: return "goals.txt";
    case Stage::topics: return "topics.txt";
    case Stage::sentences: return "sentences.txt";
    case Stage::feedback_type: return "feedback_type.txt";
    case Stage::final_feedback: return "final_feedback.txt";
    case Stage::praise: return "praise.txt";
    case Stage::chat: return "chat.txt";
    case Stage::find_example: return "find_example.txt";
    case Stage::targeted: return "targeted.txt";
    case Stage::baseline: return "baseline.txt";
  }
  return "chat.txt";
}

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  for (Stage s : kAllStages) {
    lib.templates_[s] = std::string(resources::get("prompts/" + std::string(file_name(s))));
  }
  return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::string& directory) {
  PromptLibrary lib = defaults();
  if (directory.empty()) return lib;
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw PreconditionError("prompts directory not found: " + directory);
  }
  for (Stage s : kAllStages) {
    fs::path p = fs::path(directory) / std::string(file_name(s));
    if (!fs::exists(p)) continue;
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    lib.templates_[s] = ss.str();
  }
  return lib;
}

const std::string& PromptLibrary::raw(Stage stage) const { return templates_.at(stage); }

void PromptLibrary::set(Stage stage, std::string text) { templates_[stage] = std::move(text); }

std::string PromptLibrary::render(Stage stage, const PromptValues& values) const {
  const std::string& t = raw(stage);
  std::string out;
  out.reserve(t.size() + 1024);
  std::set<std::string, std::less<>> used;
  std::size_t copied = 0;
  for_each_marker(t, [&](std::string_view name, std::size_t begin, std::size_t end) {
    auto it = values.find(name);
    if (it == values.end()) {
      throw PreconditionError("prompt template '" + std::string(file_name(stage)) +
                              "' needs a value for {" + std::string(name) + "}");
    }
    out.append(t, copied, begin - copied);
    out.append(it->second);
    copied = end;
    used.emplace(name);
  });
  out.append(t, copied, std::string::npos);
  for (const auto& [name, value] : values) {
    if (!used.contains(name)) {
      throw PreconditionError("prompt template '" + std::string(file_name(stage)) +
                              "' has no {" + name + "} marker");
    }
  }
  return out;
}

std::string PromptLibrary::hash() const {
  std::string all;
  for (const auto& [stage, text] : templates_) {
    all += std::string(file_name(stage)) + '\0' + text + '\0';
  }
  return sha256_hex(all);
}

}  // namespace writor
