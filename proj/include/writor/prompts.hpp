#pragma once

#include <map>
#include <string>
#include <string_view>

#include "writor/provider.hpp"

namespace writor {

using PromptValues = std::map<std::string, std::string, std::less<>>;

// Prompt templates keyed by stage. Defaults are compiled in from
// data/prompts; a directory may override any subset by file name.
class PromptLibrary {
 public:
  static PromptLibrary defaults();
  static PromptLibrary with_overrides(const std::string& directory);

  const std::string& raw(Stage stage) const;
  void set(Stage stage, std::string text);

  // Substitutes {name} markers. Throws PreconditionError when the template
  // uses a marker with no value, or a value is given for a marker the
  // template lacks. Text in the values is inserted verbatim.
  std::string render(Stage stage, const PromptValues& values) const;

  // sha256 over every template, in stage order.
  std::string hash() const;

  static std::string_view file_name(Stage stage);

 private:
  std::map<Stage, std::string> templates_;
};

// Placeholder marker names found in a template, in order of first use.
std::vector<std::string> placeholders(std::string_view template_text);

}  // namespace writor
