#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "writor/prompts.hpp"
#include "writor/provider.hpp"

namespace writor {

// Recovers placeholder values from a prompt rendered from `template_text`.
// Literal text between markers is matched left to right; text appended
// after the template's final literal is ignored. nullopt when the prompt
// does not follow the template.
std::optional<PromptValues> unrender(std::string_view template_text, std::string_view rendered);

// Offline stand-in for a chat model. It reads the essay and upstream results
// back out of each prompt and writes plausible, schema-valid replies built
// from the essay's own sentences and noun phrases. Output depends only on
// the seed, the prompt, and how many times that exact prompt was seen, so
// recording the same session twice gives the same transcript.
//
// Used for mock mode and for synthesizing the shipped fixture transcripts.
// Its wording is canned; it says nothing about how a real model behaves.
class ScriptedResponder : public Provider {
 public:
  explicit ScriptedResponder(std::uint64_t seed = 0, PromptLibrary prompts = PromptLibrary::defaults());

  std::string complete(const PromptRequest& request) override;

 private:
  std::uint64_t seed_;
  PromptLibrary prompts_;
  std::mutex mu_;
  std::map<std::string, std::uint64_t> seen_;
};

}  // namespace writor
