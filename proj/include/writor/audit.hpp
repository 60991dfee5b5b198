#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "writor/guardrails.hpp"
#include "writor/metrics.hpp"
#include "writor/stats.hpp"
#include "writor/types.hpp"

namespace writor {

struct CorpusEssay {
  std::string id;  // file stem, e.g. "essay_01"
  AssignmentContext context;
  std::vector<std::string> goals;
  std::string text;

  std::string source_hash() const;  // sha256 of text
};

// Reads DIR/*.txt with a sibling <stem>.context.json holding
// {"reader_description", "assignment_prompt", "edit_expectations", "goals"}.
// Essays come back sorted by id. Throws PreconditionError when the directory
// is missing, empty, or a context file is absent or malformed.
std::vector<CorpusEssay> load_corpus(const std::string& directory);

// Produces the cards for one essay and one run (0-based).
using Generator = std::function<std::vector<FeedbackCard>(const CorpusEssay&, int run)>;

enum class AuditMetric { length, specificity, sentiment };
std::string_view to_string(AuditMetric m);

struct AuditCardRecord {
  std::string essay_id;
  int run = 0;
  std::string generator;  // "pipeline" or "baseline"
  CardKind kind = CardKind::critique;
  std::string feedback_text;
  std::optional<std::string> hoc_label;
  MetricVector metrics;
  std::vector<std::string> flags;
  std::vector<std::string> not_applicable;  // rules skipped for this card
};

struct FlagRate {
  std::size_t applicable = 0;
  std::size_t flagged = 0;
  double flag_rate() const;
  double compliance_rate() const;
};

struct MetricComparison {
  CardKind kind = CardKind::critique;
  AuditMetric metric = AuditMetric::length;
  double pipeline_mean = 0.0;  // mean of per-essay means
  double baseline_mean = 0.0;
  std::vector<double> pipeline_per_essay;
  std::vector<double> baseline_per_essay;
  std::optional<TTestResult> test;  // absent when fewer than two essays
  double diff_fraction() const;     // (pipeline - baseline) / baseline
};

struct AuditReport {
  std::size_t runs_per_essay = 0;
  std::vector<std::pair<std::string, std::string>> essays;  // id, source hash
  std::vector<std::pair<std::string, std::string>> excluded;  // id, reason
  // generator -> kind -> flag -> rate
  std::map<std::string, std::map<CardKind, std::map<Violation, FlagRate>>> compliance;
  std::vector<MetricComparison> comparisons;  // critique then praise; length, specificity, sentiment
  std::vector<AuditCardRecord> cards;
  std::map<std::string, std::string> config_hashes;  // guardrails, metrics_data, prompts
};

struct AuditOptions {
  int runs_per_essay = 3;
  GuardrailConfig guardrails = GuardrailConfig::defaults();
  std::string prompts_hash;
  std::size_t max_parallel_essays = 1;
};

AuditReport run_audit(const std::vector<CorpusEssay>& corpus, const Generator& pipeline,
                      const Generator& baseline, const AuditOptions& options);

enum class ReportFormat { json, markdown, csv };
ReportFormat parse_report_format(std::string_view s);  // throws PreconditionError

std::string emit_report(const AuditReport& report, ReportFormat format);
nlohmann::json report_to_json(const AuditReport& report);

// One row per pipeline card for the human-coded audit items that have no
// automatic proxy (accuracy, appropriateness, non-directivity, goal and
// type alignment, praise specificity). Cells to be filled are blank.
std::string emit_coding_sheet(const AuditReport& report);

// "+46.9%" style, one decimal.
std::string format_diff_percent(double fraction);
std::string significance_stars(double p);

}  // namespace writor
