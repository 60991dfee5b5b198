#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "writor/errors.hpp"
#include "writor/audit.hpp"

using namespace writor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<CorpusEssay> corpus(int n) {
  std::vector<CorpusEssay> out;
  for (int i = 0; i < n; ++i) {
    CorpusEssay e;
    char id[16];
    std::snprintf(id, sizeof id, "e%02d", i);
    e.id = id;
    e.context = {"r", "p", "x"};
    e.goals = {"goal"};
    e.text = "Essay number " + std::to_string(i) + " argues that the town needs parks.";
    out.push_back(e);
  }
  return out;
}

FeedbackCard make(CardKind kind, std::string text, std::optional<std::string> label) {
  FeedbackCard c;
  c.kind = kind;
  c.feedback_text = std::move(text);
  c.hoc_label = std::move(label);
  return c;
}

// Pipeline: richer, question-ending critiques; essay index changes the length.
std::vector<FeedbackCard> pipeline_cards(const CorpusEssay& e, int run) {
  int k = std::stoi(e.id.substr(1));
  std::string extra;
  for (int i = 0; i < k + run; ++i) extra += " the local park budget";
  return {make(CardKind::critique, "How could the city council evidence" + extra + " reach a reader?", "Development"),
          make(CardKind::critique, "What does the reader need about the second paragraph?", "Organization"),
          make(CardKind::praise, "Excellent clear argument about the old playground.", "Good thesis")};
}

std::vector<FeedbackCard> baseline_cards(const CorpusEssay& e, int) {
  int k = std::stoi(e.id.substr(1));
  std::vector<FeedbackCard> out;
  out.push_back(make(CardKind::praise, "Nice.", std::nullopt));
  for (int i = 0; i < 5; ++i) {
    out.push_back(make(CardKind::critique, i == 0 && k % 2 == 0 ? "Try: Parks make every block a better place." : "Be specific.",
                       std::nullopt));
  }
  return out;
}

AuditOptions options(int runs) {
  AuditOptions o;
  o.runs_per_essay = runs;
  o.prompts_hash = "p-hash";
  return o;
}

double metric_of(const AuditCardRecord& r, AuditMetric m) {
  switch (m) {
    case AuditMetric::length: return static_cast<double>(r.metrics.length_words);
    case AuditMetric::specificity: return static_cast<double>(r.metrics.specificity_chunks);
    case AuditMetric::sentiment: return r.metrics.sentiment;
  }
  return 0;
}

}  // namespace

TEST(Corpus, LoadsSortedAndValidates) {
  auto essays = load_corpus(writor::testing::source_path("fixtures/corpus"));
  ASSERT_EQ(essays.size(), 10u);
  for (std::size_t i = 1; i < essays.size(); ++i) EXPECT_LT(essays[i - 1].id, essays[i].id);
  EXPECT_EQ(essays[0].id, "essay_01");
  EXPECT_FALSE(essays[0].goals.empty());
  EXPECT_EQ(essays[0].source_hash().size(), 64u);

  fs::path dir = fs::temp_directory_path() / "writor_corpus_test";
  fs::remove_all(dir);
  EXPECT_THROW(load_corpus(dir.string()), PreconditionError);
  fs::create_directories(dir);
  EXPECT_THROW(load_corpus(dir.string()), PreconditionError);
  std::ofstream(dir / "a.txt") << "Essay text.";
  EXPECT_THROW(load_corpus(dir.string()), PreconditionError);  // no context
  std::ofstream(dir / "a.context.json") << "{not json";
  EXPECT_THROW(load_corpus(dir.string()), PreconditionError);
  std::ofstream(dir / "a.context.json") << R"({"assignment_prompt":"p","goals":[]})";
  EXPECT_THROW(load_corpus(dir.string()), PreconditionError);
  std::ofstream(dir / "a.context.json") << R"({"assignment_prompt":"p","goals":["g"]})";
  EXPECT_EQ(load_corpus(dir.string()).size(), 1u);
  fs::remove_all(dir);
}

TEST(Audit, MeansAndRatesRecomputableFromCards) {
  auto c = corpus(4);
  auto report = run_audit(c, pipeline_cards, baseline_cards, options(3));
  EXPECT_EQ(report.runs_per_essay, 3u);
  EXPECT_EQ(report.essays.size(), 4u);
  EXPECT_EQ(report.cards.size(), 4u * 3u * (3u + 6u));
  ASSERT_EQ(report.comparisons.size(), 6u);

  for (const auto& cmp : report.comparisons) {
    for (const std::string gen : {"pipeline", "baseline"}) {
      std::vector<double> per_essay;
      for (const auto& e : c) {
        double sum = 0;
        int n = 0;
        for (const auto& r : report.cards) {
          if (r.essay_id == e.id && r.generator == gen && r.kind == cmp.kind) {
            sum += metric_of(r, cmp.metric);
            ++n;
          }
        }
        per_essay.push_back(n ? sum / n : 0);
      }
      const auto& got = gen == "pipeline" ? cmp.pipeline_per_essay : cmp.baseline_per_essay;
      ASSERT_EQ(got.size(), per_essay.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], per_essay[i], 1e-12);
      double mean = 0;
      for (double v : per_essay) mean += v;
      mean /= static_cast<double>(per_essay.size());
      EXPECT_NEAR(gen == "pipeline" ? cmp.pipeline_mean : cmp.baseline_mean, mean, 1e-12);
    }
    ASSERT_TRUE(cmp.test);
    auto expect = paired_t_test(cmp.pipeline_per_essay, cmp.baseline_per_essay);
    EXPECT_EQ(cmp.test->df, 3u);
    if (std::isfinite(expect.t)) EXPECT_DOUBLE_EQ(cmp.test->t, expect.t);
  }

  // Compliance counts match the per-card flags.
  for (const auto& [gen, kinds] : report.compliance) {
    for (const auto& [kind, rules] : kinds) {
      for (const auto& [rule, rate] : rules) {
        std::size_t applicable = 0, flagged = 0;
        std::string name(to_string(rule));
        for (const auto& r : report.cards) {
          if (r.generator != gen || r.kind != kind) continue;
          if (std::find(r.not_applicable.begin(), r.not_applicable.end(), name) != r.not_applicable.end()) continue;
          ++applicable;
          if (std::find(r.flags.begin(), r.flags.end(), name) != r.flags.end()) ++flagged;
        }
        EXPECT_EQ(rate.applicable, applicable) << gen << " " << name;
        EXPECT_EQ(rate.flagged, flagged) << gen << " " << name;
        EXPECT_NEAR(rate.flag_rate() + rate.compliance_rate(), 1.0, 1e-12);
      }
    }
  }
  // Baseline critiques: every one lacks a question; the copyable one appears on even essays only.
  const auto& bq = report.compliance.at("baseline").at(CardKind::critique);
  EXPECT_EQ(bq.at(Violation::no_question_ending).flagged, bq.at(Violation::no_question_ending).applicable);
  EXPECT_EQ(bq.at(Violation::copyable_text).flagged, 2u * 3u);
  // Unlabeled baseline cards are not judged on label form.
  EXPECT_EQ(bq.at(Violation::hoc_too_long).applicable, 0u);
  EXPECT_EQ(bq.at(Violation::hoc_too_long).compliance_rate(), 1.0);
  EXPECT_EQ(report.compliance.at("pipeline").at(CardKind::critique).at(Violation::no_question_ending).flagged, 0u);

  EXPECT_EQ(report.config_hashes.at("prompts"), "p-hash");
  EXPECT_EQ(report.config_hashes.at("guardrails"), GuardrailConfig::defaults().hash());
  EXPECT_EQ(report.config_hashes.at("metrics_data"), metrics_data_hash());
}

TEST(Audit, SingleEssayHasNoTest) {
  auto report = run_audit(corpus(1), pipeline_cards, baseline_cards, options(2));
  for (const auto& cmp : report.comparisons) EXPECT_FALSE(cmp.test);
  std::string md = emit_report(report, ReportFormat::markdown);
  EXPECT_NE(md.find("n/a"), std::string::npos);
  EXPECT_TRUE(report_to_json(report)["comparisons"][0]["t_test"].is_null());
}

TEST(Audit, FailingEssayIsExcluded) {
  auto c = corpus(3);
  Generator flaky = [](const CorpusEssay& e, int run) {
    if (e.id == "e01" && run == 1) throw ProviderError("replay miss");
    return pipeline_cards(e, run);
  };
  auto report = run_audit(c, flaky, baseline_cards, options(2));
  ASSERT_EQ(report.excluded.size(), 1u);
  EXPECT_EQ(report.excluded[0].first, "e01");
  EXPECT_NE(report.excluded[0].second.find("replay miss"), std::string::npos);
  EXPECT_EQ(report.essays.size(), 2u);
  for (const auto& r : report.cards) EXPECT_NE(r.essay_id, "e01");
  EXPECT_EQ(report.comparisons[0].pipeline_per_essay.size(), 2u);
}

TEST(Audit, ParallelMatchesSerial) {
  auto c = corpus(5);
  AuditOptions par = options(2);
  par.max_parallel_essays = 3;
  EXPECT_EQ(emit_report(run_audit(c, pipeline_cards, baseline_cards, options(2)), ReportFormat::json),
            emit_report(run_audit(c, pipeline_cards, baseline_cards, par), ReportFormat::json));
}

TEST(Audit, RejectsBadOptions) {
  EXPECT_THROW(run_audit(corpus(2), pipeline_cards, baseline_cards, options(0)), PreconditionError);
  EXPECT_THROW(run_audit({}, pipeline_cards, baseline_cards, options(1)), PreconditionError);
}

TEST(Report, MarkdownHasComparisonColumns) {
  auto report = run_audit(corpus(4), pipeline_cards, baseline_cards, options(3));
  std::string md = emit_report(report, ReportFormat::markdown);
  EXPECT_NE(md.find("| Type | Metric | Writor | Baseline | Diff % | P-Value | Sig. |"), std::string::npos);
  for (const auto& [name, hash] : report.config_hashes) EXPECT_NE(md.find(hash), std::string::npos) << name;
  int rows = 0;
  std::istringstream in(md);
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("| Critique |") || line.starts_with("| Praise |")) ++rows;
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(md, emit_report(run_audit(corpus(4), pipeline_cards, baseline_cards, options(3)), ReportFormat::markdown));
}

TEST(Report, CsvAndJson) {
  auto report = run_audit(corpus(3), pipeline_cards, baseline_cards, options(1));
  std::string csv = emit_report(report, ReportFormat::csv);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "type,metric,writor_mean,baseline_mean,diff_percent,t,df,p,sig");
  json j = json::parse(emit_report(report, ReportFormat::json));
  EXPECT_EQ(j["format"], "writor-audit-report");
  EXPECT_EQ(j["corpus"]["essay_count"], 3);
  EXPECT_EQ(j["comparisons"].size(), 6u);
  EXPECT_EQ(j["cards"].size(), report.cards.size());
  EXPECT_TRUE(j["compliance"]["pipeline"]["critique"].contains("copyable_text"));
  EXPECT_EQ(report_to_json(report), j);
  EXPECT_EQ(parse_report_format("markdown"), ReportFormat::markdown);
  EXPECT_THROW(parse_report_format("xml"), PreconditionError);
}

TEST(Report, DiffFormatting) {
  EXPECT_EQ(format_diff_percent(0.469), "+46.9%");
  EXPECT_EQ(format_diff_percent(-0.1234), "-12.3%");
  EXPECT_EQ(format_diff_percent(-0.00001), "+0.0%");
  EXPECT_EQ(format_diff_percent(0), "+0.0%");
  EXPECT_EQ(format_diff_percent(std::nan("")), "n/a");
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.01), "*");
  EXPECT_EQ(significance_stars(0.049), "*");
  EXPECT_EQ(significance_stars(0.05), "");
  MetricComparison m;
  m.pipeline_mean = 3;
  m.baseline_mean = 0;
  EXPECT_TRUE(std::isnan(m.diff_fraction()));
  m.baseline_mean = 2;
  EXPECT_DOUBLE_EQ(m.diff_fraction(), 0.5);
}

TEST(Report, CodingSheetListsPipelineCards) {
  auto report = run_audit(corpus(2), pipeline_cards, baseline_cards, options(1));
  std::string sheet = emit_coding_sheet(report);
  std::istringstream in(sheet);
  std::string header;
  std::getline(in, header);
  for (const char* col : {"accurate", "appropriate", "non_directive", "goal_aligned", "type_aligned", "praise_specific"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * 3);
  EXPECT_EQ(sheet.find("Be specific."), std::string::npos);
}
