#include "writor/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/hash.hpp"
#include "writor/serialize.hpp"
#include "writor/text.hpp"

namespace writor {

namespace fs = std::filesystem;
using nlohmann::json;

std::string CorpusEssay::source_hash() const { return sha256_hex(text); }

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string csv_cell(std::string_view s) {
  bool quote = s.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string kind_title(CardKind k) { return k == CardKind::critique ? "Critique" : "Praise"; }

std::string metric_title(AuditMetric m) {
  switch (m) {
    case AuditMetric::length: return "Length";
    case AuditMetric::specificity: return "Specificity";
    case AuditMetric::sentiment: return "Sentiment";
  }
  return "?";
}

double metric_value(const MetricVector& v, AuditMetric m) {
  switch (m) {
    case AuditMetric::length: return static_cast<double>(v.length_words);
    case AuditMetric::specificity: return static_cast<double>(v.specificity_chunks);
    case AuditMetric::sentiment: return v.sentiment;
  }
  return 0.0;
}

int metric_decimals(AuditMetric m) { return m == AuditMetric::sentiment ? 3 : 2; }

constexpr AuditMetric kMetrics[] = {AuditMetric::length, AuditMetric::specificity, AuditMetric::sentiment};
constexpr CardKind kKinds[] = {CardKind::critique, CardKind::praise};
constexpr const char* kGenerators[] = {"pipeline", "baseline"};

// Rules that do not apply to a card of this shape.
std::vector<Violation> not_applicable(const FeedbackCard& card) {
  std::vector<Violation> out;
  bool labelled = card.hoc_label && !text::trim(*card.hoc_label).empty();
  if (card.kind == CardKind::critique) {
    out.push_back(Violation::category_form);
    if (!labelled) out.push_back(Violation::hoc_too_long);
  } else {
    out.push_back(Violation::no_question_ending);
    out.push_back(Violation::hoc_too_long);
    if (!labelled) out.push_back(Violation::category_form);
  }
  return out;
}

struct EssayOutcome {
  std::vector<AuditCardRecord> records;
  std::optional<std::string> excluded;
};

EssayOutcome audit_essay(const CorpusEssay& essay, const Generator& pipeline, const Generator& baseline,
                         const AuditOptions& options) {
  EssayOutcome out;
  try {
    for (int run = 0; run < options.runs_per_essay; ++run) {
      for (const char* name : kGenerators) {
        const Generator& gen = std::string_view(name) == "pipeline" ? pipeline : baseline;
        for (const FeedbackCard& card : gen(essay, run)) {
          AuditCardRecord r;
          r.essay_id = essay.id;
          r.run = run;
          r.generator = name;
          r.kind = card.kind;
          r.feedback_text = card.feedback_text;
          r.hoc_label = card.hoc_label;
          r.metrics = measure(card.feedback_text);
          r.flags = validate_card(card, essay.text, options.guardrails).labels();
          for (Violation v : not_applicable(card)) r.not_applicable.emplace_back(to_string(v));
          out.records.push_back(std::move(r));
        }
      }
    }
  } catch (const std::exception& e) {
    out.records.clear();
    out.excluded = e.what();
  }
  return out;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::vector<CorpusEssay> load_corpus(const std::string& directory) {
  fs::path dir(directory);
  if (!fs::is_directory(dir)) throw PreconditionError("corpus directory not found: " + directory);
  std::vector<CorpusEssay> essays;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    CorpusEssay e;
    e.id = entry.path().stem().string();
    e.text = read_file(entry.path());
    fs::path ctx_path = dir / (e.id + ".context.json");
    if (!fs::exists(ctx_path)) throw PreconditionError("missing context file for " + e.id);
    json ctx;
    try {
      ctx = json::parse(read_file(ctx_path));
      e.context.reader_description = ctx.value("reader_description", "");
      e.context.assignment_prompt = ctx.at("assignment_prompt").get<std::string>();
      e.context.edit_expectations = ctx.value("edit_expectations", "");
      e.goals = ctx.at("goals").get<std::vector<std::string>>();
    } catch (const json::exception& ex) {
      throw PreconditionError("malformed context file for " + e.id + ": " + ex.what());
    }
    if (e.goals.empty()) throw PreconditionError("context file for " + e.id + " lists no goals");
    essays.push_back(std::move(e));
  }
  if (essays.empty()) throw PreconditionError("corpus directory has no essays: " + directory);
  std::sort(essays.begin(), essays.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return essays;
}

std::string_view to_string(AuditMetric m) {
  switch (m) {
    case AuditMetric::length: return "length";
    case AuditMetric::specificity: return "specificity";
    case AuditMetric::sentiment: return "sentiment";
  }
  return "?";
}

double FlagRate::flag_rate() const {
  return applicable == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(applicable);
}

double FlagRate::compliance_rate() const { return applicable == 0 ? 1.0 : 1.0 - flag_rate(); }

double MetricComparison::diff_fraction() const {
  if (baseline_mean == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (pipeline_mean - baseline_mean) / baseline_mean;
}

AuditReport run_audit(const std::vector<CorpusEssay>& corpus, const Generator& pipeline, const Generator& baseline,
                      const AuditOptions& options) {
  if (corpus.empty()) throw PreconditionError("corpus is empty");
  if (options.runs_per_essay < 1) throw PreconditionError("runs_per_essay must be at least 1");
  if (!pipeline || !baseline) throw PreconditionError("both generators are required");

  std::vector<const CorpusEssay*> order;
  for (const auto& e : corpus) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->id == order[i - 1]->id) throw PreconditionError("duplicate essay id " + order[i]->id);
  }

  std::vector<EssayOutcome> outcomes(order.size());
  const std::size_t width = std::max<std::size_t>(1, options.max_parallel_essays);
  for (std::size_t begin = 0; begin < order.size(); begin += width) {
    std::size_t end = std::min(order.size(), begin + width);
    if (width == 1) {
      outcomes[begin] = audit_essay(*order[begin], pipeline, baseline, options);
      continue;
    }
    std::vector<std::future<EssayOutcome>> jobs;
    for (std::size_t i = begin; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, audit_essay, std::cref(*order[i]), std::cref(pipeline),
                                std::cref(baseline), std::cref(options)));
    }
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = jobs[i - begin].get();
  }

  AuditReport report;
  report.runs_per_essay = static_cast<std::size_t>(options.runs_per_essay);
  report.config_hashes["guardrails"] = options.guardrails.hash();
  report.config_hashes["metrics_data"] = metrics_data_hash();
  report.config_hashes["prompts"] = options.prompts_hash;

  std::vector<std::string> included;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (outcomes[i].excluded) {
      report.excluded.emplace_back(order[i]->id, *outcomes[i].excluded);
      continue;
    }
    included.push_back(order[i]->id);
    report.essays.emplace_back(order[i]->id, order[i]->source_hash());
    for (auto& r : outcomes[i].records) report.cards.push_back(std::move(r));
  }

  for (const char* gen : kGenerators) {
    for (CardKind kind : kKinds) {
      auto& rates = report.compliance[gen][kind];
      for (Violation v : all_violations()) rates[v];
    }
  }
  for (const auto& r : report.cards) {
    auto& rates = report.compliance[r.generator][r.kind];
    for (Violation v : all_violations()) {
      std::string label(to_string(v));
      if (contains(r.not_applicable, label)) continue;
      rates[v].applicable += 1;
      if (contains(r.flags, label)) rates[v].flagged += 1;
    }
  }

  for (CardKind kind : kKinds) {
    for (AuditMetric metric : kMetrics) {
      MetricComparison cmp;
      cmp.kind = kind;
      cmp.metric = metric;
      for (const auto& id : included) {
        for (const char* gen : kGenerators) {
          double sum = 0.0;
          std::size_t n = 0;
          for (const auto& r : report.cards) {
            if (r.essay_id == id && r.kind == kind && r.generator == gen) {
              sum += metric_value(r.metrics, metric);
              ++n;
            }
          }
          // An essay with no cards of this kind contributes 0.
          double mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
          (std::string_view(gen) == "pipeline" ? cmp.pipeline_per_essay : cmp.baseline_per_essay).push_back(mean);
        }
      }
      auto avg = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      cmp.pipeline_mean = avg(cmp.pipeline_per_essay);
      cmp.baseline_mean = avg(cmp.baseline_per_essay);
      if (included.size() >= 2) cmp.test = paired_t_test(cmp.pipeline_per_essay, cmp.baseline_per_essay);
      report.comparisons.push_back(std::move(cmp));
    }
  }
  return report;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  if (s == "csv") return ReportFormat::csv;
  throw PreconditionError("unknown report format '" + std::string(s) + "' (expected json, markdown or csv)");
}

std::string format_diff_percent(double fraction) {
  if (!std::isfinite(fraction)) return "n/a";
  double pct = fraction * 100.0;
  std::string s = fixed(pct, 1);
  if (s == "-0.0") s = "0.0";
  if (s[0] != '-') s = "+" + s;
  return s + "%";
}

std::string significance_stars(double p) {
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace {

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string p_text(const std::optional<TTestResult>& t) {
  if (!t) return "n/a";
  if (t->p < 0.0001) return "<0.0001";
  return fixed(t->p, 4);
}

std::string t_text(const std::optional<TTestResult>& t) {
  if (!t) return "n/a";
  if (std::isinf(t->t)) return t->t > 0 ? "inf" : "-inf";
  return fixed(t->t, 3);
}

}  // namespace

json report_to_json(const AuditReport& report) {
  json j;
  j["format"] = "writor-audit-report";
  j["version"] = 1;
  j["runs_per_essay"] = report.runs_per_essay;

  json essays = json::array();
  for (const auto& [id, hash] : report.essays) essays.push_back({{"id", id}, {"source_hash", hash}});
  json excluded = json::array();
  for (const auto& [id, reason] : report.excluded) excluded.push_back({{"id", id}, {"reason", reason}});
  j["corpus"] = {{"essay_count", report.essays.size()}, {"essays", essays}, {"excluded", excluded}};
  j["config_hashes"] = report.config_hashes;

  json compliance = json::object();
  for (const auto& [gen, kinds] : report.compliance) {
    for (const auto& [kind, flags] : kinds) {
      json rules = json::object();
      for (const auto& [v, rate] : flags) {
        rules[std::string(to_string(v))] = {{"applicable", rate.applicable},
                                            {"flagged", rate.flagged},
                                            {"flag_rate", rate.flag_rate()},
                                            {"compliance_rate", rate.compliance_rate()}};
      }
      compliance[gen][std::string(to_string(kind))] = rules;
    }
  }
  j["compliance"] = compliance;

  json comparisons = json::array();
  for (const auto& c : report.comparisons) {
    json row = {{"kind", std::string(to_string(c.kind))},
                {"metric", std::string(to_string(c.metric))},
                {"pipeline_mean", c.pipeline_mean},
                {"baseline_mean", c.baseline_mean},
                {"diff_fraction", number_or_string(c.diff_fraction())},
                {"diff_percent", format_diff_percent(c.diff_fraction())},
                {"pipeline_per_essay", c.pipeline_per_essay},
                {"baseline_per_essay", c.baseline_per_essay}};
    if (c.test) {
      row["t_test"] = {{"t", number_or_string(c.test->t)},
                       {"df", c.test->df},
                       {"p", c.test->p},
                       {"n", c.test->df + 1},
                       {"significance", significance_stars(c.test->p)}};
    } else {
      row["t_test"] = nullptr;
    }
    comparisons.push_back(std::move(row));
  }
  j["comparisons"] = comparisons;

  json cards = json::array();
  for (const auto& r : report.cards) {
    json c = {{"essay_id", r.essay_id},
              {"run", r.run},
              {"generator", r.generator},
              {"kind", std::string(to_string(r.kind))},
              {"feedback_text", r.feedback_text},
              {"metrics",
               {{"length", r.metrics.length_words},
                {"specificity", r.metrics.specificity_chunks},
                {"sentiment", r.metrics.sentiment}}},
              {"flags", r.flags},
              {"not_applicable", r.not_applicable}};
    if (r.hoc_label) c["hoc_label"] = *r.hoc_label;
    cards.push_back(std::move(c));
  }
  j["cards"] = cards;
  return j;
}

namespace {

std::string emit_markdown(const AuditReport& report) {
  std::ostringstream out;
  out << "# Feedback audit\n\n";
  out << "Essays: " << report.essays.size() << ", runs per essay: " << report.runs_per_essay << "\n\n";
  if (!report.excluded.empty()) {
    out << "Excluded:\n\n";
    for (const auto& [id, reason] : report.excluded) out << "- " << id << ": " << reason << "\n";
    out << "\n";
  }
  out << "## Comparison\n\n";
  out << "| Type | Metric | Writor | Baseline | Diff % | P-Value | Sig. |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& c : report.comparisons) {
    int d = metric_decimals(c.metric);
    out << "| " << kind_title(c.kind) << " | " << metric_title(c.metric) << " | " << fixed(c.pipeline_mean, d)
        << " | " << fixed(c.baseline_mean, d) << " | " << format_diff_percent(c.diff_fraction()) << " | "
        << p_text(c.test) << " | " << (c.test ? significance_stars(c.test->p) : "") << " |\n";
  }
  out << "\nPaired t-test across essays on per-essay means; * p < 0.05, ** p < 0.01.\n\n";

  out << "## Guardrail compliance\n\n";
  out << "| Generator | Type | Rule | Applicable | Flagged | Compliance |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const char* gen : kGenerators) {
    auto g = report.compliance.find(gen);
    if (g == report.compliance.end()) continue;
    for (CardKind kind : kKinds) {
      auto k = g->second.find(kind);
      if (k == g->second.end()) continue;
      for (const auto& [v, rate] : k->second) {
        if (rate.applicable == 0) continue;
        out << "| " << gen << " | " << kind_title(kind) << " | " << to_string(v) << " | " << rate.applicable
            << " | " << rate.flagged << " | " << fixed(rate.compliance_rate() * 100.0, 1) << "% |\n";
      }
    }
  }
  out << "\n## Configuration\n\n";
  for (const auto& [name, hash] : report.config_hashes) out << "- " << name << ": `" << hash << "`\n";
  out << "\n## Corpus\n\n";
  for (const auto& [id, hash] : report.essays) out << "- " << id << ": `" << hash << "`\n";
  return out.str();
}

std::string emit_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "type,metric,writor_mean,baseline_mean,diff_percent,t,df,p,sig\n";
  for (const auto& c : report.comparisons) {
    out << to_string(c.kind) << "," << to_string(c.metric) << "," << fixed(c.pipeline_mean, 6) << ","
        << fixed(c.baseline_mean, 6) << "," << format_diff_percent(c.diff_fraction()) << "," << t_text(c.test)
        << "," << (c.test ? std::to_string(c.test->df) : "n/a") << "," << (c.test ? fixed(c.test->p, 6) : "n/a")
        << "," << (c.test ? significance_stars(c.test->p) : "") << "\n";
  }
  return out.str();
}

}  // namespace

std::string emit_report(const AuditReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
    case ReportFormat::markdown: return emit_markdown(report);
    case ReportFormat::csv: return emit_csv(report);
  }
  throw PreconditionError("unknown report format");
}

std::string emit_coding_sheet(const AuditReport& report) {
  std::ostringstream out;
  out << "essay_id,run,kind,hoc_label,feedback_text,accurate,appropriate,non_directive,goal_aligned,type_aligned,"
         "praise_specific\n";
  for (const auto& r : report.cards) {
    if (r.generator != "pipeline") continue;
    out << csv_cell(r.essay_id) << "," << r.run << "," << to_string(r.kind) << ","
        << csv_cell(r.hoc_label.value_or("")) << "," << csv_cell(r.feedback_text) << ",,,,,,\n";
  }
  return out.str();
}

}  // namespace writor
