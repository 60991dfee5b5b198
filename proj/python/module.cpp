#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <map>
#include <memory>

#include "writor/anchoring.hpp"
#include "writor/audit.hpp"
#include "writor/errors.hpp"
#include "writor/guardrails.hpp"
#include "writor/metrics.hpp"
#include "writor/pipeline.hpp"
#include "writor/scripted.hpp"
#include "writor/serialize.hpp"
#include "writor/stats.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace writor;
using nlohmann::json;

namespace {

CardKind parse_kind(const std::string& s) {
  if (s == "critique") return CardKind::critique;
  if (s == "praise") return CardKind::praise;
  throw PreconditionError("kind must be critique or praise, got '" + s + "'");
}

Session make_session(const std::string& id, const AssignmentContext& context,
                     const std::vector<std::string>& goals, const std::string& text) {
  Session s;
  s.id = id;
  s.context = context;
  for (const auto& g : goals) {
    Goal goal;
    goal.id = s.next_id("g");
    goal.text = g;
    goal.origin = GoalOrigin::custom;
    goal.selected = true;
    s.goals.push_back(std::move(goal));
  }
  s.drafts.push_back(Draft::make(text, 1));
  return s;
}

std::vector<const Goal*> goal_ptrs(const Session& s) {
  std::vector<const Goal*> out;
  for (const auto& g : s.goals) out.push_back(&g);
  return out;
}

std::unique_ptr<Provider> offline_provider(const std::string& transcript, std::uint64_t seed) {
  if (transcript.empty()) return std::make_unique<ScriptedResponder>(seed);
  return std::make_unique<ReplayProvider>(Transcript::load(transcript));
}

std::vector<std::string> validate(const std::string& kind, const std::string& text, const std::string& draft,
                                  std::optional<std::string> label) {
  FeedbackCard card;
  card.kind = parse_kind(kind);
  card.feedback_text = text;
  card.hoc_label = std::move(label);
  return validate_card(card, draft, GuardrailConfig::defaults()).labels();
}

std::string anchor(const std::string& quote, const std::string& draft) {
  return json(resolve_anchor(quote, Draft::make(draft, 1))).dump();
}

py::dict measure_text(const std::string& text) {
  MetricVector m = measure(text);
  py::dict d;
  d["length_words"] = m.length_words;
  d["specificity_chunks"] = m.specificity_chunks;
  d["sentiment"] = m.sentiment;
  return d;
}

py::tuple t_test(const std::vector<double>& a, const std::vector<double>& b) {
  TTestResult r = paired_t_test(a, b);
  return py::make_tuple(r.t, r.df, r.p);
}

std::string feedback(const std::string& essay, const std::string& context_json, const std::vector<std::string>& goals,
                     const std::string& transcript, std::uint64_t seed, bool baseline) {
  auto context = json::parse(context_json).get<AssignmentContext>();
  py::gil_scoped_release release;
  auto provider = offline_provider(transcript, seed);
  FeedbackPipeline pipeline(*provider);
  Session s = make_session("python", context, goals, essay);
  auto cards = baseline ? pipeline.baseline_feedback(s.context, goal_ptrs(s), *s.current_draft())
                        : pipeline.run_full_pipeline(s);
  return json(cards).dump();
}

std::string audit(const std::string& corpus_dir, const std::string& transcripts, int runs, const std::string& format,
                  std::uint64_t seed) {
  ReportFormat fmt = parse_report_format(format);
  if (runs < 1) throw PreconditionError("runs must be at least 1");
  py::gil_scoped_release release;
  auto corpus = load_corpus(corpus_dir);
  std::map<std::string, std::unique_ptr<Provider>> providers;
  std::map<std::string, std::unique_ptr<FeedbackPipeline>> pipelines;
  for (const auto& e : corpus) {
    fs::path p = transcripts.empty() ? fs::path() : fs::path(transcripts) / (e.id + ".jsonl");
    if (!transcripts.empty() && !fs::exists(p)) continue;  // excluded by the audit
    providers[e.id] = offline_provider(p.string(), seed);
    pipelines[e.id] = std::make_unique<FeedbackPipeline>(*providers[e.id]);
  }
  auto pipeline_for = [&](const CorpusEssay& e) -> FeedbackPipeline& {
    auto it = pipelines.find(e.id);
    if (it == pipelines.end()) throw ProviderError("no transcript for " + e.id);
    return *it->second;
  };
  Generator pipeline_gen = [&](const CorpusEssay& e, int) {
    Session s = make_session(e.id, e.context, e.goals, e.text);
    return pipeline_for(e).run_full_pipeline(s);
  };
  Generator baseline_gen = [&](const CorpusEssay& e, int) {
    Session s = make_session(e.id, e.context, e.goals, e.text);
    return pipeline_for(e).baseline_feedback(s.context, goal_ptrs(s), *s.current_draft());
  };
  AuditOptions opts;
  opts.runs_per_essay = runs;
  opts.prompts_hash = PromptLibrary::defaults().hash();
  return emit_report(run_audit(corpus, pipeline_gen, baseline_gen, opts), fmt);
}

}  // namespace

PYBIND11_MODULE(_writor, m) {
  m.doc() = "Writor core: guardrails, anchoring, text metrics, statistics and the offline pipeline";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_KeyError);
  py::register_exception<ProviderError>(m, "ProviderError", PyExc_RuntimeError);

  m.def("validate_card", &validate, py::arg("kind"), py::arg("text"), py::arg("draft"),
        py::arg("label") = py::none(), "Guardrail violation labels for one card");
  m.def("resolve_anchor", &anchor, py::arg("quote"), py::arg("draft"), "Anchor document as JSON text");
  m.def("measure", &measure_text, py::arg("text"));
  m.def("paired_t_test", &t_test, py::arg("a"), py::arg("b"), "(t, df, two-sided p)");
  m.def("feedback", &feedback, py::arg("essay"), py::arg("context_json"), py::arg("goals"),
        py::arg("transcript") = "", py::arg("seed") = 0, py::arg("baseline") = false,
        "Cards as JSON text; replays the transcript when given, else uses the scripted responder");
  m.def("audit", &audit, py::arg("corpus"), py::arg("transcripts") = "", py::arg("runs") = 3,
        py::arg("format") = "json", py::arg("seed") = 0);
  m.attr("metrics_data_hash") = metrics_data_hash();
}
