// writor command-line entry point: serve, feedback, audit, record.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 provider failure.
// Errors are written to stderr as one JSON line.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "writor/audit.hpp"
#include "writor/config.hpp"
#include "writor/errors.hpp"
#include "writor/http_server.hpp"
#include "writor/scripted.hpp"
#include "writor/serialize.hpp"
#include "writor/service.hpp"
#include "writor/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace writor;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path);
  out << content;
}

AppConfig load_config(const std::string& path) {
  if (path.empty()) {
    AppConfig c;
    c.apply_env_overrides();
    return c;
  }
  return AppConfig::load(path);
}

// Replay must never reach the network, whatever the config says.
void forbid_network() { ::setenv("WRITOR_OFFLINE", "1", 1); }

struct CardsView {
  static std::string markdown(const std::vector<FeedbackCard>& cards) {
    std::ostringstream out;
    for (const auto& c : cards) {
      out << "## " << (c.kind == CardKind::critique ? "Critique" : "Praise");
      if (c.hoc_label) out << ": " << *c.hoc_label;
      out << "\n\n";
      if (!c.anchor.quoted_sentence.empty()) out << "> " << c.anchor.quoted_sentence << "\n\n";
      out << c.feedback_text << "\n\n";
      if (!c.violation_flags.empty()) {
        out << "Flags:";
        for (const auto& f : c.violation_flags) out << " " << f;
        out << "\n\n";
      }
    }
    return out.str();
  }
};

// --- feedback ------------------------------------------------------------

struct FeedbackArgs {
  std::string essay;
  std::string context;
  std::vector<std::string> goals;
  std::string mode = "replay";
  std::string transcript;
  std::string out;
  std::string format = "json";
  std::string config;
  std::uint64_t seed = 0;
};

int run_feedback(const FeedbackArgs& a) {
  AppConfig cfg = load_config(a.config);
  cfg.provider.mode = parse_provider_mode(a.mode);
  if (!a.transcript.empty()) cfg.provider.transcript = a.transcript;
  if (cfg.provider.mode == ProviderMode::replay) forbid_network();
  if (a.format != "json" && a.format != "markdown") throw PreconditionError("format must be json or markdown");

  Session session;
  session.id = "cli";
  session.created_at = now();
  json ctx_doc = json::parse(read_text(a.context));
  session.context = ctx_doc.get<AssignmentContext>();
  std::vector<std::string> goals = a.goals;
  if (goals.empty()) goals = ctx_doc.value("goals", std::vector<std::string>{});
  if (goals.empty()) throw PreconditionError("no goals: pass --goals or list them in the context file");
  for (const auto& text : goals) {
    Goal g;
    g.id = session.next_id("g");
    g.text = text;
    g.origin = GoalOrigin::custom;
    g.selected = true;
    session.goals.push_back(std::move(g));
  }
  session.drafts.push_back(Draft::make(read_text(a.essay), 1));

  std::unique_ptr<ScriptedResponder> scripted;
  std::unique_ptr<ProviderStack> stack;
  Provider* provider;
  if (cfg.provider.mode == ProviderMode::mock) {
    scripted = std::make_unique<ScriptedResponder>(a.seed, cfg.prompts());
    provider = scripted.get();
  } else {
    stack = std::make_unique<ProviderStack>(cfg.provider);
    provider = &stack->provider();
  }
  FeedbackPipeline pipeline(*provider, cfg.prompts(), cfg.guardrails(), cfg.pipeline_options());
  auto cards = pipeline.run_full_pipeline(session);
  if (stack) stack->flush();

  if (a.format == "markdown") {
    write_output(a.out, CardsView::markdown(cards));
  } else {
    json doc{{"essay", fs::path(a.essay).filename().string()},
             {"draft_version", 1},
             {"cards", cards},
             {"network_requests", network_request_count()}};
    write_output(a.out, doc.dump(2) + "\n");
  }
  return 0;
}

// --- audit / record ------------------------------------------------------

struct AuditArgs {
  std::string corpus;
  int runs = 3;
  std::string mode = "replay";
  std::string transcripts;
  std::string format = "markdown";
  std::string out;
  std::string coding_sheet;
  std::string config;
  std::size_t parallel = 1;
  std::uint64_t seed = 0;
};

// One provider and pipeline per essay so transcripts stay per-essay.
class EssayProviders {
 public:
  EssayProviders(const AppConfig& cfg, ProviderMode mode, std::string transcripts, std::uint64_t seed)
      : cfg_(cfg), mode_(mode), transcripts_(std::move(transcripts)), seed_(seed) {
    if ((mode_ == ProviderMode::replay || mode_ == ProviderMode::record) && transcripts_.empty()) {
      throw PreconditionError("--transcripts DIR is required in replay and record modes");
    }
    if (mode_ == ProviderMode::live || mode_ == ProviderMode::record) live_ = std::make_unique<HttpProvider>(cfg_.provider.http);
  }

  void prepare(const std::vector<CorpusEssay>& corpus) {
    for (const auto& e : corpus) {
      Slot& s = slots_[e.id];
      switch (mode_) {
        case ProviderMode::replay: {
          fs::path p = fs::path(transcripts_) / (e.id + ".jsonl");
          if (!fs::exists(p)) {
            // The run for this essay fails and the audit lists it as excluded.
            s.missing = "no transcript " + p.string();
            break;
          }
          s.base = std::make_unique<ReplayProvider>(Transcript::load(p.string()));
          break;
        }
        case ProviderMode::record:
          s.recorder = std::make_unique<RecordingProvider>(*live_);
          break;
        case ProviderMode::mock:
          s.base = std::make_unique<ScriptedResponder>(seed_, cfg_.prompts());
          break;
        case ProviderMode::live:
          break;
      }
      Provider& p = s.recorder ? static_cast<Provider&>(*s.recorder)
                    : s.base   ? *s.base
                    : live_    ? static_cast<Provider&>(*live_)
                               : missing_;
      s.pipeline = std::make_unique<FeedbackPipeline>(p, cfg_.prompts(), cfg_.guardrails(), cfg_.pipeline_options());
    }
  }

  FeedbackPipeline& pipeline(const std::string& id) {
    Slot& s = slots_.at(id);
    if (s.missing) throw PreconditionError(*s.missing);
    return *s.pipeline;
  }

  void save() const {
    if (mode_ != ProviderMode::record) return;
    fs::create_directories(transcripts_);
    for (const auto& [id, s] : slots_) s.recorder->transcript().save((fs::path(transcripts_) / (id + ".jsonl")).string());
  }

 private:
  struct NoProvider : Provider {
    std::string complete(const PromptRequest&) override { throw ProviderError("no provider"); }
  };
  struct Slot {
    std::unique_ptr<Provider> base;
    std::unique_ptr<RecordingProvider> recorder;
    std::unique_ptr<FeedbackPipeline> pipeline;
    std::optional<std::string> missing;
  };

  const AppConfig& cfg_;
  ProviderMode mode_;
  std::string transcripts_;
  std::uint64_t seed_;
  std::unique_ptr<HttpProvider> live_;
  NoProvider missing_;
  std::map<std::string, Slot> slots_;
};

std::vector<const Goal*> goal_ptrs(const std::vector<Goal>& goals) {
  std::vector<const Goal*> out;
  for (const auto& g : goals) out.push_back(&g);
  return out;
}

Session essay_session(const CorpusEssay& e) {
  Session s;
  s.id = e.id;
  s.context = e.context;
  for (const auto& text : e.goals) {
    Goal g;
    g.id = s.next_id("g");
    g.text = text;
    g.origin = GoalOrigin::custom;
    g.selected = true;
    s.goals.push_back(std::move(g));
  }
  s.drafts.push_back(Draft::make(e.text, 1));
  return s;
}

AuditReport audit_corpus(const AuditArgs& a, const AppConfig& cfg, const std::vector<CorpusEssay>& corpus,
                         EssayProviders& providers) {
  providers.prepare(corpus);
  Generator pipeline_gen = [&](const CorpusEssay& e, int) {
    Session s = essay_session(e);
    return providers.pipeline(e.id).run_full_pipeline(s);
  };
  Generator baseline_gen = [&](const CorpusEssay& e, int) {
    Session s = essay_session(e);
    return providers.pipeline(e.id).baseline_feedback(s.context, goal_ptrs(s.goals), *s.current_draft());
  };
  AuditOptions opts;
  opts.runs_per_essay = a.runs;
  opts.guardrails = cfg.guardrails();
  opts.prompts_hash = cfg.prompts().hash();
  opts.max_parallel_essays = a.parallel;
  return run_audit(corpus, pipeline_gen, baseline_gen, opts);
}

int run_audit_cmd(const AuditArgs& a) {
  AppConfig cfg = load_config(a.config);
  ProviderMode mode = parse_provider_mode(a.mode);
  if (mode == ProviderMode::replay) forbid_network();
  ReportFormat format = parse_report_format(a.format);
  auto corpus = load_corpus(a.corpus);
  if (a.runs < 1) throw PreconditionError("--runs must be at least 1");
  EssayProviders providers(cfg, mode, a.transcripts, a.seed);
  AuditReport report = audit_corpus(a, cfg, corpus, providers);
  providers.save();
  write_output(a.out, emit_report(report, format));
  if (!a.coding_sheet.empty()) write_output(a.coding_sheet, emit_coding_sheet(report));
  return 0;
}

int run_record(const AuditArgs& a, const std::string& source) {
  AppConfig cfg = load_config(a.config);
  ProviderMode mode = source == "mock" ? ProviderMode::mock : ProviderMode::record;
  if (source != "mock" && source != "live") throw PreconditionError("--source must be live or mock");
  auto corpus = load_corpus(a.corpus);
  if (a.runs < 1) throw PreconditionError("--runs must be at least 1");

  if (mode == ProviderMode::mock) {
    // Scripted replies, recorded exactly as a live capture would be.
    std::map<std::string, std::unique_ptr<ScriptedResponder>> responders;
    std::map<std::string, std::unique_ptr<RecordingProvider>> recorders;
    std::map<std::string, std::unique_ptr<FeedbackPipeline>> pipelines;
    for (const auto& e : corpus) {
      responders[e.id] = std::make_unique<ScriptedResponder>(a.seed, cfg.prompts());
      recorders[e.id] = std::make_unique<RecordingProvider>(*responders[e.id]);
      pipelines[e.id] =
          std::make_unique<FeedbackPipeline>(*recorders[e.id], cfg.prompts(), cfg.guardrails(), cfg.pipeline_options());
    }
    Generator pipeline_gen = [&](const CorpusEssay& e, int) {
      Session s = essay_session(e);
      return pipelines.at(e.id)->run_full_pipeline(s);
    };
    Generator baseline_gen = [&](const CorpusEssay& e, int) {
      Session s = essay_session(e);
      return pipelines.at(e.id)->baseline_feedback(s.context, goal_ptrs(s.goals), *s.current_draft());
    };
    AuditOptions opts;
    opts.runs_per_essay = a.runs;
    opts.guardrails = cfg.guardrails();
    AuditReport report = run_audit(corpus, pipeline_gen, baseline_gen, opts);
    fs::create_directories(a.transcripts);
    for (const auto& [id, rec] : recorders) rec->transcript().save((fs::path(a.transcripts) / (id + ".jsonl")).string());
    std::cerr << json{{"recorded", recorders.size()}, {"excluded", report.excluded.size()}}.dump() << "\n";
    return report.excluded.empty() ? 0 : 2;
  }

  EssayProviders providers(cfg, mode, a.transcripts, a.seed);
  AuditReport report = audit_corpus(a, cfg, corpus, providers);
  providers.save();
  std::cerr << json{{"recorded", report.essays.size()}, {"excluded", report.excluded.size()}}.dump() << "\n";
  return report.excluded.empty() ? 0 : 2;
}

// --- serve ---------------------------------------------------------------

int run_serve(const std::string& config_path) {
  AppConfig cfg = load_config(config_path);
  if (cfg.provider.mode == ProviderMode::replay) forbid_network();

  // Signals are handled on a dedicated thread so stop() never runs inside
  // a signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<ScriptedResponder> scripted;
  std::unique_ptr<ProviderStack> stack;
  Provider* base;
  if (cfg.provider.mode == ProviderMode::mock) {
    scripted = std::make_unique<ScriptedResponder>(0, cfg.prompts());
    base = scripted.get();
  } else {
    stack = std::make_unique<ProviderStack>(cfg.provider);
    base = &stack->provider();
  }
  ConcurrencyLimitedProvider limited(*base, cfg.max_concurrent_provider_calls);
  FeedbackPipeline pipeline(limited, cfg.prompts(), cfg.guardrails(), cfg.pipeline_options());
  FileSessionStore store(cfg.store_path);
  SessionService service(store, pipeline);

  HttpServerOptions opts;
  opts.host = cfg.host;
  opts.port = cfg.port;
  opts.cors_origin = cfg.cors_origin;
  if (!cfg.auth_token_env.empty()) {
    const char* token = std::getenv(cfg.auth_token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw PreconditionError("auth_token_env is set but " + cfg.auth_token_env + " is empty");
    }
    opts.bearer_token = token;
  }
  HttpServer server(service, opts);
  int port = server.bind();
  std::cerr << json{{"listening", cfg.host + ":" + std::to_string(port)},
                    {"provider_mode", cfg.provider.mode == ProviderMode::live     ? "live"
                                      : cfg.provider.mode == ProviderMode::replay ? "replay"
                                      : cfg.provider.mode == ProviderMode::record ? "record"
                                                                                  : "mock"}}
                   .dump()
            << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  if (stack) stack->flush();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int report_error(const std::exception& e) {
  ApiError err = api_error_from(e);
  std::cerr << json{{"error", err.to_json()}}.dump() << std::endl;
  return err.code == ApiErrorCode::provider_unavailable ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"writor: goal-aligned, non-directive writing feedback"};
  app.require_subcommand(1);

  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", serve_config, "Config file (JSON)")->required();

  FeedbackArgs fb;
  auto* feedback = app.add_subcommand("feedback", "Run the feedback pipeline once on an essay");
  feedback->add_option("essay", fb.essay, "Essay text file")->required();
  feedback->add_option("--context", fb.context, "Context JSON (reader_description, assignment_prompt, "
                                                "edit_expectations, optional goals)")
      ->required();
  feedback->add_option("--goals", fb.goals, "Selected goals; overrides the context file's list");
  feedback->add_option("--mode", fb.mode, "live, replay, record or mock")->capture_default_str();
  feedback->add_option("--transcript", fb.transcript, "Transcript to replay from or record to");
  feedback->add_option("--out", fb.out, "Output file (default stdout)");
  feedback->add_option("--format", fb.format, "json or markdown")->capture_default_str();
  feedback->add_option("--config", fb.config, "Config file (JSON)");
  feedback->add_option("--seed", fb.seed, "Seed for mock mode");

  AuditArgs au;
  auto* audit = app.add_subcommand("audit", "Compare the pipeline with the single-prompt baseline over a corpus");
  audit->add_option("corpus", au.corpus, "Directory of essays (*.txt + *.context.json)")->required();
  audit->add_option("--runs", au.runs, "Runs per essay")->capture_default_str();
  audit->add_option("--mode", au.mode, "live, replay, record or mock")->capture_default_str();
  audit->add_option("--transcripts", au.transcripts, "Per-essay transcript directory");
  audit->add_option("--format", au.format, "json, markdown or csv")->capture_default_str();
  audit->add_option("--out", au.out, "Report file (default stdout)");
  audit->add_option("--coding-sheet", au.coding_sheet, "Also write a CSV sheet for manual review");
  audit->add_option("--config", au.config, "Config file (JSON)");
  audit->add_option("--parallel", au.parallel, "Essays generated concurrently")->capture_default_str();
  audit->add_option("--seed", au.seed, "Seed for mock mode");

  AuditArgs rec;
  std::string source = "live";
  auto* record = app.add_subcommand("record", "Capture per-essay transcripts for later replay");
  record->add_option("corpus", rec.corpus, "Directory of essays")->required();
  record->add_option("--out", rec.transcripts, "Transcript directory")->required();
  record->add_option("--runs", rec.runs, "Runs per essay")->capture_default_str();
  record->add_option("--source", source, "live, or mock for scripted offline replies")->capture_default_str();
  record->add_option("--config", rec.config, "Config file (JSON)");
  record->add_option("--seed", rec.seed, "Seed for mock replies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*serve) return run_serve(serve_config);
    if (*feedback) return run_feedback(fb);
    if (*audit) return run_audit_cmd(au);
    if (*record) return run_record(rec, source);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return 1;
}
