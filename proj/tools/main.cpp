// trawl: command line driver for the genre-classification pipeline.

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "trawl/annotate.hpp"
#include "trawl/config.hpp"
#include "trawl/error.hpp"
#include "trawl/pipeline.hpp"
#include "trawl/synth.hpp"

namespace {

using trawl::ErrorCode;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::MissingArtifact: return 3;
    default: return 4;
  }
}

void print_error(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["status"] = "error";
  j["error_code"] = code;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  int jobs = -1;

  trawl::RunConfig load() const {
    auto ov = overrides;
    if (jobs >= 0) ov.push_back("jobs=" + std::to_string(jobs));
    return trawl::load_run_config(config, ov);
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--set", c.overrides, "Override one key, e.g. --set eval.k=10")->take_all();
  sub->add_option("-j,--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

int serve(const trawl::Run& run, int port_override) {
  trawl::ServiceOptions opts;
  for (auto c : run.cfg.centuries()) {
    if (!std::filesystem::exists(run.queue_path(c))) continue;
    opts.queues[c] = run.queue_path(c);
    const auto p = trawl::load_partition(run.cfg, c);
    opts.documents.insert(opts.documents.end(), p.candidates.begin(), p.candidates.end());
  }
  if (opts.queues.empty()) trawl::fail(ErrorCode::MissingArtifact, "rank: no review queue in " + run.dir.string());
  opts.annotation_log = run.annotation_log();
  opts.round = run.cfg.round;
  opts.excerpt_chars = run.cfg.excerpt_chars;

  // handle SIGINT/SIGTERM on a dedicated thread
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  trawl::AnnotationService service(std::move(opts));
  trawl::AnnotationServer server(service, run.cfg.ui_dir);
  const int port = server.bind(run.cfg.bind, port_override >= 0 ? port_override : run.cfg.port);
  if (port < 0) trawl::fail(ErrorCode::Io, "cannot bind " + run.cfg.bind);

  nlohmann::ordered_json j;
  j["stage"] = "serve";
  j["status"] = "listening";
  j["fingerprint"] = run.fingerprint;
  j["bind"] = run.cfg.bind;
  j["port"] = port;
  j["annotation_log"] = run.annotation_log().string();
  std::cout << j.dump() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  const bool ok = server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genre classification toolkit for historical corpora"};
  app.require_subcommand(1);

  Common common;
  const std::pair<const char*, const char*> stages[] = {
      {"prep", "Tokenize, build frequency tables and feature caches"},
      {"train", "Train every configured model on the full ground truth"},
      {"eval", "Split, cross-validate and score every model family"},
      {"curve", "Learning curve over ground-truth sizes"},
      {"rank", "Score candidates and export review queues"},
      {"report", "Render curve plots and discovery summaries"},
  };
  std::map<std::string, CLI::App*> stage_cmds;
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    stage_cmds[name] = sub;
  }

  auto* serve_cmd = app.add_subcommand("serve", "Run the review service");
  add_common(serve_cmd, common);
  int port = -1;
  serve_cmd->add_option("--port", port, "Port (0 = pick a free one)")->check(CLI::Range(0, 65535));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-topic corpus");
  trawl::SynthConfig sc;
  std::string out_dir;
  std::vector<int> centuries{17};
  int synth_jobs = 1;
  synth_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", sc.seed, "Generator seed");
  synth_cmd->add_option("--centuries", centuries, "Centuries to generate")->check(CLI::Range(16, 19));
  synth_cmd->add_option("--docs-per-class", sc.docs_per_class, "Labeled documents per class");
  synth_cmd->add_option("--tokens", sc.tokens_per_doc, "Mean tokens per document");
  synth_cmd->add_option("--shared", sc.shared_fraction, "Fraction of topic words shared by both classes");
  synth_cmd->add_option("--noise", sc.noise_rate, "OCR noise token rate");
  synth_cmd->add_option("--background", sc.background_rate, "Background vocabulary token rate");
  synth_cmd->add_option("--subtopics", sc.subtopics, "Topic slices per class");
  synth_cmd->add_option("--candidates", sc.candidates, "Unlabeled candidates per century");
  synth_cmd->add_option("--planted", sc.planted, "Positives hidden among the candidates");
  synth_cmd->add_option("-j,--jobs", synth_jobs, "Worker threads")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      sc.centuries.clear();
      for (int c : centuries) sc.centuries.push_back(*trawl::century_from_number(c));
      const auto res = trawl::generate_corpus(sc, out_dir, static_cast<unsigned>(synth_jobs));
      std::map<trawl::Century, std::vector<std::string>> manifests;
      for (auto c : sc.centuries) manifests[c] = {"manifest.jsonl"};
      const auto cfg_path = std::filesystem::path(out_dir) / "config.json";
      std::ofstream(cfg_path) << trawl::default_config_json(manifests);
      nlohmann::ordered_json j;
      j["stage"] = "synth";
      j["status"] = "ok";
      j["manifest"] = res.manifest.string();
      j["truth"] = res.truth.string();
      j["config"] = cfg_path.string();
      j["documents"] = res.documents;
      std::cout << j.dump() << std::endl;
      return 0;
    }

    const trawl::RunConfig cfg = common.load();
    const trawl::Run run = trawl::open_run(cfg);
    if (serve_cmd->parsed()) return serve(run, port);

    std::string summary;
    if (stage_cmds["prep"]->parsed()) summary = trawl::stage_prep(run);
    else if (stage_cmds["train"]->parsed()) summary = trawl::stage_train(run);
    else if (stage_cmds["eval"]->parsed()) summary = trawl::stage_eval(run);
    else if (stage_cmds["curve"]->parsed()) summary = trawl::stage_curve(run);
    else if (stage_cmds["rank"]->parsed()) summary = trawl::stage_rank(run);
    else if (stage_cmds["report"]->parsed()) summary = trawl::stage_report(run);
    std::cout << summary << std::endl;
    return 0;
  } catch (const trawl::Error& e) {
    print_error(std::string(trawl::to_string(e.code())), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return 4;
  }
}
