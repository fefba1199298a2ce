// Acceptance runner: one [PASS]/[FAIL] line per criterion, nonzero exit if
// any criterion fails. Usage: trawl_acceptance [--jobs N] [--keep DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "testing.hpp"
#include "trawl/curve.hpp"
#include "trawl/discover.hpp"
#include "trawl/error.hpp"
#include "trawl/eval.hpp"
#include "trawl/pipeline.hpp"
#include "trawl/synth.hpp"
#include "trawl/textprep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trawl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Synthetic corpus plus an opened run over it.
struct Workbench {
  fs::path root;
  SynthResult corpus;
  Run run;
};

Workbench make_workbench(const fs::path& root, const SynthConfig& sc, unsigned jobs,
                         const std::vector<std::string>& overrides = {}) {
  Workbench w;
  w.root = root;
  w.corpus = generate_corpus(sc, root / "corpus", jobs);
  const std::string cfg_text = default_config_json({{Century::C17, {"manifest.jsonl"}}});
  auto ov = overrides;
  ov.push_back("jobs=" + std::to_string(jobs));
  w.run = open_run_at(parse_run_config(cfg_text, root / "corpus", ov), root / "run");
  return w;
}

// ---------------------------------------------------------------------------

Outcome mnb_oracle() {
  const auto t0 = Clock::now();
  const auto s = oracle::mnb_sweep(5, 10, 3, 6, 200, 1);
  const double t = seconds_since(t0);
  return {s.max_error < 1e-9 && t < 10.0,
          fmt("max |P_model - P_bruteforce| = %.2e (< 1e-9) over %zu trained instances, %zu posteriors; %.1f s (< 10 s)",
              s.max_error, s.instances, s.queries, t)};
}

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto lg = oracle::check_linear_gradients(LinearLoss::Logistic, 101);
  const auto hg = oracle::check_linear_gradients(LinearLoss::Hinge, 202);
  const auto mg = oracle::check_mlp_gradients(303);
  const double t = seconds_since(t0);
  const double worst = std::max({lg.max_rel_error, hg.max_rel_error, mg.max_rel_error()});
  const bool points = lg.points == 20 && hg.points == 20 && mg.points == 20;
  return {worst < 1e-4 && points && t < 30.0,
          fmt("max rel error logistic %.1e, hinge %.1e, mlp w1 %.1e b1 %.1e w2 %.1e b2 %.1e (< 1e-4); 20 points each; "
              "%.1f s (< 30 s)",
              lg.max_rel_error, hg.max_rel_error, mg.max_rel_error_w1, mg.max_rel_error_b1, mg.max_rel_error_w2,
              mg.max_rel_error_b2, t)};
}

Outcome classification(const Workbench& w, double prep_seconds) {
  const auto t0 = Clock::now();
  stage_eval(w.run);
  const double t = prep_seconds + seconds_since(t0);
  const auto j = json::parse(testkit::read_file(w.run.dir / "eval/report.json"));
  const std::map<std::string, double> floor = {{"mlp", 0.95}, {"svm", 0.95}, {"mnb", 0.90}, {"logreg", 0.90}};
  bool ok = t < 180.0;
  std::string detail;
  std::set<std::string> seen;
  for (const auto& r : j["reports"]) {
    const std::string fam = r["family"];
    seen.insert(fam);
    double lo = 1, hi = 0;
    for (const auto& f : r["per_fold"]) {
      lo = std::min(lo, f["f1"].get<double>());
      hi = std::max(hi, f["f1"].get<double>());
    }
    const double vf1 = r["validation"]["f1"];
    ok = ok && vf1 >= floor.at(fam) && hi - lo < 0.05;
    detail += fmt("%s F1 %.3f (>= %.2f) spread %.3f; ", fam.c_str(), vf1, floor.at(fam), hi - lo);
  }
  ok = ok && seen.size() == 4;
  return {ok, detail + fmt("prep+eval %.0f s (< 180 s)", t)};
}

Outcome learning_curve_check(const Workbench& w) {
  const auto t0 = Clock::now();
  stage_curve(w.run);
  const double t = seconds_since(t0);
  const auto j = json::parse(testkit::read_file(w.run.dir / "curve/curve_17.json"));
  std::map<std::uint32_t, std::pair<double, double>> at;
  for (const auto& p : j["points"]) at[p["per_class_size"]] = {p["mean_f1"], p["variance"]};
  if (!at.count(5) || !at.count(30) || !at.count(50)) return {false, "curve lacks sizes 5, 30 or 50"};
  const bool ok = at[30].first >= 0.80 && at[5].second > at[50].second && t < 300.0;
  return {ok, fmt("%s: mean F1 @30 %.3f (>= 0.80); var @5 %.2e > var @50 %.2e; %.0f s (< 300 s)",
                  j["family"].get<std::string>().c_str(), at[30].first, at[5].second, at[50].second, t)};
}

Outcome tokenizer_golden() {
  const auto rows = oracle::load_tokenizer_golden(std::string(TRAWL_TEST_DATA) + "/tokenizer_golden.tsv");
  std::size_t mismatches = 0;
  std::string first;
  for (const auto& r : rows)
    if (tokenize(r.input).tokens != r.expected && mismatches++ == 0) first = r.input;
  return {rows.size() >= 30 && mismatches == 0,
          fmt("%zu pairs (>= 30), %zu mismatches%s%s", rows.size(), mismatches, first.empty() ? "" : ", first: ",
              first.c_str())};
}

Outcome eval_invariants(const Workbench& w) {
  const auto& cfg = w.run.cfg;
  const auto data = load_vectors(w.run, Century::C17, cfg.features_for(ModelFamily::Svm));
  const auto items = data.labeled_ids();
  std::map<std::string, Label> label;
  for (const auto& it : items) label[it.id] = it.label;
  bool ok = true;
  std::string detail;

  // split: per-class share within +-1 of ratio * n
  const auto plan = stratified_split(items, cfg.ratio, cfg.eval_seed);
  double worst_ratio = 0;
  for (Label c : {Label::NonTravelogue, Label::Travelogue}) {
    const double n = static_cast<double>(std::count_if(items.begin(), items.end(), [&](auto& i) { return i.label == c; }));
    const double tr = static_cast<double>(
        std::count_if(plan.train_ids.begin(), plan.train_ids.end(), [&](auto& id) { return label[id] == c; }));
    worst_ratio = std::max(worst_ratio, std::abs(tr - cfg.ratio * n));
  }
  ok = ok && worst_ratio <= 1.0;
  detail += fmt("split |n_train - ratio*n| <= %.2f; ", worst_ratio);

  // folds over the training split: disjoint test sets that cover it
  std::vector<LabeledId> train_items;
  for (const auto& id : plan.train_ids) train_items.push_back({id, label[id]});
  const auto folds = kfold(train_items, cfg.k, derive_seed(cfg.eval_seed, 1));
  std::map<std::string, int> hits;
  for (const auto& f : folds)
    for (const auto& id : f.test_ids) ++hits[id];
  bool cover = hits.size() == train_items.size();
  for (const auto& [id, n] : hits) cover = cover && n == 1;
  ok = ok && cover && folds.size() == 5;
  detail += fmt("%zu folds %s the %zu-doc training split; ", folds.size(), cover ? "partition" : "DO NOT partition",
                train_items.size());

  // every emitted confusion matrix re-derives its F1
  const auto j = json::parse(testkit::read_file(w.run.dir / "eval/report.json"));
  std::size_t checked = 0;
  double worst_f1 = 0;
  auto check = [&](const json& m) {
    const double tp = m["tp"], fp = m["fp"], fn = m["fn"];
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0, r = tp + fn > 0 ? tp / (tp + fn) : 0;
    const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0;
    worst_f1 = std::max(worst_f1, std::abs(f1 - m["f1"].get<double>()));
    ++checked;
  };
  for (const auto& r : j["reports"]) {
    for (const auto& f : r["per_fold"]) check(f);
    check(r["validation"]);
    check(r["baseline"]);
  }
  ok = ok && worst_f1 < 1e-12 && checked > 0;
  detail += fmt("F1 = 2PR/(P+R) on %zu matrices (max dev %.1e); ", checked, worst_f1);

  // coin-flip baseline on balanced labels
  std::vector<Label> balanced(200);
  for (std::size_t i = 0; i < balanced.size(); ++i) balanced[i] = i % 2 ? Label::Travelogue : Label::NonTravelogue;
  const auto b = random_baseline(balanced, derive_seed(cfg.eval_seed, 2), 1000);
  ok = ok && std::abs(b.f1 - 0.5) <= 0.02;
  detail += fmt("random baseline F1 %.4f (0.5 +- 0.02, 1000 trials)", b.f1);
  return {ok, detail};
}

/// Every regular file under `dir`, relative path -> bytes.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = testkit::read_file(e.path());
  return out;
}

Outcome determinism(const fs::path& root, unsigned jobs) {
  SynthConfig sc;
  sc.docs_per_class = 60;
  sc.tokens_per_doc = 600;
  sc.candidates = 150;
  sc.planted = 15;
  const std::vector<std::string> ov = {"curve.sizes=[5,10,20]", "curve.repeats=3", "discover.top_n=50"};
  std::map<std::string, std::string> snaps[2];
  const unsigned job_counts[2] = {1, std::max(2u, jobs)};
  for (int i = 0; i < 2; ++i) {
    const auto w = make_workbench(root / ("det" + std::to_string(i)), sc, job_counts[i], ov);
    for (auto* stage : {&stage_prep, &stage_train, &stage_eval, &stage_curve, &stage_rank, &stage_report})
      (*stage)(w.run);
    snaps[i] = snapshot(w.run.dir);
  }
  std::size_t differ = 0;
  std::string first;
  std::set<std::string> names;
  for (const auto& s : snaps)
    for (const auto& [k, v] : s) names.insert(k);
  for (const auto& k : names) {
    const auto a = snaps[0].find(k), b = snaps[1].find(k);
    if (a == snaps[0].end() || b == snaps[1].end() || a->second != b->second)
      if (differ++ == 0) first = k;
  }
  auto has = [&](const char* prefix) {
    return std::any_of(names.begin(), names.end(), [&](const auto& n) { return n.rfind(prefix, 0) == 0; });
  };
  const bool complete = has("eval/report.json") && has("models/") && has("rank/queue_");
  return {differ == 0 && complete,
          fmt("%zu artifacts (reports, models, rankings) compared across runs with jobs=%u and jobs=%u, %zu differ%s%s",
              names.size(), job_counts[0], job_counts[1], differ, first.empty() ? "" : ", first: ", first.c_str())};
}

Outcome ranking_invariance(const Workbench& w) {
  const Model model = load_model(w.run.model_path(ModelFamily::Svm, Century::C17));
  const auto freq = FrequencyTable::load_tsv(w.run.freq_path(Century::C17));
  const auto p = load_partition(w.run.cfg, Century::C17);
  Rng rng(17);
  auto cands = p.candidates;
  rng.shuffle(std::span(cands));
  cands.resize(std::min<std::size_t>(100, cands.size()));

  std::vector<RankedCandidate> by_margin, by_score;
  for (const auto& c : cands) {
    const auto x = vectorize_document(read_text(c.text_path), freq, model.meta.features, model.meta.min_count);
    by_margin.push_back({c.id, raw_decision(model, x)});
    by_score.push_back({c.id, predict_score(model, x).score});
  }
  assign_ranks(by_margin);
  assign_ranks(by_score);
  std::size_t moved = 0;
  for (std::size_t i = 0; i < by_margin.size(); ++i) moved += by_margin[i].doc_id != by_score[i].doc_id;
  return {moved == 0 && by_margin.size() == 100,
          fmt("%zu documents, %zu rank positions differ between raw margins and squashed scores", by_margin.size(), moved)};
}

Outcome discovery(const Workbench& w) {
  const auto t0 = Clock::now();
  stage_rank(w.run);
  const auto queue = load_queue(w.run.queue_path(Century::C17));
  std::set<std::string> planted;
  for (const auto& [id, l] : load_candidate_truth(w.corpus.truth))
    if (is_positive(l)) planted.insert(id);
  std::size_t hit = 0;
  for (const auto& r : queue.ranked) hit += planted.count(r.doc_id);
  const auto p = load_partition(w.run.cfg, Century::C17);
  return {hit >= 80 && queue.ranked.size() == 200 && p.candidates.size() == 1000 && planted.size() == 100,
          fmt("%zu of %zu planted positives in the top %zu of %zu candidates (>= 80), %s model; %.0f s", hit,
              planted.size(), queue.ranked.size(), p.candidates.size(),
              std::string(to_string(w.run.cfg.discover_family)).c_str(), seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string keep;
  app.add_option("-j,--jobs", jobs, "Worker threads for pipeline stages");
  app.add_option("--keep", keep, "Keep the work directory here instead of a temp dir");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<testkit::TempDir> tmp;
  fs::path root;
  if (keep.empty()) {
    tmp = std::make_unique<testkit::TempDir>("acceptance");
    root = tmp->path();
  } else {
    root = keep;
    fs::create_directories(root);
  }

  report("mnb_oracle", mnb_oracle);
  report("gradients", gradients);
  report("tokenizer_golden", tokenizer_golden);

  // Shared synthetic corpus: generator defaults (200 docs/class, ~2000 tokens,
  // 20% shared topic words, 5% noise, 1000 candidates with 100 planted).
  std::optional<Workbench> wb;
  double prep_seconds = 0;
  try {
    const auto t0 = Clock::now();
    wb = make_workbench(root / "main", SynthConfig{}, jobs);
    stage_prep(wb->run);
    prep_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "corpus setup failed: %s\n", e.what());
  }
  auto needs_corpus = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!wb) return {false, "synthetic corpus setup failed"};
      return fn();
    };
  };

  report("classification", needs_corpus([&] { return classification(*wb, prep_seconds); }));
  report("learning_curve", needs_corpus([&] { return learning_curve_check(*wb); }));
  report("eval_invariants", needs_corpus([&] { return eval_invariants(*wb); }));
  report("determinism", [&] { return determinism(root, jobs); });
  bool trained = false;
  if (wb) {
    try {
      stage_train(wb->run);
      trained = true;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "training failed: %s\n", e.what());
    }
  }
  report("ranking_invariance", needs_corpus([&]() -> Outcome {
           if (!trained) return {false, "training failed"};
           return ranking_invariance(*wb);
         }));
  report("discovery", needs_corpus([&]() -> Outcome {
           if (!trained) return {false, "training failed"};
           return discovery(*wb);
         }));

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
