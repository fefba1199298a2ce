#include "trawl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "trawl/error.hpp"
#include "trawl/hash.hpp"
#include "trawl/parallel.hpp"
#include "trawl/rng.hpp"

namespace trawl {
using nlohmann::ordered_json;

namespace {

/// ids per class, input order: [0] negatives, [1] positives
std::array<std::vector<std::string>, 2> by_class(std::span<const LabeledId> items) {
  std::array<std::vector<std::string>, 2> out;
  for (const auto& it : items) out[is_positive(it.label) ? 1 : 0].push_back(it.id);
  return out;
}

}  // namespace

SplitPlan stratified_split(std::span<const LabeledId> items, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorCode::InvalidArgument, "ratio must be in (0, 1)");
  auto classes = by_class(items);
  if (classes[0].empty() || classes[1].empty())
    fail(ErrorCode::SingleClassInput, "stratified split needs both classes");

  SplitPlan plan;
  plan.ratio = ratio;
  plan.seed = seed;
  // positives first so plans read naturally
  for (std::size_t c : {std::size_t{1}, std::size_t{0}}) {
    auto& ids = classes[c];
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span(ids));
    const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(ids.size())));
    plan.train_ids.insert(plan.train_ids.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cut));
    plan.valid_ids.insert(plan.valid_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(cut), ids.end());
  }
  return plan;
}

std::vector<Fold> kfold(std::span<const LabeledId> items, std::uint32_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::InvalidArgument, "k must be >= 2");
  auto classes = by_class(items);
  for (std::size_t c : {std::size_t{1}, std::size_t{0}})
    if (classes[c].size() < k)
      fail(ErrorCode::TooFewExamples, std::string("class ") + std::string(to_string(static_cast<Label>(c))) +
                                          " has " + std::to_string(classes[c].size()) + " items, k = " +
                                          std::to_string(k));

  std::unordered_map<std::string, std::uint32_t> fold_of;
  std::size_t dealt = 0;
  for (std::size_t c : {std::size_t{1}, std::size_t{0}}) {
    auto ids = classes[c];
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span(ids));
    // continue dealing where the previous class stopped so total sizes stay within one
    for (const auto& id : ids) fold_of[id] = static_cast<std::uint32_t>(dealt++ % k);
  }

  std::vector<Fold> folds(k);
  for (const auto& it : items) {
    const std::uint32_t f = fold_of.at(it.id);
    for (std::uint32_t j = 0; j < k; ++j) (j == f ? folds[j].test_ids : folds[j].train_ids).push_back(it.id);
  }
  return folds;
}

Metrics Metrics::from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const double tp = static_cast<double>(c.tp);
  m.precision = (c.tp + c.fp) > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = (c.tp + c.fn) > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) fail(ErrorCode::LengthMismatch, "truth and predictions differ in length");
  if (truth.empty()) fail(ErrorCode::LengthMismatch, "no predictions");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = is_positive(truth[i]);
    const bool p = is_positive(predicted[i]);
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return Metrics::from_confusion(c);
}

Metrics random_baseline(std::span<const Label> truth, std::uint64_t seed, std::uint32_t trials) {
  if (trials == 0) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  Rng rng(seed);
  Confusion c;
  for (std::uint32_t t = 0; t < trials; ++t) {
    for (Label l : truth) {
      const bool p = rng.coin();
      const bool pos = is_positive(l);
      if (pos && p) ++c.tp;
      else if (!pos && p) ++c.fp;
      else if (pos && !p) ++c.fn;
      else ++c.tn;
    }
  }
  return Metrics::from_confusion(c);
}

std::vector<LabeledId> LabeledSet::labeled_ids() const {
  std::vector<LabeledId> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], y[i]});
  return out;
}

LabeledSet build_labeled_set(const CorpusPartition& p, const FrequencyTable& freq, const FeatureConfig& cfg,
                             std::uint64_t min_count, unsigned jobs) {
  std::vector<const DocumentRef*> docs;
  for (const auto& r : p.positives) docs.push_back(&r);
  for (const auto& r : p.negatives) docs.push_back(&r);
  LabeledSet s;
  s.ids.resize(docs.size());
  s.X.resize(docs.size());
  s.y.resize(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) {
    s.ids[i] = docs[i]->id;
    s.y[i] = docs[i]->label.value_or(Label::NonTravelogue);
    s.X[i] = vectorize_document(read_text(docs[i]->text_path), freq, cfg, min_count);
  });
  return s;
}

std::string experiment_fingerprint(const ExperimentConfig& cfg) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "family=" << to_string(cfg.family) << "|" << canonical_string(cfg.features) << "|"
     << canonical_string(cfg.train) << "|ratio=" << cfg.ratio << ";k=" << cfg.k << ";seed=" << cfg.seed
     << ";trials=" << cfg.baseline_trials;
  return to_hex(xxh64(ss.str()));
}

CvSummary summarize_folds(std::span<const Metrics> folds) {
  CvSummary s;
  if (folds.empty()) return s;
  double lo = folds.front().f1, hi = folds.front().f1;
  for (const auto& m : folds) {
    s.mean_precision += m.precision;
    s.mean_recall += m.recall;
    s.mean_f1 += m.f1;
    lo = std::min(lo, m.f1);
    hi = std::max(hi, m.f1);
  }
  const double n = static_cast<double>(folds.size());
  s.mean_precision /= n;
  s.mean_recall /= n;
  s.mean_f1 /= n;
  s.f1_spread = hi - lo;
  return s;
}

namespace {

struct Subset {
  std::vector<SparseVector> X;
  std::vector<Label> y;
};

Subset select(const LabeledSet& data, const std::unordered_map<std::string, std::size_t>& index,
              std::span<const std::string> ids) {
  Subset s;
  s.X.reserve(ids.size());
  s.y.reserve(ids.size());
  for (const auto& id : ids) {
    const std::size_t i = index.at(id);
    s.X.push_back(data.X[i]);
    s.y.push_back(data.y[i]);
  }
  return s;
}

Metrics train_and_score(const Subset& train, const Subset& test, const ExperimentConfig& cfg) {
  ModelMeta meta = cfg.meta;
  meta.features = cfg.features;
  const Model model = train_model(cfg.family, train.X, train.y, cfg.train, meta);
  std::vector<Label> pred;
  pred.reserve(test.X.size());
  for (const auto& x : test.X) pred.push_back(predict_score(model, x).label);
  return compute_metrics(test.y, pred);
}

}  // namespace

EvaluationReport run_experiment(const LabeledSet& data, Century century, const ExperimentConfig& cfg) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!index.emplace(data.ids[i], i).second) fail(ErrorCode::DuplicateId, "duplicate id '" + data.ids[i] + "'");

  const auto items = data.labeled_ids();
  const SplitPlan plan = stratified_split(items, cfg.ratio, cfg.seed);

  std::vector<LabeledId> train_items;
  for (const auto& id : plan.train_ids) train_items.push_back({id, data.y[index.at(id)]});
  const auto folds = kfold(train_items, cfg.k, derive_seed(cfg.seed, 1));

  EvaluationReport r;
  r.century = century;
  r.family = cfg.family;
  r.config = cfg;
  r.config_fingerprint = experiment_fingerprint(cfg);
  r.train_size = plan.train_ids.size();
  r.valid_size = plan.valid_ids.size();

  r.per_fold.resize(folds.size());
  parallel_for(folds.size(), cfg.jobs, [&](std::size_t f) {
    r.per_fold[f] = train_and_score(select(data, index, folds[f].train_ids),
                                    select(data, index, folds[f].test_ids), cfg);
  });
  r.cv = summarize_folds(r.per_fold);

  const Subset valid = select(data, index, plan.valid_ids);
  r.validation = train_and_score(select(data, index, plan.train_ids), valid, cfg);
  r.baseline = random_baseline(valid.y, derive_seed(cfg.seed, 2), cfg.baseline_trials);
  return r;
}

namespace {

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["tp"] = m.confusion.tp;
  j["fp"] = m.confusion.fp;
  j["fn"] = m.confusion.fn;
  j["tn"] = m.confusion.tn;
  return j;
}

ordered_json train_config_json(const TrainConfig& c) {
  ordered_json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["l2"] = c.l2;
  j["seed"] = c.seed;
  j["hidden_units"] = c.hidden_units;
  j["early_stop_patience"] = c.early_stop_patience ? ordered_json(*c.early_stop_patience) : ordered_json(nullptr);
  j["alpha"] = c.alpha;
  return j;
}

ordered_json feature_config_json(const FeatureConfig& c) {
  ordered_json j;
  j["ngram_min"] = c.ngram_min;
  j["ngram_max"] = c.ngram_max;
  j["hash_dim"] = c.hash_dim;
  j["signed"] = c.signed_hash;
  j["normalize"] = c.normalize == Normalize::L2 ? "l2" : "none";
  j["weighting"] = c.weighting == Weighting::Binary ? "binary" : "count";
  j["hash"] = std::string(kFeatureHashId);
  return j;
}

}  // namespace

std::string report_json(std::span<const EvaluationReport> reports, const std::string& run_fingerprint) {
  ordered_json root;
  root["config_fingerprint"] = run_fingerprint;
  root["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["century"] = century_number(r.century);
    j["family"] = std::string(to_string(r.family));
    j["experiment_fingerprint"] = r.config_fingerprint;
    j["train_size"] = r.train_size;
    j["valid_size"] = r.valid_size;
    j["ratio"] = r.config.ratio;
    j["k"] = r.config.k;
    j["seed"] = r.config.seed;
    j["baseline_trials"] = r.config.baseline_trials;
    j["features"] = feature_config_json(r.config.features);
    j["train"] = train_config_json(r.config.train);
    j["per_fold"] = ordered_json::array();
    for (const auto& m : r.per_fold) j["per_fold"].push_back(metrics_json(m));
    ordered_json cv;
    cv["mean_precision"] = r.cv.mean_precision;
    cv["mean_recall"] = r.cv.mean_recall;
    cv["mean_f1"] = r.cv.mean_f1;
    cv["f1_spread"] = r.cv.f1_spread;
    j["cv"] = cv;
    j["validation"] = metrics_json(r.validation);
    j["baseline"] = metrics_json(r.baseline);
    root["reports"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

std::string report_table(std::span<const EvaluationReport> reports, bool validation) {
  std::map<int, std::map<ModelFamily, const EvaluationReport*>> grid;
  std::vector<ModelFamily> families;
  for (const auto& r : reports) {
    grid[century_number(r.century)][r.family] = &r;
    if (std::find(families.begin(), families.end(), r.family) == families.end()) families.push_back(r.family);
  }
  std::sort(families.begin(), families.end());

  std::ostringstream out;
  char buf[64];
  out << (validation ? "Validation split" : "Cross-validation mean") << " (P / R / F1)\n";
  out << "Century ";
  for (auto f : families) {
    std::snprintf(buf, sizeof buf, "| %-18s", std::string(display_name(f)).c_str());
    out << buf;
  }
  out << "| Random\n";
  for (const auto& [century, row] : grid) {
    std::snprintf(buf, sizeof buf, "%-8s", (std::to_string(century) + "th").c_str());
    out << buf;
    const EvaluationReport* any = nullptr;
    for (auto f : families) {
      auto it = row.find(f);
      if (it == row.end()) {
        std::snprintf(buf, sizeof buf, "| %-18s", "-");
      } else {
        any = it->second;
        const auto& r = *it->second;
        const double p = validation ? r.validation.precision : r.cv.mean_precision;
        const double rc = validation ? r.validation.recall : r.cv.mean_recall;
        const double f1 = validation ? r.validation.f1 : r.cv.mean_f1;
        std::snprintf(buf, sizeof buf, "| %.2f  %.2f  %.2f  ", p, rc, f1);
      }
      out << buf;
    }
    if (any) {
      std::snprintf(buf, sizeof buf, "| %.2f  %.2f  %.2f", any->baseline.precision, any->baseline.recall,
                    any->baseline.f1);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace trawl
