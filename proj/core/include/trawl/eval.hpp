#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trawl/corpus.hpp"
#include "trawl/features.hpp"
#include "trawl/models.hpp"
#include "trawl/textprep.hpp"

namespace trawl {

struct LabeledId {
  std::string id;
  Label label;
};

struct SplitPlan {
  std::vector<std::string> train_ids;
  std::vector<std::string> valid_ids;
  double ratio = 0.75;
  std::uint64_t seed = 0;
};

/// Per-class shuffle, then per-class cut: the training side takes
/// floor(ratio * n_class), the remainder goes to validation.
SplitPlan stratified_split(std::span<const LabeledId> items, double ratio, std::uint64_t seed);

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

/// Stratified k folds; fold sizes differ by at most one and every id is in
/// exactly one test fold.
std::vector<Fold> kfold(std::span<const LabeledId> items, std::uint32_t k, std::uint64_t seed);

struct Confusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool operator==(const Confusion&) const = default;
};

/// Precision and recall are 0 when their denominator is 0; F1 is 0 when
/// P + R is 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;

  static Metrics from_confusion(const Confusion& c);
};

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// Uniform coin-flip predictions over `trials` rounds; confusion counts are
/// pooled across trials and P/R/F1 derive from the pooled counts.
Metrics random_baseline(std::span<const Label> truth, std::uint64_t seed, std::uint32_t trials = 1000);

/// Vectorized labeled documents, parallel arrays.
struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<SparseVector> X;
  std::vector<Label> y;

  std::size_t size() const { return ids.size(); }
  std::vector<LabeledId> labeled_ids() const;
};

/// Reads and vectorizes the partition's positives and negatives.
LabeledSet build_labeled_set(const CorpusPartition& p, const FrequencyTable& freq,
                             const FeatureConfig& cfg, std::uint64_t min_count = 2, unsigned jobs = 1);

struct ExperimentConfig {
  ModelFamily family = ModelFamily::Mlp;
  FeatureConfig features;
  TrainConfig train;
  double ratio = 0.75;
  std::uint32_t k = 5;
  std::uint64_t seed = 0;
  std::uint32_t baseline_trials = 1000;
  unsigned jobs = 1;
  ModelMeta meta;  // features are copied from `features`
};

/// Hash of the feature config, train config, protocol settings and seeds.
std::string experiment_fingerprint(const ExperimentConfig& cfg);

struct CvSummary {
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double f1_spread = 0.0;  // max - min over folds
};

struct EvaluationReport {
  Century century = Century::C16;
  ModelFamily family = ModelFamily::Mlp;
  std::vector<Metrics> per_fold;
  CvSummary cv;
  Metrics validation;
  Metrics baseline;
  std::string config_fingerprint;
  ExperimentConfig config;
  std::size_t train_size = 0;
  std::size_t valid_size = 0;
};

CvSummary summarize_folds(std::span<const Metrics> folds);

/// Split, k-fold CV on the training split, retrain on the full training
/// split, score the validation split, and the random baseline on it.
EvaluationReport run_experiment(const LabeledSet& data, Century century, const ExperimentConfig& cfg);

std::string report_json(std::span<const EvaluationReport> reports, const std::string& run_fingerprint);
/// Plain-text P/R/F1 table, one row per century, one column group per family.
std::string report_table(std::span<const EvaluationReport> reports, bool validation = true);

}  // namespace trawl
