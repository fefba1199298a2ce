#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trawl/config.hpp"
#include "trawl/corpus.hpp"
#include "trawl/eval.hpp"

namespace trawl {

/// A run directory bound to its config. Every stage reads and writes here.
struct Run {
  RunConfig cfg;
  std::string fingerprint;
  std::filesystem::path dir;

  std::filesystem::path freq_path(Century c) const;
  std::filesystem::path stats_path(Century c) const;
  std::filesystem::path vectors_path(Century c, const FeatureConfig& f) const;
  std::filesystem::path model_path(ModelFamily f, Century c) const;
  std::filesystem::path queue_path(Century c) const;
  std::filesystem::path annotation_log() const;
};

/// Computes the fingerprint, creates the run directory and records the
/// normalized config in it.
Run open_run(const RunConfig& cfg);
/// Same as open_run with an explicit directory (tests, tools).
Run open_run_at(const RunConfig& cfg, const std::filesystem::path& dir);

/// Documents of one century gathered from all of its manifests.
CorpusPartition load_partition(const RunConfig& cfg, Century c);

// Stage entry points. Each returns a one-line JSON summary.
std::string stage_prep(const Run& run);
std::string stage_train(const Run& run);
std::string stage_eval(const Run& run);
std::string stage_curve(const Run& run);
std::string stage_rank(const Run& run);
std::string stage_report(const Run& run);

/// Vector cache written by prep; MissingArtifact("prep") when absent.
LabeledSet load_vectors(const Run& run, Century c, const FeatureConfig& f);
void save_vectors(const std::filesystem::path& path, const LabeledSet& set);
LabeledSet read_vectors(const std::filesystem::path& path, const FeatureConfig& f);

}  // namespace trawl
