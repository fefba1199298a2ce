#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trawl/features.hpp"
#include "trawl/models.hpp"
#include "trawl/types.hpp"

namespace trawl {

enum class FreqReference : std::uint8_t { Corpus, Training };

/// One run's settings, read from a JSON file (see README for the key tree).
struct RunConfig {
  std::filesystem::path config_path;  // empty when built in memory

  // corpus: manifests per century, resolved against the config's directory
  std::map<Century, std::vector<std::filesystem::path>> manifests;

  // textprep
  std::uint64_t min_count = 2;
  FreqReference reference = FreqReference::Corpus;

  // features
  std::uint32_t ngram_min = 1;
  std::uint32_t ngram_max = 2;
  std::uint32_t hash_dim = 1u << 20;
  std::uint32_t mlp_hash_dim = 1u << 16;

  std::map<ModelFamily, TrainConfig> train;

  // eval
  double ratio = 0.75;
  std::uint32_t k = 5;
  std::uint64_t eval_seed = 0;
  std::uint32_t baseline_trials = 1000;
  std::vector<ModelFamily> families{kAllFamilies.begin(), kAllFamilies.end()};

  // curve
  std::vector<std::uint32_t> curve_sizes;
  bool curve_extended = false;
  std::uint32_t curve_repeats = 5;
  ModelFamily curve_family = ModelFamily::Mlp;
  std::uint64_t curve_seed = 0;

  // discover
  ModelFamily discover_family = ModelFamily::Mlp;
  std::size_t top_n = 200;

  // service
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::filesystem::path annotation_log;  // empty: <run dir>/annotations.jsonl
  std::int64_t round = 0;
  std::size_t excerpt_chars = 4000;
  std::filesystem::path ui_dir;

  unsigned jobs = 1;

  /// Normalized JSON of every setting except `jobs` and `service`.
  std::string canonical_json;

  std::vector<Century> centuries() const;
  /// Signed profile at hash_dim (linear), signed at mlp_hash_dim (MLP),
  /// unsigned counts at hash_dim (MNB).
  FeatureConfig features_for(ModelFamily f) const;
  TrainConfig train_for(ModelFamily f) const;
  std::vector<std::uint32_t> sizes() const;  // curve sizes incl. the extended one
};

/// Parses a config document; `base_dir` resolves relative paths. Each
/// override is `dotted.key=value`, where value is JSON or a bare string.
/// Unknown keys and bad values raise ConfigError.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Default config as JSON text with the given per-century manifests.
std::string default_config_json(const std::map<Century, std::vector<std::string>>& manifests);

/// Hash of canonical_json plus the bytes of every manifest.
std::string run_fingerprint(const RunConfig& cfg);

/// $TRAWL_RUN_ROOT (default ./runs) / run_fingerprint.
std::filesystem::path run_directory(const RunConfig& cfg);

}  // namespace trawl
