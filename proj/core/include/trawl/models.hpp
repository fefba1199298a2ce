#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trawl/features.hpp"
#include "trawl/hash.hpp"
#include "trawl/types.hpp"

namespace trawl {

enum class ModelFamily : std::uint8_t { Mnb = 0, Svm = 1, LogReg = 2, Mlp = 3 };

inline constexpr std::array<ModelFamily, 4> kAllFamilies = {ModelFamily::Mnb, ModelFamily::Svm,
                                                            ModelFamily::LogReg, ModelFamily::Mlp};

std::string_view to_string(ModelFamily f);
std::optional<ModelFamily> family_from_string(std::string_view s);
/// Display name used in report tables ("MNB", "SVM", "Log", "MLP").
std::string_view display_name(ModelFamily f);

enum class LinearLoss : std::uint8_t { Hinge = 0, Logistic = 1 };

struct TrainConfig {
  std::uint32_t epochs = 20;
  double learning_rate = 0.1;
  std::uint32_t batch_size = 32;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::uint32_t hidden_units = 256;               // MLP only
  std::optional<std::uint32_t> early_stop_patience;  // epochs without training-loss improvement
  double alpha = 1.0;                             // MNB smoothing

  void validate() const;
  static TrainConfig defaults_for(ModelFamily f);

  bool operator==(const TrainConfig&) const = default;
};

/// Canonical text form; feeds experiment fingerprints.
std::string canonical_string(const TrainConfig& c);
std::string canonical_string(const FeatureConfig& c);

struct ScoredLabel {
  double score = 0.0;
  Label label = Label::NonTravelogue;
  double threshold = 0.5;
};

/// A score equal to the threshold classifies positive.
ScoredLabel classify(double score, double threshold = 0.5);

double sigmoid(double z);

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

/// Per-class sufficient statistics for one observed feature index.
struct MnbFeature {
  std::uint32_t index;
  std::array<double, 2> counts;  // [NonTravelogue, Travelogue]
};

class MnbModel {
 public:
  MnbModel() = default;
  MnbModel(std::uint32_t dim, double alpha, std::array<double, 2> class_docs,
           std::vector<MnbFeature> features);

  std::uint32_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const std::array<double, 2>& class_docs() const { return class_docs_; }
  const std::array<double, 2>& class_totals() const { return class_totals_; }
  const std::vector<MnbFeature>& features() const { return features_; }

  double log_prior(Label c) const { return log_prior_[idx(c)]; }
  /// log((alpha + count_c[j]) / (alpha * dim + total_c))
  double log_likelihood(Label c, std::uint32_t index) const;

  /// Normalized class log-posteriors log P(c | x), indexed by Label.
  std::array<double, 2> log_posteriors(const SparseVector& x) const;
  double positive_posterior(const SparseVector& x) const;

 private:
  static std::size_t idx(Label c) { return static_cast<std::size_t>(c); }

  std::uint32_t dim_ = 0;
  double alpha_ = 1.0;
  std::array<double, 2> class_docs_{};
  std::array<double, 2> class_totals_{};
  std::vector<MnbFeature> features_;  // sorted by index
  std::array<double, 2> log_prior_{};
  std::array<double, 2> log_denominator_{};
};

MnbModel train_mnb(std::span<const SparseVector> X, std::span<const Label> y, double alpha = 1.0);

// ---------------------------------------------------------------------------
// Linear models (SVM via hinge loss, logistic regression)

struct LinearModel {
  std::uint32_t dim = 0;
  std::vector<float> weights;  // dense, |weights| == dim
  float bias = 0.0f;
  LinearLoss loss = LinearLoss::Logistic;
  double l2 = 0.0;

  double margin(const SparseVector& x) const;
};

LinearModel train_linear(std::span<const SparseVector> X, std::span<const Label> y, LinearLoss loss,
                         const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Multilayer perceptron: dim -> hidden (ReLU) -> 1 (sigmoid)

struct MlpModel {
  std::uint32_t dim = 0;
  std::uint32_t hidden = 0;
  std::uint64_t seed = 0;
  std::vector<float> w1;  // dim x hidden, row j holds input j's fan-out
  std::vector<float> b1;  // hidden
  std::vector<float> w2;  // hidden
  float b2 = 0.0f;

  std::array<std::uint32_t, 3> layer_sizes() const { return {dim, hidden, 1}; }
  double logit(const SparseVector& x) const;
};

MlpModel train_mlp(std::span<const SparseVector> X, std::span<const Label> y, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Model bundle: parameters plus the frozen preprocessing that produced the
// features they expect.

struct ModelMeta {
  FeatureConfig features;
  std::uint64_t min_count = 2;
  std::string hash_id = std::string(kFeatureHashId);
  std::string freq_fingerprint;
  std::string run_fingerprint;

  bool operator==(const ModelMeta&) const = default;
};

struct Model {
  ModelFamily family = ModelFamily::Mlp;
  ModelMeta meta;
  std::variant<MnbModel, LinearModel, MlpModel> params;

  std::uint32_t dim() const;
};

/// Trains any family. The vectors must match meta.features (dimension and
/// profile); MNB additionally requires the unsigned count profile.
Model train_model(ModelFamily family, std::span<const SparseVector> X, std::span<const Label> y,
                  const TrainConfig& cfg, ModelMeta meta);

/// Probability of the positive class. MNB: posterior; LogReg and MLP:
/// sigmoid output; SVM: sigmoid(margin), monotone in the margin.
ScoredLabel predict_score(const Model& model, const SparseVector& x, double threshold = 0.5);

/// Margin (linear) or logit (MLP) or log-odds (MNB) before squashing.
double raw_decision(const Model& model, const SparseVector& x);

// Serialization: magic, version, family, FeatureConfig, hash id, fingerprints,
// float32 parameter blob, trailing XXH64 checksum.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);
/// Hex checksum of the serialized model.
std::string model_fingerprint(const Model& model);

// ---------------------------------------------------------------------------
// Objectives exposed for gradient verification. Values are full-batch means
// plus the L2 penalty on weights (biases are not penalized).

struct LinearParams {
  std::vector<double> w;
  double b = 0.0;
};

double linear_objective(const LinearParams& p, std::span<const SparseVector> X, std::span<const Label> y,
                        LinearLoss loss, double l2, LinearParams* grad = nullptr);

struct MlpParams {
  std::uint32_t dim = 0;
  std::uint32_t hidden = 0;
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;
};

double mlp_objective(const MlpParams& p, std::span<const SparseVector> X, std::span<const Label> y,
                     double l2, MlpParams* grad = nullptr);

/// Uniform initialization for unit-norm inputs, as used by train_mlp.
MlpParams init_mlp(std::uint32_t dim, std::uint32_t hidden, std::uint64_t seed);

}  // namespace trawl
