#include "trawl/models.hpp"

#include <cmath>
#include <sstream>

#include "trawl/error.hpp"

namespace trawl {

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::Mnb: return "mnb";
    case ModelFamily::Svm: return "svm";
    case ModelFamily::LogReg: return "logreg";
    case ModelFamily::Mlp: return "mlp";
  }
  return "mlp";
}

std::optional<ModelFamily> family_from_string(std::string_view s) {
  for (auto f : kAllFamilies)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string_view display_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Mnb: return "MNB";
    case ModelFamily::Svm: return "SVM";
    case ModelFamily::LogReg: return "Log";
    case ModelFamily::Mlp: return "MLP";
  }
  return "MLP";
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (batch_size < 1) fail(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) fail(ErrorCode::InvalidArgument, "l2 must be >= 0");
  if (2.0 * learning_rate * l2 >= 1.0)
    fail(ErrorCode::InvalidArgument, "learning_rate * l2 must be < 0.5 for a stable weight decay");
  if (hidden_units < 1) fail(ErrorCode::InvalidArgument, "hidden_units must be >= 1");
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be > 0");
  if (early_stop_patience && *early_stop_patience < 1)
    fail(ErrorCode::InvalidArgument, "early_stop_patience must be >= 1");
}

TrainConfig TrainConfig::defaults_for(ModelFamily f) {
  TrainConfig c;
  if (f == ModelFamily::Mlp) {
    c.learning_rate = 0.5;
    c.epochs = 20;
  }
  return c;
}

std::string canonical_string(const TrainConfig& c) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "epochs=" << c.epochs << ";lr=" << c.learning_rate << ";batch=" << c.batch_size << ";l2=" << c.l2
     << ";seed=" << c.seed << ";hidden=" << c.hidden_units << ";patience="
     << (c.early_stop_patience ? std::to_string(*c.early_stop_patience) : "off") << ";alpha=" << c.alpha;
  return ss.str();
}

std::string canonical_string(const FeatureConfig& c) {
  std::ostringstream ss;
  ss << "ngram=" << c.ngram_min << "-" << c.ngram_max << ";dim=" << c.hash_dim
     << ";signed=" << c.signed_hash << ";norm=" << static_cast<int>(c.normalize)
     << ";weighting=" << static_cast<int>(c.weighting) << ";hash=" << kFeatureHashId;
  return ss.str();
}

ScoredLabel classify(double score, double threshold) {
  return {score, score >= threshold ? Label::Travelogue : Label::NonTravelogue, threshold};
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::uint32_t Model::dim() const {
  return std::visit(
      [](const auto& m) -> std::uint32_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MnbModel>) {
          return m.dim();
        } else {
          return m.dim;
        }
      },
      params);
}

namespace {

void check_vector_profile(const ModelMeta& meta, const SparseVector& x) {
  if (x.profile != FeatureProfile::of(meta.features))
    fail(ErrorCode::ProfileMismatch, "feature vector was produced under a different hashing profile");
}

}  // namespace

Model train_model(ModelFamily family, std::span<const SparseVector> X, std::span<const Label> y,
                  const TrainConfig& cfg, ModelMeta meta) {
  cfg.validate();
  if (family == ModelFamily::Mnb && meta.features.signed_hash)
    fail(ErrorCode::ProfileMismatch, "multinomial naive Bayes requires unsigned count features");
  if (family != ModelFamily::Mnb && !meta.features.signed_hash)
    fail(ErrorCode::ProfileMismatch, "linear and MLP models use the signed hashing profile");
  for (const auto& x : X) {
    if (x.dim != meta.features.hash_dim)
      fail(ErrorCode::DimensionMismatch, "vector dimension differs from the feature config");
    check_vector_profile(meta, x);
  }

  Model m;
  m.family = family;
  m.meta = std::move(meta);
  switch (family) {
    case ModelFamily::Mnb: m.params = train_mnb(X, y, cfg.alpha); break;
    case ModelFamily::Svm: m.params = train_linear(X, y, LinearLoss::Hinge, cfg); break;
    case ModelFamily::LogReg: m.params = train_linear(X, y, LinearLoss::Logistic, cfg); break;
    case ModelFamily::Mlp: m.params = train_mlp(X, y, cfg); break;
  }
  return m;
}

double raw_decision(const Model& model, const SparseVector& x) {
  if (x.dim != model.dim())
    fail(ErrorCode::DimensionMismatch, "vector dim " + std::to_string(x.dim) + " != model dim " +
                                           std::to_string(model.dim()));
  check_vector_profile(model.meta, x);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MnbModel>) {
          const auto lp = m.log_posteriors(x);
          return lp[1] - lp[0];
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          return m.margin(x);
        } else {
          return m.logit(x);
        }
      },
      model.params);
}

ScoredLabel predict_score(const Model& model, const SparseVector& x, double threshold) {
  if (x.dim != model.dim())
    fail(ErrorCode::DimensionMismatch, "vector dim " + std::to_string(x.dim) + " != model dim " +
                                           std::to_string(model.dim()));
  check_vector_profile(model.meta, x);
  if (const auto* mnb = std::get_if<MnbModel>(&model.params)) return classify(mnb->positive_posterior(x), threshold);
  return classify(sigmoid(raw_decision(model, x)), threshold);
}

}  // namespace trawl
