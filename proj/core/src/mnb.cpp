#include <algorithm>
#include <cmath>
#include <map>

#include "train_common.hpp"
#include "trawl/error.hpp"
#include "trawl/models.hpp"

namespace trawl {

MnbModel::MnbModel(std::uint32_t dim, double alpha, std::array<double, 2> class_docs,
                   std::vector<MnbFeature> features)
    : dim_(dim), alpha_(alpha), class_docs_(class_docs), features_(std::move(features)) {
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be > 0");
  std::sort(features_.begin(), features_.end(),
            [](const MnbFeature& a, const MnbFeature& b) { return a.index < b.index; });
  class_totals_ = {0.0, 0.0};
  for (const auto& f : features_) {
    if (f.index >= dim_) fail(ErrorCode::DimensionMismatch, "feature index out of range");
    class_totals_[0] += f.counts[0];
    class_totals_[1] += f.counts[1];
  }
  const double n = class_docs_[0] + class_docs_[1];
  for (std::size_t c = 0; c < 2; ++c) {
    log_prior_[c] = std::log(class_docs_[c] / n);
    log_denominator_[c] = std::log(alpha_ * static_cast<double>(dim_) + class_totals_[c]);
  }
}

double MnbModel::log_likelihood(Label c, std::uint32_t index) const {
  auto it = std::lower_bound(features_.begin(), features_.end(), index,
                             [](const MnbFeature& f, std::uint32_t i) { return f.index < i; });
  const double count = (it != features_.end() && it->index == index) ? it->counts[idx(c)] : 0.0;
  return std::log(alpha_ + count) - log_denominator_[idx(c)];
}

std::array<double, 2> MnbModel::log_posteriors(const SparseVector& x) const {
  if (x.dim != dim_) fail(ErrorCode::DimensionMismatch, "vector dimension differs from model");
  std::array<double, 2> lp = log_prior_;
  // x and features_ are both sorted by index: merge instead of searching.
  auto it = features_.begin();
  for (const auto& e : x.entries) {
    if (e.weight < 0.0) fail(ErrorCode::ProfileMismatch, "naive Bayes needs non-negative counts");
    while (it != features_.end() && it->index < e.index) ++it;
    const bool hit = it != features_.end() && it->index == e.index;
    for (std::size_t c = 0; c < 2; ++c) {
      const double count = hit ? it->counts[c] : 0.0;
      lp[c] += e.weight * (std::log(alpha_ + count) - log_denominator_[c]);
    }
  }
  const double hi = std::max(lp[0], lp[1]);
  const double lse = hi + std::log(std::exp(lp[0] - hi) + std::exp(lp[1] - hi));
  return {lp[0] - lse, lp[1] - lse};
}

double MnbModel::positive_posterior(const SparseVector& x) const {
  return std::exp(log_posteriors(x)[1]);
}

MnbModel train_mnb(std::span<const SparseVector> X, std::span<const Label> y, double alpha) {
  const std::uint32_t dim = detail::check_training_input(X, y);
  std::array<double, 2> docs{0.0, 0.0};
  std::map<std::uint32_t, std::array<double, 2>> counts;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const std::size_t c = is_positive(y[i]) ? 1 : 0;
    docs[c] += 1.0;
    for (const auto& e : X[i].entries) {
      if (e.weight < 0.0)
        fail(ErrorCode::NegativeFeature, "naive Bayes requires non-negative feature weights");
      counts[e.index][c] += e.weight;
    }
  }
  std::vector<MnbFeature> features;
  features.reserve(counts.size());
  for (const auto& [idx, c] : counts) {
    // freeze to the float32 precision the model file stores
    features.push_back({idx, {static_cast<double>(static_cast<float>(c[0])),
                              static_cast<double>(static_cast<float>(c[1]))}});
  }
  return MnbModel(dim, alpha, docs, std::move(features));
}

}  // namespace trawl
