#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "train_common.hpp"
#include "trawl/error.hpp"
#include "trawl/models.hpp"
#include "trawl/rng.hpp"

namespace trawl {
namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Per-example loss for y in {-1, +1} and decision value f.
double loss_value(LinearLoss loss, double y, double f) {
  if (loss == LinearLoss::Hinge) return std::max(0.0, 1.0 - y * f);
  return softplus(-y * f);
}

/// d loss / d f
double loss_derivative(LinearLoss loss, double y, double f) {
  if (loss == LinearLoss::Hinge) return y * f < 1.0 ? -y : 0.0;
  return -y * sigmoid(-y * f);
}

double dot(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += w[e.index] * e.weight;
  return s;
}

}  // namespace

double LinearModel::margin(const SparseVector& x) const {
  if (x.dim != dim) fail(ErrorCode::DimensionMismatch, "vector dimension differs from model");
  double s = bias;
  for (const auto& e : x.entries) s += static_cast<double>(weights[e.index]) * e.weight;
  return s;
}

double linear_objective(const LinearParams& p, std::span<const SparseVector> X, std::span<const Label> y,
                        LinearLoss loss, double l2, LinearParams* grad) {
  if (X.size() != y.size()) fail(ErrorCode::LengthMismatch, "X and y differ in length");
  const double n = static_cast<double>(X.size());
  if (grad) {
    grad->w.assign(p.w.size(), 0.0);
    grad->b = 0.0;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yi = detail::signed_label(y[i]);
    const double f = dot(p.w, X[i]) + p.b;
    total += loss_value(loss, yi, f);
    if (grad) {
      const double d = loss_derivative(loss, yi, f) / n;
      for (const auto& e : X[i].entries) grad->w[e.index] += d * e.weight;
      grad->b += d;
    }
  }
  double sq = 0.0;
  for (double w : p.w) sq += w * w;
  if (grad)
    for (std::size_t j = 0; j < p.w.size(); ++j) grad->w[j] += 2.0 * l2 * p.w[j];
  return total / n + l2 * sq;
}

LinearModel train_linear(std::span<const SparseVector> X, std::span<const Label> y, LinearLoss loss,
                         const TrainConfig& cfg) {
  cfg.validate();
  const std::uint32_t dim = detail::check_training_input(X, y);

  // w = scale * v, so the L2 decay is one multiply per step instead of a pass over dim.
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  const double decay = 1.0 - 2.0 * cfg.learning_rate * cfg.l2;

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  std::vector<double> deriv;
  double best_loss = std::numeric_limits<double>::infinity();
  std::uint32_t stale = 0;

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double batch = static_cast<double>(end - start);

      deriv.clear();
      double dbias = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& x = X[order[k]];
        const double yi = detail::signed_label(y[order[k]]);
        const double f = scale * dot(v, x) + bias;
        epoch_loss += loss_value(loss, yi, f);
        const double d = loss_derivative(loss, yi, f);
        deriv.push_back(d);
        dbias += d;
      }
      if (!std::isfinite(epoch_loss))
        fail(ErrorCode::DivergenceDetected, "training loss became non-finite in epoch " +
                                                std::to_string(epoch));

      scale *= decay;
      const double step = cfg.learning_rate / (batch * scale);
      for (std::size_t k = start; k < end; ++k) {
        const double d = deriv[k - start];
        if (d == 0.0) continue;
        for (const auto& e : X[order[k]].entries) v[e.index] -= step * d * e.weight;
      }
      bias -= cfg.learning_rate * dbias / batch;

      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
    epoch_loss /= static_cast<double>(X.size());
    if (cfg.early_stop_patience) {
      if (epoch_loss < best_loss - 1e-12) {
        best_loss = epoch_loss;
        stale = 0;
      } else if (++stale >= *cfg.early_stop_patience) {
        break;
      }
    }
  }

  LinearModel m;
  m.dim = dim;
  m.loss = loss;
  m.l2 = cfg.l2;
  m.bias = static_cast<float>(bias);
  m.weights.resize(dim);
  for (std::uint32_t j = 0; j < dim; ++j) {
    const double w = scale * v[j];
    if (!std::isfinite(w)) fail(ErrorCode::DivergenceDetected, "non-finite weight after training");
    m.weights[j] = static_cast<float>(w);
  }
  if (!std::isfinite(m.bias)) fail(ErrorCode::DivergenceDetected, "non-finite bias after training");
  return m;
}

}  // namespace trawl
