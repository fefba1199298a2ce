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

/// pre[k] = scale * sum_j x_j * w1[j][k] + b1[k]
template <typename W>
void hidden_preactivation(const W* w1, double scale, const W* b1, std::uint32_t hidden,
                          const SparseVector& x, double* pre) {
  std::fill(pre, pre + hidden, 0.0);
  for (const auto& e : x.entries) {
    const W* row = w1 + static_cast<std::size_t>(e.index) * hidden;
    for (std::uint32_t k = 0; k < hidden; ++k) pre[k] += e.weight * static_cast<double>(row[k]);
  }
  for (std::uint32_t k = 0; k < hidden; ++k) pre[k] = scale * pre[k] + static_cast<double>(b1[k]);
}

template <typename W>
double output_logit(const double* pre, const W* w2, double b2, std::uint32_t hidden) {
  double z = b2;
  for (std::uint32_t k = 0; k < hidden; ++k)
    if (pre[k] > 0.0) z += static_cast<double>(w2[k]) * pre[k];
  return z;
}

/// Backprop through the output unit: dh[k] = dz * w2[k] * relu'(pre[k]).
template <typename W>
void hidden_delta(const double* pre, const W* w2, double dz, std::uint32_t hidden, double* dh) {
  for (std::uint32_t k = 0; k < hidden; ++k) dh[k] = pre[k] > 0.0 ? dz * static_cast<double>(w2[k]) : 0.0;
}

}  // namespace

double MlpModel::logit(const SparseVector& x) const {
  if (x.dim != dim) fail(ErrorCode::DimensionMismatch, "vector dimension differs from model");
  std::vector<double> pre(hidden);
  hidden_preactivation(w1.data(), 1.0, b1.data(), hidden, x, pre.data());
  return output_logit(pre.data(), w2.data(), b2, hidden);
}

MlpParams init_mlp(std::uint32_t dim, std::uint32_t hidden, std::uint64_t seed) {
  MlpParams p;
  p.dim = dim;
  p.hidden = hidden;
  Rng rng(seed);
  // Inputs are unit-norm sparse vectors, so the variance of a hidden
  // pre-activation is Var(w1) regardless of dim; 1/sqrt(dim) would leave the
  // hidden layer near zero for any realistic hash dimension.
  (void)dim;
  const double lim1 = 1.0;
  const double lim2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  p.w1.resize(static_cast<std::size_t>(dim) * hidden);
  for (double& w : p.w1) w = rng.uniform(-lim1, lim1);
  p.b1.assign(hidden, 0.0);
  p.w2.resize(hidden);
  for (double& w : p.w2) w = rng.uniform(-lim2, lim2);
  p.b2 = 0.0;
  return p;
}

double mlp_objective(const MlpParams& p, std::span<const SparseVector> X, std::span<const Label> y,
                     double l2, MlpParams* grad) {
  if (X.size() != y.size()) fail(ErrorCode::LengthMismatch, "X and y differ in length");
  const std::uint32_t H = p.hidden;
  const double n = static_cast<double>(X.size());
  if (grad) {
    grad->dim = p.dim;
    grad->hidden = H;
    grad->w1.assign(p.w1.size(), 0.0);
    grad->b1.assign(H, 0.0);
    grad->w2.assign(H, 0.0);
    grad->b2 = 0.0;
  }
  std::vector<double> pre(H), dh(H);
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    hidden_preactivation(p.w1.data(), 1.0, p.b1.data(), H, X[i], pre.data());
    const double z = output_logit(pre.data(), p.w2.data(), p.b2, H);
    const double yi = is_positive(y[i]) ? 1.0 : 0.0;
    total += softplus(z) - yi * z;
    if (!grad) continue;
    const double dz = (sigmoid(z) - yi) / n;
    for (std::uint32_t k = 0; k < H; ++k)
      if (pre[k] > 0.0) grad->w2[k] += dz * pre[k];
    grad->b2 += dz;
    hidden_delta(pre.data(), p.w2.data(), dz, H, dh.data());
    for (std::uint32_t k = 0; k < H; ++k) grad->b1[k] += dh[k];
    for (const auto& e : X[i].entries) {
      double* row = grad->w1.data() + static_cast<std::size_t>(e.index) * H;
      for (std::uint32_t k = 0; k < H; ++k) row[k] += e.weight * dh[k];
    }
  }
  double sq = 0.0;
  for (double w : p.w1) sq += w * w;
  for (double w : p.w2) sq += w * w;
  if (grad) {
    for (std::size_t j = 0; j < p.w1.size(); ++j) grad->w1[j] += 2.0 * l2 * p.w1[j];
    for (std::uint32_t k = 0; k < H; ++k) grad->w2[k] += 2.0 * l2 * p.w2[k];
  }
  return total / n + l2 * sq;
}

MlpModel train_mlp(std::span<const SparseVector> X, std::span<const Label> y, const TrainConfig& cfg) {
  cfg.validate();
  const std::uint32_t dim = detail::check_training_input(X, y);
  const std::uint32_t H = cfg.hidden_units;

  MlpParams p = init_mlp(dim, H, cfg.seed);
  double scale1 = 1.0;  // first-layer weights are scale1 * p.w1
  const double decay = 1.0 - 2.0 * cfg.learning_rate * cfg.l2;

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, 1));

  std::vector<double> pre(H), deltas(static_cast<std::size_t>(cfg.batch_size) * H);
  std::vector<double> g_w2(H), g_b1(H);
  double best_loss = std::numeric_limits<double>::infinity();
  std::uint32_t stale = 0;

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double batch = static_cast<double>(end - start);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      double g_b2 = 0.0;

      for (std::size_t k = start; k < end; ++k) {
        const auto& x = X[order[k]];
        hidden_preactivation(p.w1.data(), scale1, p.b1.data(), H, x, pre.data());
        const double z = output_logit(pre.data(), p.w2.data(), p.b2, H);
        const double yi = is_positive(y[order[k]]) ? 1.0 : 0.0;
        epoch_loss += softplus(z) - yi * z;
        const double dz = sigmoid(z) - yi;
        for (std::uint32_t h = 0; h < H; ++h)
          if (pre[h] > 0.0) g_w2[h] += dz * pre[h];
        g_b2 += dz;
        double* dh = deltas.data() + (k - start) * H;
        hidden_delta(pre.data(), p.w2.data(), dz, H, dh);
        for (std::uint32_t h = 0; h < H; ++h) g_b1[h] += dh[h];
      }
      if (!std::isfinite(epoch_loss))
        fail(ErrorCode::DivergenceDetected, "training loss became non-finite in epoch " +
                                                std::to_string(epoch));

      scale1 *= decay;
      const double step1 = cfg.learning_rate / (batch * scale1);
      for (std::size_t k = start; k < end; ++k) {
        const double* dh = deltas.data() + (k - start) * H;
        for (const auto& e : X[order[k]].entries) {
          double* row = p.w1.data() + static_cast<std::size_t>(e.index) * H;
          const double s = step1 * e.weight;
          for (std::uint32_t h = 0; h < H; ++h) row[h] -= s * dh[h];
        }
      }
      for (std::uint32_t h = 0; h < H; ++h) {
        p.w2[h] = decay * p.w2[h] - cfg.learning_rate * g_w2[h] / batch;
        p.b1[h] -= cfg.learning_rate * g_b1[h] / batch;
      }
      p.b2 -= cfg.learning_rate * g_b2 / batch;

      if (scale1 < 1e-9) {
        for (double& w : p.w1) w *= scale1;
        scale1 = 1.0;
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

  MlpModel m;
  m.dim = dim;
  m.hidden = H;
  m.seed = cfg.seed;
  m.w1.resize(p.w1.size());
  for (std::size_t j = 0; j < p.w1.size(); ++j) m.w1[j] = static_cast<float>(scale1 * p.w1[j]);
  m.b1.assign(p.b1.begin(), p.b1.end());
  m.w2.assign(p.w2.begin(), p.w2.end());
  m.b2 = static_cast<float>(p.b2);
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(m.w2.begin(), m.w2.end(), finite) || !std::isfinite(m.b2))
    fail(ErrorCode::DivergenceDetected, "non-finite parameters after training");
  return m;
}

}  // namespace trawl
