#pragma once

#include <span>

#include "trawl/error.hpp"
#include "trawl/features.hpp"
#include "trawl/types.hpp"

namespace trawl::detail {

/// Shared preconditions: equal lengths, both classes, one dimension.
/// Returns the common dimension.
inline std::uint32_t check_training_input(std::span<const SparseVector> X, std::span<const Label> y) {
  if (X.size() != y.size()) fail(ErrorCode::LengthMismatch, "X and y differ in length");
  bool pos = false, neg = false;
  for (Label l : y) (is_positive(l) ? pos : neg) = true;
  if (!pos || !neg) fail(ErrorCode::SingleClassInput, "training data must contain both classes");
  const std::uint32_t dim = X.front().dim;
  for (const auto& x : X)
    if (x.dim != dim) fail(ErrorCode::DimensionMismatch, "training vectors differ in dimension");
  return dim;
}

inline double signed_label(Label l) { return is_positive(l) ? 1.0 : -1.0; }

}  // namespace trawl::detail
