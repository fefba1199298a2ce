#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trawl/eval.hpp"
#include "trawl/models.hpp"

namespace trawl {

inline constexpr std::uint32_t kCurveSizes[] = {5, 10, 15, 20, 25, 30, 50};
inline constexpr std::uint32_t kExtendedCurveSize = 100;

struct CurvePoint {
  std::uint32_t per_class_size = 0;
  std::uint32_t repeats = 0;
  std::vector<double> f1_values;  // indexed by repeat
  double mean_f1 = 0.0;
  double variance = 0.0;  // sample variance (n - 1); 0 for a single repeat

  static CurvePoint from_values(std::uint32_t size, std::vector<double> f1_values);
};

struct CurveConfig {
  std::vector<std::uint32_t> sizes{std::begin(kCurveSizes), std::end(kCurveSizes)};
  std::uint32_t repeats = 5;
  ModelFamily family = ModelFamily::Mlp;
  TrainConfig train;
  FeatureConfig features;  // must match the vectors in the labeled set
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// For every (size, repeat): draw `size` positives and `size` negatives,
/// train, and test on every remaining labeled document. Each cell seeds from
/// (seed, size, repeat) alone, so results do not depend on `jobs`.
/// SizeTooLarge if a size leaves no test document of some class.
std::vector<CurvePoint> learning_curve(const LabeledSet& data, const CurveConfig& cfg);

std::string curve_csv(std::span<const CurvePoint> points);
std::string curve_json(std::span<const CurvePoint> points, const CurveConfig& cfg);
/// Mean F1 with a shaded mean +/- variance band.
std::string curve_svg(std::span<const CurvePoint> points, const std::string& title);

}  // namespace trawl
