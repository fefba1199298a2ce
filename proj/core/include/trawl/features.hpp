#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trawl/textprep.hpp"

namespace trawl {

enum class Normalize : std::uint8_t { None = 0, L2 = 1 };
enum class Weighting : std::uint8_t { Count = 0, Binary = 1 };

struct FeatureConfig {
  std::uint32_t ngram_min = 1;
  std::uint32_t ngram_max = 2;
  std::uint32_t hash_dim = 1u << 20;
  bool signed_hash = true;
  Normalize normalize = Normalize::L2;
  Weighting weighting = Weighting::Count;

  /// Signed hashing with L2 normalization: linear models and the MLP.
  static FeatureConfig signed_profile(std::uint32_t dim = 1u << 20);
  /// Unsigned raw counts: multinomial naive Bayes needs non-negative features.
  static FeatureConfig count_profile(std::uint32_t dim = 1u << 20);

  /// Throws InvalidArgument unless 1 <= min <= max and dim is a power of two >= 2^10.
  void validate() const;

  bool operator==(const FeatureConfig&) const = default;
};

/// Compact tag for the value-shaping part of a FeatureConfig. Vectors carry
/// it so models can refuse features produced under a different profile.
struct FeatureProfile {
  bool signed_hash = false;
  Normalize normalize = Normalize::None;
  Weighting weighting = Weighting::Count;

  static FeatureProfile of(const FeatureConfig& cfg) {
    return {cfg.signed_hash, cfg.normalize, cfg.weighting};
  }
  std::uint8_t bits() const;
  static FeatureProfile from_bits(std::uint8_t b);

  bool operator==(const FeatureProfile&) const = default;
};

/// Sorted sparse vector; indices strictly increase and no zero is stored.
struct SparseVector {
  struct Entry {
    std::uint32_t index;
    double weight;
    bool operator==(const Entry&) const = default;
  };

  std::uint32_t dim = 0;
  std::vector<Entry> entries;
  FeatureProfile profile;

  std::size_t nnz() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  double squared_norm() const;

  /// Sorts, sums duplicates and drops zeros.
  static SparseVector from_unsorted(std::uint32_t dim, std::vector<Entry> entries,
                                    FeatureProfile profile = {});

  bool operator==(const SparseVector&) const = default;
};

/// Contiguous n-grams for n in [ngram_min, ngram_max], tokens joined by a
/// single space, ordered by start position then by length.
std::vector<std::string> extract_ngrams(const TokenStream& stream, const FeatureConfig& cfg);

struct HashedFeature {
  std::uint32_t index;
  int sign;
};

/// index = xxh64(gram) & (dim - 1); sign = -1 when bit 63 of the hash is set.
HashedFeature hash_feature(std::string_view gram, std::uint32_t dim);

SparseVector hash_vectorize(const std::vector<std::string>& grams, const FeatureConfig& cfg);

SparseVector vectorize_document(std::string_view text, const FrequencyTable& freq,
                                const FeatureConfig& cfg, std::uint64_t min_count = 2);

/// Binary record: u32 dim, u32 entry count, then (varint index, f32 weight)
/// pairs, little-endian. Weights round to float32.
void write_vector(std::ostream& out, const SparseVector& v);
SparseVector read_vector(std::istream& in, FeatureProfile profile = {});

void write_varint(std::ostream& out, std::uint64_t v);
std::uint64_t read_varint(std::istream& in);

}  // namespace trawl
