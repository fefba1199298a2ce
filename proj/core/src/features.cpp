#include "trawl/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "trawl/binary_io.hpp"
#include "trawl/error.hpp"
#include "trawl/hash.hpp"

namespace trawl {

FeatureConfig FeatureConfig::signed_profile(std::uint32_t dim) {
  FeatureConfig c;
  c.hash_dim = dim;
  c.signed_hash = true;
  c.normalize = Normalize::L2;
  c.weighting = Weighting::Count;
  return c;
}

FeatureConfig FeatureConfig::count_profile(std::uint32_t dim) {
  FeatureConfig c;
  c.hash_dim = dim;
  c.signed_hash = false;
  c.normalize = Normalize::None;
  c.weighting = Weighting::Count;
  return c;
}

void FeatureConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max)
    fail(ErrorCode::InvalidArgument, "ngram range must satisfy 1 <= min <= max");
  if (!std::has_single_bit(hash_dim) || hash_dim < (1u << 10))
    fail(ErrorCode::InvalidArgument, "hash_dim must be a power of two >= 1024");
}

std::uint8_t FeatureProfile::bits() const {
  return static_cast<std::uint8_t>((signed_hash ? 1 : 0) | (static_cast<int>(normalize) << 1) |
                                   (static_cast<int>(weighting) << 2));
}

FeatureProfile FeatureProfile::from_bits(std::uint8_t b) {
  return {(b & 1) != 0, static_cast<Normalize>((b >> 1) & 1), static_cast<Weighting>((b >> 2) & 1)};
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight;
  return s;
}

SparseVector SparseVector::from_unsorted(std::uint32_t dim, std::vector<Entry> entries,
                                         FeatureProfile profile) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  SparseVector v;
  v.dim = dim;
  v.profile = profile;
  for (const auto& e : entries) {
    if (e.index >= dim) fail(ErrorCode::DimensionMismatch, "index out of range");
    if (!v.entries.empty() && v.entries.back().index == e.index) {
      v.entries.back().weight += e.weight;
    } else {
      v.entries.push_back(e);
    }
  }
  std::erase_if(v.entries, [](const Entry& e) { return e.weight == 0.0; });
  return v;
}

std::vector<std::string> extract_ngrams(const TokenStream& stream, const FeatureConfig& cfg) {
  const auto& t = stream.tokens;
  std::vector<std::string> grams;
  grams.reserve(t.size() * (cfg.ngram_max - cfg.ngram_min + 1));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::uint32_t n = cfg.ngram_min; n <= cfg.ngram_max; ++n) {
      if (i + n > t.size()) break;
      std::string g = t[i];
      for (std::size_t k = 1; k < n; ++k) {
        g += ' ';
        g += t[i + k];
      }
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

HashedFeature hash_feature(std::string_view gram, std::uint32_t dim) {
  const std::uint64_t h = xxh64(gram);
  return {static_cast<std::uint32_t>(h & (dim - 1)), (h >> 63) ? -1 : 1};
}

SparseVector hash_vectorize(const std::vector<std::string>& grams, const FeatureConfig& cfg) {
  cfg.validate();
  const FeatureProfile profile = FeatureProfile::of(cfg);

  // Binary saturates per gram before signing, so collect gram counts first.
  std::unordered_map<std::uint32_t, double> acc;
  if (cfg.weighting == Weighting::Binary) {
    std::unordered_map<std::string_view, bool> seen;
    for (const auto& g : grams) {
      if (!seen.emplace(g, true).second) continue;
      const auto f = hash_feature(g, cfg.hash_dim);
      acc[f.index] += cfg.signed_hash ? f.sign : 1;
    }
  } else {
    for (const auto& g : grams) {
      const auto f = hash_feature(g, cfg.hash_dim);
      acc[f.index] += cfg.signed_hash ? f.sign : 1;
    }
  }

  std::vector<SparseVector::Entry> entries;
  entries.reserve(acc.size());
  for (const auto& [idx, w] : acc)
    if (w != 0.0) entries.push_back({idx, w});
  SparseVector v = SparseVector::from_unsorted(cfg.hash_dim, std::move(entries), profile);

  if (cfg.normalize == Normalize::L2 && !v.empty()) {
    const double norm = std::sqrt(v.squared_norm());
    for (auto& e : v.entries) e.weight /= norm;
  }
  return v;
}

SparseVector vectorize_document(std::string_view text, const FrequencyTable& freq,
                                const FeatureConfig& cfg, std::uint64_t min_count) {
  return hash_vectorize(extract_ngrams(filter_rare(tokenize(text), freq, min_count), cfg), cfg);
}

void write_varint(std::ostream& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.put(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.put(static_cast<char>(v));
}

std::uint64_t read_varint(std::istream& in) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const int ch = in.get();
    if (ch == std::char_traits<char>::eof()) fail(ErrorCode::Io, "truncated varint");
    v |= static_cast<std::uint64_t>(ch & 0x7F) << shift;
    if ((ch & 0x80) == 0) return v;
  }
  fail(ErrorCode::Io, "varint too long");
}

void write_vector(std::ostream& out, const SparseVector& v) {
  bin::write_u32(out, v.dim);
  bin::write_u32(out, static_cast<std::uint32_t>(v.entries.size()));
  for (const auto& e : v.entries) {
    write_varint(out, e.index);
    bin::write_f32(out, static_cast<float>(e.weight));
  }
}

SparseVector read_vector(std::istream& in, FeatureProfile profile) {
  SparseVector v;
  v.profile = profile;
  v.dim = bin::read_u32(in);
  const std::uint32_t n = bin::read_u32(in);
  v.entries.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto idx = read_varint(in);
    const float w = bin::read_f32(in);
    if (idx >= v.dim || (!v.entries.empty() && idx <= v.entries.back().index))
      fail(ErrorCode::Io, "vector record indices out of order");
    if (w != 0.0f) v.entries.push_back({static_cast<std::uint32_t>(idx), static_cast<double>(w)});
  }
  return v;
}

}  // namespace trawl
