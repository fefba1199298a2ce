#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace trawl {

/// Identifier embedded in model and cache files for the feature hash below.
inline constexpr std::string_view kFeatureHashId = "xxh64";

/// XXH64 (seed 0 unless given). Stable across platforms: input is consumed
/// as little-endian words regardless of host order.
std::uint64_t xxh64(std::span<const unsigned char> data, std::uint64_t seed = 0);

inline std::uint64_t xxh64(std::string_view s, std::uint64_t seed = 0) {
  return xxh64(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()), seed);
}

/// 16 lowercase hex digits.
std::string to_hex(std::uint64_t v);

/// Streaming XXH64 for data that does not fit in one buffer.
class Xxh64Stream {
 public:
  explicit Xxh64Stream(std::uint64_t seed = 0);
  void update(std::span<const unsigned char> data);
  void update(std::string_view s) {
    update(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  }
  std::uint64_t digest() const;

 private:
  std::uint64_t seed_;
  std::uint64_t acc_[4];
  unsigned char buf_[32];
  std::size_t buf_len_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace trawl
