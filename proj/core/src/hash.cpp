#include "trawl/hash.hpp"

#include <algorithm>
#include <cstring>

namespace trawl {
namespace {

constexpr std::uint64_t P1 = 0x9E3779B185EBCA87ULL;
constexpr std::uint64_t P2 = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t P3 = 0x165667B19E3779F9ULL;
constexpr std::uint64_t P4 = 0x85EBCA77C2B2AE63ULL;
constexpr std::uint64_t P5 = 0x27D4EB2F165667C5ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

std::uint64_t read64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t read32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t round(std::uint64_t acc, std::uint64_t input) {
  acc += input * P2;
  acc = rotl(acc, 31);
  return acc * P1;
}

std::uint64_t merge_round(std::uint64_t acc, std::uint64_t val) {
  acc ^= round(0, val);
  return acc * P1 + P4;
}

std::uint64_t finish(std::uint64_t h, const unsigned char* p, std::size_t len) {
  while (len >= 8) {
    h ^= round(0, read64(p));
    h = rotl(h, 27) * P1 + P4;
    p += 8;
    len -= 8;
  }
  if (len >= 4) {
    h ^= static_cast<std::uint64_t>(read32(p)) * P1;
    h = rotl(h, 23) * P2 + P3;
    p += 4;
    len -= 4;
  }
  while (len > 0) {
    h ^= static_cast<std::uint64_t>(*p) * P5;
    h = rotl(h, 11) * P1;
    ++p;
    --len;
  }
  h ^= h >> 33;
  h *= P2;
  h ^= h >> 29;
  h *= P3;
  h ^= h >> 32;
  return h;
}

std::uint64_t converge(const std::uint64_t acc[4]) {
  std::uint64_t h = rotl(acc[0], 1) + rotl(acc[1], 7) + rotl(acc[2], 12) + rotl(acc[3], 18);
  for (int i = 0; i < 4; ++i) h = merge_round(h, acc[i]);
  return h;
}

}  // namespace

std::uint64_t xxh64(std::span<const unsigned char> data, std::uint64_t seed) {
  const unsigned char* p = data.data();
  std::size_t len = data.size();
  std::uint64_t h;
  if (len >= 32) {
    std::uint64_t acc[4] = {seed + P1 + P2, seed + P2, seed, seed - P1};
    while (len >= 32) {
      for (int i = 0; i < 4; ++i) acc[i] = round(acc[i], read64(p + 8 * i));
      p += 32;
      len -= 32;
    }
    h = converge(acc);
  } else {
    h = seed + P5;
  }
  h += static_cast<std::uint64_t>(data.size());
  return finish(h, p, len);
}

std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

Xxh64Stream::Xxh64Stream(std::uint64_t seed)
    : seed_(seed), acc_{seed + P1 + P2, seed + P2, seed, seed - P1} {}

void Xxh64Stream::update(std::span<const unsigned char> data) {
  const unsigned char* p = data.data();
  std::size_t len = data.size();
  total_ += len;
  if (buf_len_ > 0) {
    const std::size_t take = std::min<std::size_t>(32 - buf_len_, len);
    std::memcpy(buf_ + buf_len_, p, take);
    buf_len_ += take;
    p += take;
    len -= take;
    if (buf_len_ < 32) return;
    for (int i = 0; i < 4; ++i) acc_[i] = round(acc_[i], read64(buf_ + 8 * i));
    buf_len_ = 0;
  }
  while (len >= 32) {
    for (int i = 0; i < 4; ++i) acc_[i] = round(acc_[i], read64(p + 8 * i));
    p += 32;
    len -= 32;
  }
  std::memcpy(buf_, p, len);
  buf_len_ = len;
}

std::uint64_t Xxh64Stream::digest() const {
  std::uint64_t h = total_ >= 32 ? converge(acc_) : seed_ + P5;
  h += total_;
  return finish(h, buf_, buf_len_);
}

}  // namespace trawl
