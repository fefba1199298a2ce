#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trawl/error.hpp"
#include "trawl/features.hpp"
#include "trawl/rng.hpp"
#include "trawl/types.hpp"

namespace trawl::testkit {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "trawl") {
    std::string tmpl = (std::filesystem::temp_directory_path() / (tag + "-XXXXXX")).string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Runs f and returns the code of the trawl::Error it throws.
template <typename F>
std::optional<ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Random sparse vector with `nnz` distinct indices below `dim`.
inline SparseVector random_sparse(Rng& rng, std::uint32_t dim, std::size_t nnz, bool signed_values = true) {
  std::vector<SparseVector::Entry> e;
  for (std::size_t i = 0; i < nnz; ++i) {
    const double v = signed_values ? rng.uniform(-1.0, 1.0) : static_cast<double>(1 + rng.below(3));
    e.push_back({static_cast<std::uint32_t>(rng.below(dim)), v});
  }
  return SparseVector::from_unsorted(dim, std::move(e));
}

inline std::vector<Label> alternating_labels(std::size_t n) {
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? Label::Travelogue : Label::NonTravelogue;
  return y;
}

/// Two-class toy documents: each draws 30 grams, mostly from its class's
/// 20-word vocabulary, the rest from a shared one.
struct ToyData {
  std::vector<SparseVector> X;
  std::vector<Label> y;
};

inline ToyData toy_data(std::size_t per_class, const FeatureConfig& cfg, std::uint64_t seed,
                        double topical = 0.6) {
  Rng rng(seed);
  ToyData d;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const Label l = i % 2 ? Label::Travelogue : Label::NonTravelogue;
    std::vector<std::string> grams;
    for (int k = 0; k < 30; ++k) {
      if (rng.uniform() < topical)
        grams.push_back((is_positive(l) ? "pos" : "neg") + std::to_string(rng.below(20)));
      else
        grams.push_back("common" + std::to_string(rng.below(40)));
    }
    d.X.push_back(hash_vectorize(grams, cfg));
    d.y.push_back(l);
  }
  return d;
}

}  // namespace trawl::testkit
