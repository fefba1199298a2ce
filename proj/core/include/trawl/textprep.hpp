#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trawl {

/// Lowercased tokens, each with at least two alphanumeric code points.
struct TokenStream {
  std::vector<std::string> tokens;

  bool operator==(const TokenStream&) const = default;
};

/// Splits on every code point that is not a Unicode letter or decimal digit,
/// lowercases letters, and drops tokens with fewer than two alphanumerics.
/// Combining marks stay attached to a token already in progress.
TokenStream tokenize(std::string_view text);

/// Number of letter/digit code points in a UTF-8 string.
std::size_t count_alphanumeric(std::string_view token);

/// Exact token counts over a document set. Tables built on shards merge to
/// the same result as a single pass.
class FrequencyTable {
 public:
  void add(const TokenStream& doc);
  void add_token(std::string_view token, std::uint64_t count = 1);
  void merge(const FrequencyTable& other);

  std::uint64_t count(std::string_view token) const;
  std::uint64_t total_tokens() const { return total_; }
  std::uint64_t doc_count() const { return docs_; }
  std::size_t vocabulary_size() const { return counts_.size(); }

  /// (token, count) pairs sorted by token bytes.
  std::vector<std::pair<std::string, std::uint64_t>> sorted() const;

  /// XXH64 over the sorted `token\tcount\n` lines, hex encoded.
  std::string fingerprint() const;

  /// Sorted `token\tcount` TSV. Lines starting with '#' are header comments
  /// (tokens can never start with '#').
  void save_tsv(const std::filesystem::path& path, std::span<const std::string> header = {}) const;
  static FrequencyTable load_tsv(const std::filesystem::path& path);

  bool operator==(const FrequencyTable& o) const {
    return counts_ == o.counts_ && total_ == o.total_ && docs_ == o.docs_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::uint64_t, Hash, std::equal_to<>> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t docs_ = 0;
};

FrequencyTable build_frequency_table(std::span<const TokenStream> docs);

/// Removes tokens whose table count is below `min_count`; order preserved.
TokenStream filter_rare(const TokenStream& stream, const FrequencyTable& table,
                        std::uint64_t min_count = 2);

struct CorpusStats {
  std::uint64_t total_tokens = 0;
  std::uint64_t doc_count = 0;

  /// Integer average (floor), the precision token statistics are reported at.
  std::uint64_t average_tokens() const;
};

/// EmptyCorpus when there are no documents.
CorpusStats corpus_stats(std::span<const TokenStream> docs);

}  // namespace trawl
