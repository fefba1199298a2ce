#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trawl/types.hpp"

namespace trawl {

/// One volume in the collection. `label` is absent for candidates.
struct DocumentRef {
  std::string id;
  Century century = Century::C16;
  std::filesystem::path text_path;
  std::optional<Label> label;
  Provenance provenance = Provenance::KeywordSearch;

  bool operator==(const DocumentRef&) const = default;
};

/// Labeled ground truth plus unlabeled candidates of a single century.
/// The three lists are pairwise disjoint by id.
struct CorpusPartition {
  Century century = Century::C16;
  std::vector<DocumentRef> positives;
  std::vector<DocumentRef> negatives;
  std::vector<DocumentRef> candidates;

  std::size_t labeled_size() const { return positives.size() + negatives.size(); }
};

struct AnnotationRecord {
  std::string doc_id;
  Verdict verdict = Verdict::Uncertain;
  std::string annotator;
  std::chrono::sys_seconds timestamp{};
  std::int64_t round = 0;

  bool operator==(const AnnotationRecord&) const = default;
};

/// Reads a JSON Lines manifest. Relative text paths are resolved against the
/// manifest's directory and every text file must be readable. Fails fast on
/// the first bad line: a silently skipped document would unbalance the
/// ground truth.
std::vector<DocumentRef> load_manifest(const std::filesystem::path& path);

/// Parses manifest lines from memory. `base_dir` resolves relative paths;
/// `check_files` enables the readable-file check.
std::vector<DocumentRef> parse_manifest(std::string_view content,
                                        const std::filesystem::path& base_dir,
                                        bool check_files = true);

std::string manifest_line(const DocumentRef& ref);
void save_manifest(const std::filesystem::path& path, std::span<const DocumentRef> refs);

CorpusPartition partition(std::span<const DocumentRef> refs, Century century);

/// Draws `n` distinct candidates uniformly without replacement. The returned
/// refs are marked RandomSample and stay unlabeled: they only enter the
/// negative set after an expert Reject verdict.
std::vector<DocumentRef> sample_negatives(const CorpusPartition& p, std::size_t n,
                                          std::uint64_t seed);

/// How many verified negatives are missing for a balanced ground truth.
std::size_t negative_deficit(const CorpusPartition& p);

/// Routes documents by verdict. Records are applied in round order; within a
/// round a Confirm and a Reject for the same document (from any annotators)
/// is a ConflictingVerdicts error. Uncertain never moves a document.
CorpusPartition apply_annotations(const CorpusPartition& p,
                                  std::span<const AnnotationRecord> records);

// Annotation log: append-only JSON Lines.
std::string annotation_line(const AnnotationRecord& r);
AnnotationRecord parse_annotation_line(std::string_view line, std::size_t line_no = 0);
std::vector<AnnotationRecord> load_annotation_log(const std::filesystem::path& path);

std::string format_utc(std::chrono::sys_seconds t);
std::optional<std::chrono::sys_seconds> parse_utc(std::string_view s);

/// Consensus of one document's verdicts in one round.
enum class Consensus : std::uint8_t { None, Confirmed, Rejected, Uncertain, Disputed };

/// Uncertain verdicts are ignored when a decisive one exists; Confirm and
/// Reject together are Disputed and left for the annotators to resolve.
Consensus resolve_consensus(std::span<const Verdict> verdicts);
std::string_view to_string(Consensus c);

/// Reads a document as UTF-8; InvalidUtf8 on malformed input.
std::string read_text(const std::filesystem::path& path);
bool is_valid_utf8(std::string_view s);

}  // namespace trawl
