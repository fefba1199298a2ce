#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trawl/corpus.hpp"
#include "trawl/features.hpp"
#include "trawl/models.hpp"
#include "trawl/textprep.hpp"

namespace trawl {

struct RankedCandidate {
  std::string doc_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  std::string model_fingerprint;
  Century century = Century::C16;

  bool operator==(const RankedCandidate&) const = default;
};

/// A candidate that could not be scored, kept so nothing is silently lost.
struct SkippedCandidate {
  std::string doc_id;
  Century century = Century::C16;
  std::string reason;

  bool operator==(const SkippedCandidate&) const = default;
};

struct Ranking {
  std::vector<RankedCandidate> ranked;
  std::vector<SkippedCandidate> skipped;
};

/// Sorts by score descending, ties by doc_id ascending, and assigns ranks.
void assign_ranks(std::vector<RankedCandidate>& items);

/// Vectorizes and scores every candidate. Documents are processed in chunks
/// of `chunk` so at most that many texts are held at once; `jobs` bounds the
/// worker count. FingerprintMismatch if the model was trained against a
/// different frequency table.
Ranking score_candidates(const Model& model, std::span<const DocumentRef> candidates,
                         const FrequencyTable& freq, unsigned jobs = 1, std::size_t chunk = 256);

inline constexpr std::size_t kDefaultTopN = 200;

/// Header of the review queue file. Skipped rows append a sixth `reason`
/// column and leave rank and score empty.
inline constexpr std::string_view kQueueHeader = "rank,doc_id,score,century,model_fingerprint,reason";

/// Writes the first `top_n` ranked rows, then every skipped row.
std::string queue_csv(const Ranking& ranking, std::size_t top_n = kDefaultTopN);
void export_queue(const Ranking& ranking, const std::filesystem::path& path,
                  std::size_t top_n = kDefaultTopN);

/// Reads a queue file written by export_queue. Io on malformed rows.
Ranking load_queue(const std::filesystem::path& path);
Ranking parse_queue(std::string_view csv);

struct DiscoveryReport {
  Century century = Century::C16;
  std::size_t queue_size = 0;
  std::size_t evaluated_top_n = 0;  // queue members with a decisive verdict
  std::size_t confirmed = 0;
  double confirmation_rate = 0.0;  // 0 when nothing was evaluated
  bool rate_defined = false;
};

/// Per document the latest round with records decides; a document counts as
/// evaluated when that round's consensus is Confirmed or Rejected.
/// UnknownDocId if a verdict names a document outside the queue.
DiscoveryReport discovery_report(const Ranking& queue, std::span<const AnnotationRecord> verdicts);

/// Latest-round consensus per document id.
std::vector<std::pair<std::string, Consensus>> latest_consensus(std::span<const AnnotationRecord> records);

}  // namespace trawl
