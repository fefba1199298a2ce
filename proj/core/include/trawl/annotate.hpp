#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "trawl/corpus.hpp"
#include "trawl/discover.hpp"
#include "trawl/error.hpp"

namespace trawl {

struct QueueItem {
  RankedCandidate candidate;
  std::string text_excerpt;
  bool full_text_available = false;
  std::optional<Verdict> current_verdict;  // consensus of the latest round; empty if none or disputed
  bool disputed = false;
  std::vector<AnnotationRecord> verdicts;  // every record for the document, log order
};

struct QueuePage {
  Century century = Century::C16;
  std::size_t offset = 0;
  std::size_t total = 0;
  std::vector<QueueItem> items;
};

struct Progress {
  Century century = Century::C16;
  std::size_t queue_size = 0;
  std::size_t evaluated = 0;  // decisive consensus: confirmed + rejected
  std::size_t confirmed = 0;
  std::size_t rejected = 0;
  std::size_t disputed = 0;
  std::size_t uncertain = 0;
  std::size_t remaining = 0;  // queue_size - evaluated
  double confirmation_rate = 0.0;
  bool rate_defined = false;

  bool operator==(const Progress&) const = default;
};

struct PostResult {
  enum class Status { Created, Duplicate, Conflict };
  Status status = Status::Created;
  AnnotationRecord record;  // the stored record; for Conflict the existing one
};

struct GroundTruthExport {
  std::string manifest;                     // JSON Lines, one labeled document per line
  std::vector<std::string> disagreements;  // doc ids with opposing verdicts in the round
};

struct ServiceOptions {
  std::map<Century, std::filesystem::path> queues;
  std::vector<DocumentRef> documents;  // text locations for queue members
  std::filesystem::path annotation_log;
  std::int64_t round = 0;
  std::size_t excerpt_chars = 4000;
  std::function<std::chrono::sys_seconds()> clock;  // defaults to the system clock
};

/// State behind the review API: review queues, document texts and the
/// append-only annotation log. Readers run concurrently; verdicts go through
/// a single appender and are fsync'ed before post_verdict returns.
class AnnotationService {
 public:
  explicit AnnotationService(ServiceOptions opts);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  /// NoQueueForCentury when no queue file was loaded for the century.
  QueuePage get_queue(Century c, std::size_t offset, std::size_t limit) const;
  /// UnknownDocId unless the document is in a loaded queue.
  PostResult post_verdict(const std::string& doc_id, Verdict verdict, const std::string& annotator);
  /// Path of a queue member's text; UnknownDocId otherwise.
  std::filesystem::path text_path(const std::string& doc_id) const;
  Progress get_progress(Century c) const;
  GroundTruthExport export_ground_truth(std::int64_t round) const;

  std::vector<Century> centuries() const;
  std::vector<AnnotationRecord> records() const;
  std::int64_t round() const { return opts_.round; }

 private:
  struct Member {
    Century century;
    std::size_t index;  // position in its queue
  };

  void replay();
  std::vector<const AnnotationRecord*> records_for(const std::string& doc_id) const;

  ServiceOptions opts_;
  std::map<Century, Ranking> queues_;
  std::unordered_map<std::string, Member> members_;
  std::unordered_map<std::string, DocumentRef> docs_;
  std::vector<AnnotationRecord> records_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_doc_;
  mutable std::shared_mutex mu_;
  int log_fd_ = -1;
};

/// First `max_chars` code points of a file, cut at a character boundary.
/// Stops early at the first malformed byte sequence.
std::string read_excerpt(const std::filesystem::path& path, std::size_t max_chars);

/// HTTP front end (JSON API plus static files).
class AnnotationServer {
 public:
  AnnotationServer(AnnotationService& service, std::filesystem::path ui_dir = {});
  ~AnnotationServer();

  /// Binds; port 0 picks a free one. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Status class for an error code in the HTTP API.
int http_status(ErrorCode code);

}  // namespace trawl
