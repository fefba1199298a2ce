#include "trawl/annotate.hpp"

#include <fcntl.h>
#include <unicode/utf8.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "trawl/error.hpp"

namespace trawl {
namespace fs = std::filesystem;

std::string read_excerpt(const fs::path& path, std::size_t max_chars) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::UnreadableText, "cannot read " + path.string());
  // at most 4 bytes per code point
  std::string buf(std::min<std::size_t>(max_chars, 1u << 24) * 4, '\0');
  f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(f.gcount()));

  const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data());
  const auto len = static_cast<std::int32_t>(buf.size());
  std::int32_t i = 0;
  std::size_t chars = 0;
  while (i < len && chars < max_chars) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) {
      i = start;
      break;
    }
    ++chars;
  }
  buf.resize(static_cast<std::size_t>(i));
  return buf;
}

AnnotationService::AnnotationService(ServiceOptions opts) : opts_(std::move(opts)) {
  if (!opts_.clock)
    opts_.clock = [] { return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()); };
  for (const auto& [c, path] : opts_.queues) {
    Ranking q = load_queue(path);
    for (std::size_t i = 0; i < q.ranked.size(); ++i) {
      if (q.ranked[i].century != c)
        fail(ErrorCode::Io, path.string() + ": row for century " + std::to_string(century_number(q.ranked[i].century)));
      if (!members_.emplace(q.ranked[i].doc_id, Member{c, i}).second)
        fail(ErrorCode::DuplicateId, "document '" + q.ranked[i].doc_id + "' appears in two queues");
    }
    queues_.emplace(c, std::move(q));
  }
  for (const auto& d : opts_.documents) docs_.emplace(d.id, d);
  replay();
}

AnnotationService::~AnnotationService() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

void AnnotationService::replay() {
  const auto& path = opts_.annotation_log;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  log_fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (log_fd_ < 0) fail(ErrorCode::Io, "cannot open annotation log " + path.string() + ": " + std::strerror(errno));

  std::string content;
  {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    content = ss.str();
  }
  // A line without its newline was never acknowledged; drop the torn tail.
  const auto last_nl = content.rfind('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != content.size()) {
    if (::ftruncate(log_fd_, static_cast<off_t>(keep)) != 0)
      fail(ErrorCode::Io, "cannot truncate torn annotation log tail: " + std::string(std::strerror(errno)));
    content.resize(keep);
  }
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    AnnotationRecord r = parse_annotation_line(line, line_no);
    by_doc_[r.doc_id].push_back(records_.size());
    records_.push_back(std::move(r));
  }
}

std::vector<const AnnotationRecord*> AnnotationService::records_for(const std::string& doc_id) const {
  std::vector<const AnnotationRecord*> out;
  auto it = by_doc_.find(doc_id);
  if (it != by_doc_.end())
    for (auto i : it->second) out.push_back(&records_[i]);
  return out;
}

namespace {

/// Consensus of the latest round that has records.
Consensus latest(const std::vector<const AnnotationRecord*>& recs) {
  if (recs.empty()) return Consensus::None;
  std::int64_t round = recs.front()->round;
  for (const auto* r : recs) round = std::max(round, r->round);
  std::vector<Verdict> v;
  for (const auto* r : recs)
    if (r->round == round) v.push_back(r->verdict);
  return resolve_consensus(v);
}

}  // namespace

QueuePage AnnotationService::get_queue(Century c, std::size_t offset, std::size_t limit) const {
  std::shared_lock lock(mu_);
  auto it = queues_.find(c);
  if (it == queues_.end())
    fail(ErrorCode::NoQueueForCentury, "no review queue for century " + std::to_string(century_number(c)));
  const auto& ranked = it->second.ranked;
  QueuePage page;
  page.century = c;
  page.offset = offset;
  page.total = ranked.size();
  const std::size_t end = offset >= ranked.size() ? offset : std::min(ranked.size(), offset + limit);
  for (std::size_t i = offset; i < end; ++i) {
    QueueItem item;
    item.candidate = ranked[i];
    auto d = docs_.find(ranked[i].doc_id);
    if (d != docs_.end()) {
      try {
        item.text_excerpt = read_excerpt(d->second.text_path, opts_.excerpt_chars);
        item.full_text_available = true;
      } catch (const Error&) {
        item.full_text_available = false;
      }
    }
    const auto recs = records_for(ranked[i].doc_id);
    for (const auto* r : recs) item.verdicts.push_back(*r);
    switch (latest(recs)) {
      case Consensus::Confirmed: item.current_verdict = Verdict::Confirm; break;
      case Consensus::Rejected: item.current_verdict = Verdict::Reject; break;
      case Consensus::Uncertain: item.current_verdict = Verdict::Uncertain; break;
      case Consensus::Disputed: item.disputed = true; break;
      case Consensus::None: break;
    }
    page.items.push_back(std::move(item));
  }
  return page;
}

PostResult AnnotationService::post_verdict(const std::string& doc_id, Verdict verdict, const std::string& annotator) {
  if (annotator.empty() || annotator.find_first_not_of(" \t") == std::string::npos)
    fail(ErrorCode::InvalidArgument, "annotator must not be empty");
  std::unique_lock lock(mu_);
  if (!members_.count(doc_id)) fail(ErrorCode::UnknownDocId, "document '" + doc_id + "' is not in a review queue");
  for (const auto* r : records_for(doc_id)) {
    if (r->annotator == annotator && r->round == opts_.round) {
      if (r->verdict == verdict) return {PostResult::Status::Duplicate, *r};
      return {PostResult::Status::Conflict, *r};
    }
  }
  AnnotationRecord rec{doc_id, verdict, annotator, opts_.clock(), opts_.round};
  const std::string line = annotation_line(rec) + "\n";
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(log_fd_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::Io, std::string("annotation log write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(log_fd_) != 0) fail(ErrorCode::Io, std::string("annotation log fsync failed: ") + std::strerror(errno));
  by_doc_[doc_id].push_back(records_.size());
  records_.push_back(rec);
  return {PostResult::Status::Created, rec};
}

fs::path AnnotationService::text_path(const std::string& doc_id) const {
  std::shared_lock lock(mu_);
  if (!members_.count(doc_id)) fail(ErrorCode::UnknownDocId, "document '" + doc_id + "' is not in a review queue");
  auto d = docs_.find(doc_id);
  if (d == docs_.end()) fail(ErrorCode::UnknownDocId, "no text known for '" + doc_id + "'");
  return d->second.text_path;
}

Progress AnnotationService::get_progress(Century c) const {
  std::shared_lock lock(mu_);
  auto it = queues_.find(c);
  if (it == queues_.end())
    fail(ErrorCode::NoQueueForCentury, "no review queue for century " + std::to_string(century_number(c)));
  Progress p;
  p.century = c;
  p.queue_size = it->second.ranked.size();
  for (const auto& r : it->second.ranked) {
    switch (latest(records_for(r.doc_id))) {
      case Consensus::Confirmed: ++p.confirmed; break;
      case Consensus::Rejected: ++p.rejected; break;
      case Consensus::Disputed: ++p.disputed; break;
      case Consensus::Uncertain: ++p.uncertain; break;
      case Consensus::None: break;
    }
  }
  p.evaluated = p.confirmed + p.rejected;
  p.remaining = p.queue_size - p.evaluated;
  p.rate_defined = p.evaluated > 0;
  p.confirmation_rate = p.rate_defined ? static_cast<double>(p.confirmed) / static_cast<double>(p.evaluated) : 0.0;
  return p;
}

GroundTruthExport AnnotationService::export_ground_truth(std::int64_t round) const {
  std::shared_lock lock(mu_);
  std::map<std::string, std::vector<Verdict>> in_round;  // sorted by id
  for (const auto& r : records_)
    if (r.round == round) in_round[r.doc_id].push_back(r.verdict);
  GroundTruthExport out;
  for (const auto& [id, verdicts] : in_round) {
    const Consensus c = resolve_consensus(verdicts);
    if (c == Consensus::Disputed) {
      out.disagreements.push_back(id);
      continue;
    }
    if (c != Consensus::Confirmed && c != Consensus::Rejected) continue;
    DocumentRef ref;
    ref.id = id;
    ref.century = members_.at(id).century;
    auto d = docs_.find(id);
    ref.text_path = d != docs_.end() ? fs::absolute(d->second.text_path) : fs::path();
    ref.label = c == Consensus::Confirmed ? Label::Travelogue : Label::NonTravelogue;
    ref.provenance = Provenance::ModelDiscovery;
    out.manifest += manifest_line(ref) + "\n";
  }
  return out;
}

std::vector<Century> AnnotationService::centuries() const {
  std::vector<Century> out;
  for (const auto& [c, _] : queues_) out.push_back(c);
  return out;
}

std::vector<AnnotationRecord> AnnotationService::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDocId:
    case ErrorCode::NoQueueForCentury:
    case ErrorCode::MissingArtifact:
      return 404;
    case ErrorCode::ConflictingVerdicts:
      return 409;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidField:
    case ErrorCode::MissingField:
    case ErrorCode::MalformedLine:
      return 400;
    default:
      return 500;
  }
}

}  // namespace trawl
