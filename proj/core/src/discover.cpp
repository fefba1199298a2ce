#include "trawl/discover.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "trawl/error.hpp"
#include "trawl/parallel.hpp"

namespace trawl {

void assign_ranks(std::vector<RankedCandidate>& items) {
  std::sort(items.begin(), items.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  for (std::size_t i = 0; i < items.size(); ++i) items[i].rank = i + 1;
}

Ranking score_candidates(const Model& model, std::span<const DocumentRef> candidates,
                         const FrequencyTable& freq, unsigned jobs, std::size_t chunk) {
  if (model.meta.freq_fingerprint != freq.fingerprint())
    fail(ErrorCode::FingerprintMismatch, "model was trained against frequency table " +
                                             model.meta.freq_fingerprint + ", got " + freq.fingerprint());
  if (chunk == 0) chunk = 1;
  const std::string fp = model_fingerprint(model);

  struct Slot {
    std::optional<double> score;
    std::string reason;
  };
  std::vector<Slot> slots(candidates.size());
  for (std::size_t begin = 0; begin < candidates.size(); begin += chunk) {
    const std::size_t end = std::min(candidates.size(), begin + chunk);
    parallel_for(end - begin, jobs, [&](std::size_t k) {
      const std::size_t i = begin + k;
      Slot& s = slots[i];
      std::string text;
      try {
        text = read_text(candidates[i].text_path);
      } catch (const Error& e) {
        s.reason = std::string(to_string(e.code()));
        return;
      }
      const SparseVector x = vectorize_document(text, freq, model.meta.features, model.meta.min_count);
      if (x.empty()) {
        s.reason = "EmptyAfterFiltering";
        return;
      }
      s.score = predict_score(model, x).score;
    });
  }

  Ranking out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!seen.insert(c.id).second) fail(ErrorCode::DuplicateId, "duplicate candidate '" + c.id + "'");
    if (slots[i].score)
      out.ranked.push_back({c.id, *slots[i].score, 0, fp, c.century});
    else
      out.skipped.push_back({c.id, c.century, slots[i].reason});
  }
  assign_ranks(out.ranked);
  std::sort(out.skipped.begin(), out.skipped.end(),
            [](const SkippedCandidate& a, const SkippedCandidate& b) { return a.doc_id < b.doc_id; });
  return out;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) fail(ErrorCode::Io, "queue line " + std::to_string(line_no) + ": unterminated quote");
  return fields;
}

}  // namespace

std::string queue_csv(const Ranking& ranking, std::size_t top_n) {
  std::string out(kQueueHeader);
  out += '\n';
  char buf[64];
  const std::size_t n = std::min(top_n, ranking.ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = ranking.ranked[i];
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out += std::to_string(r.rank) + ',' + csv_field(r.doc_id) + ',' + buf + ',' +
           std::to_string(century_number(r.century)) + ',' + r.model_fingerprint + ",\n";
  }
  const std::string fp = ranking.ranked.empty() ? std::string() : ranking.ranked.front().model_fingerprint;
  for (const auto& s : ranking.skipped)
    out += "," + csv_field(s.doc_id) + ",," + std::to_string(century_number(s.century)) + ',' + fp + ',' +
           csv_field(s.reason) + '\n';
  return out;
}

void export_queue(const Ranking& ranking, const std::filesystem::path& path, std::size_t top_n) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + path.string());
  f << queue_csv(ranking, top_n);
  if (!f.flush()) fail(ErrorCode::Io, "write failed: " + path.string());
}

Ranking parse_queue(std::string_view csv) {
  Ranking out;
  std::size_t line_no = 0;
  bool header = true;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto f = split_csv_row(line, line_no);
    if (header) {
      header = false;
      if (f.size() < 5 || f[0] != "rank" || f[1] != "doc_id" || f[2] != "score" || f[3] != "century" ||
          f[4] != "model_fingerprint")
        fail(ErrorCode::Io, "queue header must start with rank,doc_id,score,century,model_fingerprint");
      continue;
    }
    if (f.size() < 5) fail(ErrorCode::Io, "queue line " + std::to_string(line_no) + ": expected 5 columns");
    const auto where = "queue line " + std::to_string(line_no) + ": ";
    long long cnum = 0;
    auto [p, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), cnum);
    const auto century = ec == std::errc{} ? century_from_number(cnum) : std::nullopt;
    if (!century) fail(ErrorCode::Io, where + "bad century '" + f[3] + "'");
    if (f[1].empty()) fail(ErrorCode::Io, where + "empty doc_id");
    if (f[0].empty()) {
      out.skipped.push_back({f[1], *century, f.size() > 5 ? f[5] : std::string()});
      continue;
    }
    RankedCandidate r;
    r.doc_id = f[1];
    r.century = *century;
    r.model_fingerprint = f[4];
    auto [p1, e1] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), r.rank);
    char* end = nullptr;
    r.score = std::strtod(f[2].c_str(), &end);
    if (e1 != std::errc{} || r.rank == 0 || end != f[2].c_str() + f[2].size() || !std::isfinite(r.score))
      fail(ErrorCode::Io, where + "bad rank or score");
    if (r.rank != out.ranked.size() + 1) fail(ErrorCode::Io, where + "ranks must be consecutive from 1");
    out.ranked.push_back(std::move(r));
  }
  return out;
}

Ranking load_queue(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::MissingArtifact, "cannot read queue " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_queue(ss.str());
}

std::vector<std::pair<std::string, Consensus>> latest_consensus(std::span<const AnnotationRecord> records) {
  std::map<std::string, std::map<std::int64_t, std::vector<Verdict>>> by_doc;
  for (const auto& r : records) by_doc[r.doc_id][r.round].push_back(r.verdict);
  std::vector<std::pair<std::string, Consensus>> out;
  out.reserve(by_doc.size());
  for (const auto& [id, rounds] : by_doc) out.emplace_back(id, resolve_consensus(rounds.rbegin()->second));
  return out;
}

DiscoveryReport discovery_report(const Ranking& queue, std::span<const AnnotationRecord> verdicts) {
  DiscoveryReport rep;
  rep.queue_size = queue.ranked.size();
  if (!queue.ranked.empty()) rep.century = queue.ranked.front().century;
  std::unordered_set<std::string> members;
  for (const auto& r : queue.ranked) members.insert(r.doc_id);
  for (const auto& v : verdicts)
    if (!members.count(v.doc_id)) fail(ErrorCode::UnknownDocId, "verdict for '" + v.doc_id + "' outside the queue");
  for (const auto& [id, c] : latest_consensus(verdicts)) {
    if (c == Consensus::Confirmed) {
      ++rep.evaluated_top_n;
      ++rep.confirmed;
    } else if (c == Consensus::Rejected) {
      ++rep.evaluated_top_n;
    }
  }
  rep.rate_defined = rep.evaluated_top_n > 0;
  rep.confirmation_rate =
      rep.rate_defined ? static_cast<double>(rep.confirmed) / static_cast<double>(rep.evaluated_top_n) : 0.0;
  return rep;
}

}  // namespace trawl
