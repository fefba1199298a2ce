#include "trawl/corpus.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "trawl/error.hpp"
#include "trawl/rng.hpp"

namespace trawl {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

DocumentRef parse_manifest_record(std::string_view line, std::size_t line_no,
                                  const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedLine, at_line(line_no) + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::MalformedLine, at_line(line_no) + "not a JSON object");

  auto require = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end() || it->is_null())
      fail(ErrorCode::MissingField, at_line(line_no) + "missing field '" + name + "'");
    return *it;
  };

  DocumentRef ref;
  const json& id = require("id");
  if (!id.is_string() || id.get_ref<const std::string&>().empty())
    fail(ErrorCode::InvalidField, at_line(line_no) + "id must be a non-empty string");
  ref.id = id.get<std::string>();

  const json& century = require("century");
  if (!century.is_number_integer())
    fail(ErrorCode::InvalidField, at_line(line_no) + "century must be an integer");
  auto c = century_from_number(century.get<long long>());
  if (!c) fail(ErrorCode::InvalidField, at_line(line_no) + "century must be one of 16..19");
  ref.century = *c;

  const json& path = require("text_path");
  if (!path.is_string()) fail(ErrorCode::InvalidField, at_line(line_no) + "text_path must be a string");
  fs::path p = path.get<std::string>();
  if (p.is_relative()) p = base_dir / p;
  ref.text_path = p.lexically_normal();

  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    auto label = it->is_string() ? label_from_string(it->get<std::string>()) : std::nullopt;
    if (!label)
      fail(ErrorCode::InvalidField,
           at_line(line_no) + "label must be \"travelogue\", \"non_travelogue\" or null");
    ref.label = label;
  }
  if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
    auto prov = it->is_string() ? provenance_from_string(it->get<std::string>()) : std::nullopt;
    if (!prov) fail(ErrorCode::InvalidField, at_line(line_no) + "unknown provenance");
    ref.provenance = *prov;
  }
  return ref;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
}

template <typename F>
void for_each_line(std::string_view content, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    f(content.substr(pos, end - pos), line_no);
    pos = end + 1;
  }
}

std::string slurp(const fs::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(code, "cannot read " + path.string());
  return std::move(ss).str();
}

}  // namespace

std::vector<DocumentRef> parse_manifest(std::string_view content, const fs::path& base_dir,
                                        bool check_files) {
  std::vector<DocumentRef> refs;
  std::unordered_set<std::string> seen;
  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    if (is_blank(line)) return;
    DocumentRef ref = parse_manifest_record(line, line_no, base_dir);
    if (!seen.insert(ref.id).second)
      fail(ErrorCode::DuplicateId, at_line(line_no) + "duplicate id '" + ref.id + "'");
    if (check_files) {
      std::ifstream probe(ref.text_path, std::ios::binary);
      if (!probe)
        fail(ErrorCode::UnreadableText,
             at_line(line_no) + "text_path not readable: " + ref.text_path.string());
    }
    refs.push_back(std::move(ref));
  });
  return refs;
}

std::vector<DocumentRef> load_manifest(const fs::path& path) {
  const std::string content = slurp(path, ErrorCode::Io);
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_manifest(content, fs::absolute(base), true);
}

std::string manifest_line(const DocumentRef& ref) {
  ordered_json j;
  j["id"] = ref.id;
  j["century"] = century_number(ref.century);
  j["text_path"] = ref.text_path.string();
  j["label"] = ref.label ? json(std::string(to_string(*ref.label))) : json(nullptr);
  j["provenance"] = std::string(to_string(ref.provenance));
  return j.dump();
}

void save_manifest(const fs::path& path, std::span<const DocumentRef> refs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& r : refs) out << manifest_line(r) << '\n';
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

CorpusPartition partition(std::span<const DocumentRef> refs, Century century) {
  CorpusPartition p;
  p.century = century;
  for (const auto& r : refs) {
    if (r.century != century) continue;
    if (!r.label) {
      p.candidates.push_back(r);
    } else if (is_positive(*r.label)) {
      p.positives.push_back(r);
    } else {
      p.negatives.push_back(r);
    }
  }
  return p;
}

std::vector<DocumentRef> sample_negatives(const CorpusPartition& p, std::size_t n,
                                          std::uint64_t seed) {
  if (n > p.candidates.size())
    fail(ErrorCode::InsufficientCandidates,
         "requested " + std::to_string(n) + " negatives, " + std::to_string(p.candidates.size()) +
             " candidates available");
  std::vector<std::size_t> order(p.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  std::vector<DocumentRef> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
    DocumentRef ref = p.candidates[order[i]];
    ref.provenance = Provenance::RandomSample;
    out.push_back(std::move(ref));
  }
  return out;
}

std::size_t negative_deficit(const CorpusPartition& p) {
  return p.positives.size() > p.negatives.size() ? p.positives.size() - p.negatives.size() : 0;
}

CorpusPartition apply_annotations(const CorpusPartition& p,
                                  std::span<const AnnotationRecord> records) {
  CorpusPartition out = p;

  std::unordered_set<std::string> known;
  for (const auto* list : {&p.positives, &p.negatives, &p.candidates})
    for (const auto& r : *list) known.insert(r.id);

  // round -> doc -> annotator -> verdict
  std::map<std::int64_t, std::map<std::string, std::map<std::string, Verdict>>> rounds;
  for (const auto& rec : records) {
    if (!known.count(rec.doc_id)) fail(ErrorCode::UnknownDocId, "unknown doc id '" + rec.doc_id + "'");
    auto& by_annotator = rounds[rec.round][rec.doc_id];
    auto [it, inserted] = by_annotator.emplace(rec.annotator, rec.verdict);
    if (!inserted && it->second != rec.verdict)
      fail(ErrorCode::ConflictingVerdicts, "annotator '" + rec.annotator + "' gave two verdicts for '" +
                                               rec.doc_id + "' in round " + std::to_string(rec.round));
  }

  auto take = [&](const std::string& id) -> DocumentRef {
    for (auto* list : {&out.positives, &out.negatives, &out.candidates}) {
      auto it = std::find_if(list->begin(), list->end(), [&](const DocumentRef& r) { return r.id == id; });
      if (it != list->end()) {
        DocumentRef ref = std::move(*it);
        list->erase(it);
        return ref;
      }
    }
    fail(ErrorCode::UnknownDocId, "unknown doc id '" + id + "'");
  };

  for (const auto& [round, docs] : rounds) {
    for (const auto& [doc_id, by_annotator] : docs) {
      std::vector<Verdict> verdicts;
      for (const auto& [annotator, v] : by_annotator) verdicts.push_back(v);
      const Consensus c = resolve_consensus(verdicts);
      if (c == Consensus::Disputed)
        fail(ErrorCode::ConflictingVerdicts,
             "confirm and reject for '" + doc_id + "' in round " + std::to_string(round));
      if (c == Consensus::Confirmed) {
        DocumentRef ref = take(doc_id);
        ref.label = Label::Travelogue;
        out.positives.push_back(std::move(ref));
      } else if (c == Consensus::Rejected) {
        DocumentRef ref = take(doc_id);
        ref.label = Label::NonTravelogue;
        out.negatives.push_back(std::move(ref));
      }
    }
  }
  return out;
}

Consensus resolve_consensus(std::span<const Verdict> verdicts) {
  bool confirm = false, reject = false, uncertain = false;
  for (Verdict v : verdicts) {
    confirm |= v == Verdict::Confirm;
    reject |= v == Verdict::Reject;
    uncertain |= v == Verdict::Uncertain;
  }
  if (confirm && reject) return Consensus::Disputed;
  if (confirm) return Consensus::Confirmed;
  if (reject) return Consensus::Rejected;
  if (uncertain) return Consensus::Uncertain;
  return Consensus::None;
}

std::string_view to_string(Consensus c) {
  switch (c) {
    case Consensus::None: return "none";
    case Consensus::Confirmed: return "confirmed";
    case Consensus::Rejected: return "rejected";
    case Consensus::Uncertain: return "uncertain";
    case Consensus::Disputed: return "disputed";
  }
  return "none";
}

std::string format_utc(std::chrono::sys_seconds t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<std::chrono::sys_seconds> parse_utc(std::string_view s) {
  int y, mo, d, h, mi, sec;
  char z = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &z) != 7 || z != 'Z')
    return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) return std::nullopt;
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{sec};
}

std::string annotation_line(const AnnotationRecord& r) {
  ordered_json j;
  j["doc_id"] = r.doc_id;
  j["verdict"] = std::string(to_string(r.verdict));
  j["annotator"] = r.annotator;
  j["timestamp"] = format_utc(r.timestamp);
  j["round"] = r.round;
  return j.dump();
}

AnnotationRecord parse_annotation_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedLine, at_line(line_no) + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::MalformedLine, at_line(line_no) + "not a JSON object");
  for (const char* name : {"doc_id", "verdict", "annotator", "timestamp", "round"})
    if (!j.contains(name) || j[name].is_null())
      fail(ErrorCode::MissingField, at_line(line_no) + "missing field '" + name + "'");

  AnnotationRecord r;
  if (!j["doc_id"].is_string() || !j["annotator"].is_string() || !j["verdict"].is_string() ||
      !j["timestamp"].is_string() || !j["round"].is_number_integer())
    fail(ErrorCode::InvalidField, at_line(line_no) + "field has wrong type");
  r.doc_id = j["doc_id"].get<std::string>();
  r.annotator = j["annotator"].get<std::string>();
  auto v = verdict_from_string(j["verdict"].get<std::string>());
  if (!v) fail(ErrorCode::InvalidField, at_line(line_no) + "unknown verdict");
  r.verdict = *v;
  auto ts = parse_utc(j["timestamp"].get<std::string>());
  if (!ts) fail(ErrorCode::InvalidField, at_line(line_no) + "timestamp must be YYYY-MM-DDTHH:MM:SSZ");
  r.timestamp = *ts;
  r.round = j["round"].get<std::int64_t>();
  if (r.round < 0) fail(ErrorCode::InvalidField, at_line(line_no) + "round must be >= 0");
  return r;
}

std::vector<AnnotationRecord> load_annotation_log(const fs::path& path) {
  std::vector<AnnotationRecord> out;
  if (!fs::exists(path)) return out;
  const std::string content = slurp(path, ErrorCode::Io);
  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    if (!is_blank(line)) out.push_back(parse_annotation_line(line, line_no));
  });
  return out;
}

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto len = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

std::string read_text(const fs::path& path) {
  std::string text = slurp(path, ErrorCode::UnreadableText);
  if (!is_valid_utf8(text)) fail(ErrorCode::InvalidUtf8, "invalid UTF-8 in " + path.string());
  return text;
}

}  // namespace trawl
