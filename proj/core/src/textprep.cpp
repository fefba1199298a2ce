#include "trawl/textprep.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "trawl/error.hpp"
#include "trawl/hash.hpp"

namespace trawl {
namespace {

bool is_alnum(UChar32 c) { return c >= 0 && u_isalnum(c); }

bool is_mark(UChar32 c) {
  if (c < 0) return false;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & U_GC_M_MASK) != 0;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto len = static_cast<std::int64_t>(text.size());

  std::string current;
  std::size_t alnum = 0;
  auto flush = [&] {
    if (alnum >= 2) out.tokens.push_back(std::move(current));
    current.clear();
    alnum = 0;
  };

  // ICU's macros take int32 lengths; walk in windows for very large inputs.
  constexpr std::int64_t kWindow = std::int64_t{1} << 30;
  std::int64_t base = 0;
  while (base < len) {
    const auto window = static_cast<std::int32_t>(std::min(kWindow, len - base));
    std::int32_t i = 0;
    while (i < window) {
      UChar32 c;
      const std::int32_t start = i;
      U8_NEXT(p + base, i, window, c);
      if (c < 0 && i == window && window < len - base) {
        // sequence split across the window edge; resume there
        i = start;
        break;
      }
      if (is_alnum(c)) {
        append_utf8(current, u_tolower(c));
        ++alnum;
      } else if (is_mark(c) && !current.empty()) {
        append_utf8(current, c);
      } else {
        flush();
      }
    }
    base += i;
    if (i == 0) break;
  }
  flush();
  return out;
}

std::size_t count_alphanumeric(std::string_view token) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(token.data());
  const auto len = static_cast<std::int32_t>(token.size());
  std::size_t n = 0;
  for (std::int32_t i = 0; i < len;) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    n += is_alnum(c) ? 1 : 0;
  }
  return n;
}

void FrequencyTable::add(const TokenStream& doc) {
  for (const auto& t : doc.tokens) add_token(t);
  ++docs_;
}

void FrequencyTable::add_token(std::string_view token, std::uint64_t count) {
  if (count == 0) return;
  auto it = counts_.find(token);
  if (it == counts_.end()) {
    counts_.emplace(std::string(token), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [token, c] : other.counts_) add_token(token, c);
  docs_ += other.docs_;
}

std::uint64_t FrequencyTable::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> FrequencyTable::sorted() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string FrequencyTable::fingerprint() const {
  Xxh64Stream h;
  for (const auto& [token, c] : sorted()) {
    h.update(token);
    h.update("\t");
    h.update(std::to_string(c));
    h.update("\n");
  }
  return to_hex(h.digest());
}

void FrequencyTable::save_tsv(const std::filesystem::path& path,
                              std::span<const std::string> header) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& line : header) out << "# " << line << '\n';
  out << "# docs\t" << docs_ << '\n';
  for (const auto& [token, c] : sorted()) out << token << '\t' << c << '\n';
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

FrequencyTable FrequencyTable::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  FrequencyTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# docs\t", 0) == 0) t.docs_ = std::stoull(line.substr(7));
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      fail(ErrorCode::MalformedLine, path.string() + ": line " + std::to_string(line_no));
    std::uint64_t c = 0;
    try {
      c = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::MalformedLine, path.string() + ": line " + std::to_string(line_no));
    }
    t.add_token(std::string_view(line).substr(0, tab), c);
  }
  return t;
}

FrequencyTable build_frequency_table(std::span<const TokenStream> docs) {
  FrequencyTable t;
  for (const auto& d : docs) t.add(d);
  return t;
}

TokenStream filter_rare(const TokenStream& stream, const FrequencyTable& table,
                        std::uint64_t min_count) {
  TokenStream out;
  out.tokens.reserve(stream.tokens.size());
  for (const auto& t : stream.tokens)
    if (table.count(t) >= min_count) out.tokens.push_back(t);
  return out;
}

std::uint64_t CorpusStats::average_tokens() const {
  if (doc_count == 0) fail(ErrorCode::EmptyCorpus, "no documents");
  return total_tokens / doc_count;
}

CorpusStats corpus_stats(std::span<const TokenStream> docs) {
  if (docs.empty()) fail(ErrorCode::EmptyCorpus, "no documents");
  CorpusStats s;
  s.doc_count = docs.size();
  for (const auto& d : docs) s.total_tokens += d.tokens.size();
  return s;
}

}  // namespace trawl
