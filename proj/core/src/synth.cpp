#include "trawl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "trawl/corpus.hpp"
#include "trawl/error.hpp"
#include "trawl/parallel.hpp"
#include "trawl/rng.hpp"

namespace trawl {
namespace {

constexpr const char* kOnsets[] = {"b",  "d",  "f",  "g",   "h",  "k",  "l",  "m",  "n",  "p",
                                   "r",  "s",  "t",  "w",   "z",  "sch", "st", "br", "gr", "kr",
                                   "fl", "pf", "tr", "sp",  "ch", "str", "bl", "dr", "v",  "j"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ä", "ö", "ü", "au", "ei", "ie", "eu"};
constexpr const char* kCodas[] = {"",  "",   "n",  "r",  "s",  "t",  "l",  "ch", "ß",
                                  "ng", "nd", "rt", "st", "ck", "tz", "m",  "lt", "rn"};
constexpr const char* kNoiseChars[] = {"i", "l", "1", "r", "n", "m", "c", "e", "ſ", "ii", "0", "3", "8", "tz"};

template <typename T, std::size_t N>
const T& pick(Rng& rng, const T (&arr)[N]) {
  return arr[rng.below(N)];
}

std::string make_word(Rng& rng) {
  std::string w;
  const auto syllables = 1 + rng.below(3);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += pick(rng, kOnsets);
    w += pick(rng, kVowels);
    w += pick(rng, kCodas);
  }
  return w;
}

/// Cumulative Zipf weights over ranks 1..n.
std::vector<double> zipf_cdf(std::size_t n, double s) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
    cdf[r] = acc;
  }
  for (auto& c : cdf) c /= acc;
  return cdf;
}

std::size_t draw(Rng& rng, const std::vector<double>& cdf) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::string noise_token(Rng& rng) {
  std::string t;
  const auto n = 1 + rng.below(4);
  for (std::uint64_t i = 0; i < n; ++i) t += pick(rng, kNoiseChars);
  return t;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + p.string());
  f << content;
  if (!f.flush()) fail(ErrorCode::Io, "write failed: " + p.string());
}

}  // namespace

void SynthConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::ConfigError, "synth: " + m); };
  if (centuries.empty()) bad("at least one century");
  if (docs_per_class < 2) bad("docs_per_class must be >= 2");
  if (tokens_per_doc < 10) bad("tokens_per_doc must be >= 10");
  if (!(length_jitter >= 0.0 && length_jitter < 1.0)) bad("length_jitter must be in [0, 1)");
  if (topic_vocab < 10 || background_vocab < 10) bad("vocabularies need >= 10 words");
  if (!(shared_fraction >= 0.0 && shared_fraction < 1.0)) bad("shared_fraction must be in [0, 1)");
  for (double r : {background_rate, subtopic_rate, noise_rate})
    if (!(r >= 0.0 && r <= 1.0)) bad("rates must be in [0, 1]");
  if (background_rate + noise_rate >= 1.0) bad("background_rate + noise_rate must leave room for topic tokens");
  if (subtopics == 0) bad("subtopics must be >= 1");
  if (zipf_exponent <= 0.0) bad("zipf_exponent must be > 0");
  if (planted > candidates) bad("planted must not exceed candidates");
}

SynthVocabulary build_vocabulary(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0x766f6361));
  const auto shared = static_cast<std::size_t>(std::llround(cfg.shared_fraction * cfg.topic_vocab));
  const std::size_t own = cfg.topic_vocab - shared;
  const std::size_t needed = cfg.background_vocab + shared + 2 * own;

  std::set<std::string> seen;
  std::vector<std::string> words;
  words.reserve(needed);
  while (words.size() < needed) {
    auto w = make_word(rng);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }

  SynthVocabulary v;
  v.shared = shared;
  auto it = words.begin();
  v.background.assign(it, it + cfg.background_vocab);
  it += cfg.background_vocab;
  for (auto& t : v.topic) t.assign(it, it + static_cast<std::ptrdiff_t>(shared));
  it += static_cast<std::ptrdiff_t>(shared);
  for (auto& t : v.topic) {
    t.insert(t.end(), it, it + static_cast<std::ptrdiff_t>(own));
    it += static_cast<std::ptrdiff_t>(own);
  }
  // interleave shared and own words across Zipf ranks
  for (int c = 0; c < 2; ++c) {
    Rng r(derive_seed(cfg.seed, 0x72616e6b, c));
    r.shuffle(std::span(v.topic[c]));
  }
  return v;
}

std::string synth_document(const SynthVocabulary& vocab, const SynthConfig& cfg, Label label,
                           std::uint64_t seed) {
  Rng rng(seed);
  const auto& topic = vocab.topic[is_positive(label) ? 1 : 0];
  const auto length = static_cast<std::size_t>(
      std::max(1.0, std::round(cfg.tokens_per_doc * rng.uniform(1.0 - cfg.length_jitter, 1.0 + cfg.length_jitter))));

  // the cdfs are cheap relative to a 2k-token document but shared per call
  const auto bg_cdf = zipf_cdf(vocab.background.size(), cfg.zipf_exponent);
  const auto topic_cdf = zipf_cdf(topic.size(), cfg.zipf_exponent);
  const std::size_t slice_len = std::max<std::size_t>(1, topic.size() / cfg.subtopics);
  const auto slice_cdf = zipf_cdf(slice_len, cfg.zipf_exponent);
  const std::size_t slice = static_cast<std::size_t>(rng.below(cfg.subtopics));
  const std::size_t slice_begin = std::min(slice * slice_len, topic.size() - slice_len);

  std::string text;
  text.reserve(length * 8);
  bool sentence_start = true;
  for (std::size_t i = 0; i < length; ++i) {
    const double u = rng.uniform();
    std::string word;
    if (u < cfg.noise_rate) {
      word = noise_token(rng);
    } else if (u < cfg.noise_rate + cfg.background_rate) {
      word = vocab.background[draw(rng, bg_cdf)];
    } else if (rng.uniform() < cfg.subtopic_rate) {
      word = topic[slice_begin + draw(rng, slice_cdf)];
    } else {
      word = topic[draw(rng, topic_cdf)];
    }
    if (sentence_start && !word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
    sentence_start = false;
    text += word;
    const auto p = rng.below(100);
    if (p < 6) {
      text += ". ";
      sentence_start = true;
    } else if (p < 10) {
      text += ", ";
    } else if (p < 12) {
      text += '\n';
    } else {
      text += ' ';
    }
  }
  text += ".\n";
  return text;
}

SynthResult generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path texts = out_dir / "texts";
  fs::create_directories(texts);
  const SynthVocabulary vocab = build_vocabulary(cfg);

  struct Job {
    DocumentRef ref;
    Label truth;
    std::uint64_t seed;
  };
  std::vector<Job> jobs_list;
  char id[64];
  for (Century c : cfg.centuries) {
    const int cn = century_number(c);
    for (int cls = 1; cls >= 0; --cls)
      for (std::uint32_t i = 0; i < cfg.docs_per_class; ++i) {
        std::snprintf(id, sizeof id, "c%d-%s-%04u", cn, cls ? "pos" : "neg", i);
        DocumentRef r{id, c, fs::path("texts") / (std::string(id) + ".txt"), static_cast<Label>(cls),
                      cls ? Provenance::KeywordSearch : Provenance::RandomSample};
        jobs_list.push_back({r, static_cast<Label>(cls), derive_seed(cfg.seed, cn, jobs_list.size())});
      }
    // planted positives sit at random candidate slots
    std::vector<std::uint8_t> planted(cfg.candidates, 0);
    std::fill(planted.begin(), planted.begin() + cfg.planted, std::uint8_t{1});
    Rng rng(derive_seed(cfg.seed, 0x706c616e, cn));
    rng.shuffle(std::span(planted));
    for (std::uint32_t i = 0; i < cfg.candidates; ++i) {
      std::snprintf(id, sizeof id, "c%d-cand-%04u", cn, i);
      DocumentRef r{id, c, fs::path("texts") / (std::string(id) + ".txt"), std::nullopt, Provenance::KeywordSearch};
      const Label truth = planted[i] ? Label::Travelogue : Label::NonTravelogue;
      jobs_list.push_back({r, truth, derive_seed(cfg.seed, cn, jobs_list.size())});
    }
  }

  parallel_for(jobs_list.size(), jobs, [&](std::size_t i) {
    const auto& j = jobs_list[i];
    write_file(out_dir / j.ref.text_path, synth_document(vocab, cfg, j.truth, j.seed));
  });

  std::string manifest, truth = "doc_id,label\n";
  for (const auto& j : jobs_list) {
    manifest += manifest_line(j.ref) + "\n";
    if (!j.ref.label) truth += j.ref.id + "," + std::string(to_string(j.truth)) + "\n";
  }
  SynthResult res;
  res.manifest = out_dir / "manifest.jsonl";
  res.truth = out_dir / "candidates_truth.csv";
  res.documents = jobs_list.size();
  write_file(res.manifest, manifest);
  write_file(res.truth, truth);
  return res;
}

std::vector<std::pair<std::string, Label>> load_candidate_truth(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::MissingArtifact, "cannot read " + path.string());
  std::vector<std::pair<std::string, Label>> out;
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto label = comma == std::string::npos ? std::nullopt : label_from_string(line.substr(comma + 1));
    if (!label) fail(ErrorCode::Io, "bad truth row: " + line);
    out.emplace_back(line.substr(0, comma), *label);
  }
  return out;
}

}  // namespace trawl
