#include <gtest/gtest.h>

#include <set>

#include "testing.hpp"
#include "trawl/corpus.hpp"
#include "trawl/error.hpp"
#include "trawl/synth.hpp"
#include "trawl/textprep.hpp"

using namespace trawl;
using trawl::testkit::error_code;
using trawl::testkit::TempDir;

namespace {

SynthConfig tiny() {
  SynthConfig c;
  c.docs_per_class = 6;
  c.tokens_per_doc = 200;
  c.topic_vocab = 100;
  c.background_vocab = 200;
  c.candidates = 10;
  c.planted = 3;
  return c;
}

}  // namespace

TEST(SynthVocabulary, SharedPrefixAndDistinctWords) {
  const auto cfg = tiny();
  const auto v = build_vocabulary(cfg);
  EXPECT_EQ(v.topic[0].size(), cfg.topic_vocab);
  EXPECT_EQ(v.topic[1].size(), cfg.topic_vocab);
  EXPECT_EQ(v.shared, static_cast<std::size_t>(cfg.shared_fraction * cfg.topic_vocab));
  std::set<std::string> t0(v.topic[0].begin(), v.topic[0].end()), t1(v.topic[1].begin(), v.topic[1].end());
  std::size_t common = 0;
  for (const auto& w : t0) common += t1.count(w);
  EXPECT_EQ(common, v.shared);
  for (const auto& w : v.background) EXPECT_GE(count_alphanumeric(w), 2u);
}

TEST(SynthDocument, DeterministicValidUtf8) {
  const auto cfg = tiny();
  const auto v = build_vocabulary(cfg);
  const auto a = synth_document(v, cfg, Label::Travelogue, 99);
  EXPECT_EQ(a, synth_document(v, cfg, Label::Travelogue, 99));
  EXPECT_NE(a, synth_document(v, cfg, Label::Travelogue, 100));
  EXPECT_TRUE(is_valid_utf8(a));
  const auto n = tokenize(a).tokens.size();
  EXPECT_GT(n, 100u);
  EXPECT_LT(n, 300u);
}

TEST(GenerateCorpus, WritesLoadableManifestAndTruth) {
  TempDir dir;
  const auto cfg = tiny();
  const auto r = generate_corpus(cfg, dir.path(), 2);
  EXPECT_EQ(r.documents, 22u);
  const auto refs = load_manifest(r.manifest);
  const auto p = partition(refs, Century::C17);
  EXPECT_EQ(p.positives.size(), 6u);
  EXPECT_EQ(p.negatives.size(), 6u);
  EXPECT_EQ(p.candidates.size(), 10u);
  const auto truth = load_candidate_truth(r.truth);
  ASSERT_EQ(truth.size(), 10u);
  EXPECT_EQ(std::count_if(truth.begin(), truth.end(), [](const auto& t) { return is_positive(t.second); }), 3);

  TempDir again;
  generate_corpus(cfg, again.path(), 1);
  EXPECT_EQ(trawl::testkit::read_file(again / "manifest.jsonl").size(),
            trawl::testkit::read_file(dir / "manifest.jsonl").size());
  EXPECT_EQ(trawl::testkit::read_file(again / "candidates_truth.csv"),
            trawl::testkit::read_file(dir / "candidates_truth.csv"));
  for (const auto& ref : refs) {
    const auto rel = std::filesystem::relative(ref.text_path, dir.path());
    EXPECT_EQ(trawl::testkit::read_file(ref.text_path), trawl::testkit::read_file(again / rel.string())) << rel;
  }
}

TEST(SynthConfig, Validation) {
  auto c = tiny();
  c.planted = 11;
  EXPECT_EQ(error_code([&] { c.validate(); }), ErrorCode::ConfigError);
  c = tiny();
  c.background_rate = 1.5;
  EXPECT_EQ(error_code([&] { c.validate(); }), ErrorCode::ConfigError);
  EXPECT_NO_THROW(tiny().validate());
}
