#include <benchmark/benchmark.h>

#include "trawl/features.hpp"
#include "trawl/hash.hpp"
#include "trawl/models.hpp"
#include "trawl/rng.hpp"
#include "trawl/synth.hpp"
#include "trawl/textprep.hpp"

namespace {

const trawl::SynthConfig& synth_cfg() {
  static const trawl::SynthConfig cfg = [] {
    trawl::SynthConfig c;
    c.tokens_per_doc = 2000;
    return c;
  }();
  return cfg;
}

const trawl::SynthVocabulary& vocab() {
  static const trawl::SynthVocabulary v = trawl::build_vocabulary(synth_cfg());
  return v;
}

std::string doc(std::uint64_t seed, trawl::Label l = trawl::Label::Travelogue) {
  return trawl::synth_document(vocab(), synth_cfg(), l, seed);
}

struct Corpus {
  trawl::FrequencyTable freq;
  std::vector<trawl::SparseVector> X;
  std::vector<trawl::Label> y;
};

Corpus make_corpus(const trawl::FeatureConfig& fc, std::size_t per_class) {
  Corpus c;
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const auto l = i % 2 ? trawl::Label::Travelogue : trawl::Label::NonTravelogue;
    texts.push_back(doc(i, l));
    c.y.push_back(l);
    c.freq.add(trawl::tokenize(texts.back()));
  }
  for (const auto& t : texts) c.X.push_back(trawl::vectorize_document(t, c.freq, fc));
  return c;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = doc(1);
  for (auto _ : state) benchmark::DoNotOptimize(trawl::tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_Xxh64(benchmark::State& state) {
  const std::string s(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(trawl::xxh64(s));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * s.size()));
}
BENCHMARK(BM_Xxh64)->Arg(16)->Arg(4096);

void BM_VectorizeDocument(benchmark::State& state) {
  const std::string text = doc(2);
  trawl::FrequencyTable freq;
  freq.add(trawl::tokenize(text));
  freq.add(trawl::tokenize(text));
  const auto fc = trawl::FeatureConfig::signed_profile();
  for (auto _ : state) benchmark::DoNotOptimize(trawl::vectorize_document(text, freq, fc));
}
BENCHMARK(BM_VectorizeDocument);

void BM_Train(benchmark::State& state) {
  const auto family = static_cast<trawl::ModelFamily>(state.range(0));
  const auto fc = family == trawl::ModelFamily::Mnb   ? trawl::FeatureConfig::count_profile()
                  : family == trawl::ModelFamily::Mlp ? trawl::FeatureConfig::signed_profile(1u << 16)
                                                      : trawl::FeatureConfig::signed_profile();
  const Corpus c = make_corpus(fc, 50);
  trawl::ModelMeta meta;
  meta.features = fc;
  auto tc = trawl::TrainConfig::defaults_for(family);
  tc.epochs = 5;
  for (auto _ : state) benchmark::DoNotOptimize(trawl::train_model(family, c.X, c.y, tc, meta));
  state.SetLabel(std::string(trawl::to_string(family)));
}
BENCHMARK(BM_Train)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto family = static_cast<trawl::ModelFamily>(state.range(0));
  const auto fc = family == trawl::ModelFamily::Mnb   ? trawl::FeatureConfig::count_profile()
                  : family == trawl::ModelFamily::Mlp ? trawl::FeatureConfig::signed_profile(1u << 16)
                                                      : trawl::FeatureConfig::signed_profile();
  const Corpus c = make_corpus(fc, 20);
  trawl::ModelMeta meta;
  meta.features = fc;
  auto tc = trawl::TrainConfig::defaults_for(family);
  tc.epochs = 2;
  const auto model = trawl::train_model(family, c.X, c.y, tc, meta);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(trawl::predict_score(model, c.X[i++ % c.X.size()]));
  state.SetLabel(std::string(trawl::to_string(family)));
}
BENCHMARK(BM_Predict)->DenseRange(0, 3);

}  // namespace
BENCHMARK_MAIN();
