#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "testing.hpp"
#include "trawl/error.hpp"
#include "trawl/models.hpp"

using namespace trawl;
using trawl::testkit::toy_data;
using trawl::testkit::error_code;

namespace {

ModelMeta meta_for(const FeatureConfig& f) {
  ModelMeta m;
  m.features = f;
  m.freq_fingerprint = "0123456789abcdef";
  m.run_fingerprint = "fedcba9876543210";
  return m;
}

FeatureConfig profile_for(ModelFamily f) {
  return f == ModelFamily::Mnb ? FeatureConfig::count_profile(1u << 12) : FeatureConfig::signed_profile(1u << 12);
}

double accuracy(const Model& m, const trawl::testkit::ToyData& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.X.size(); ++i) ok += predict_score(m, d.X[i]).label == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(d.X.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

TEST(Mnb, MatchesBruteForceOracleOnSmallShapes) {
  const auto sweep = oracle::mnb_sweep(/*max_docs=*/3, /*max_features=*/3, /*max_count=*/2,
                                       /*exhaustive_cells=*/4, /*samples_per_shape=*/30);
  EXPECT_GT(sweep.instances, 400u);
  EXPECT_LT(sweep.max_error, 1e-9);
}

TEST(Mnb, LogLikelihoodIsSmoothedRatio) {
  // two docs, dim 4: class 1 has counts {2, 1, 0, 0}; class 0 has {0, 0, 3, 0}
  std::vector<SparseVector> X = {SparseVector::from_unsorted(4, {{0, 2}, {1, 1}}),
                                 SparseVector::from_unsorted(4, {{2, 3}})};
  std::vector<Label> y = {Label::Travelogue, Label::NonTravelogue};
  const auto m = train_mnb(X, y, 0.5);
  EXPECT_NEAR(m.log_likelihood(Label::Travelogue, 0), std::log(2.5 / (2.0 + 3.0)), 1e-15);
  EXPECT_NEAR(m.log_likelihood(Label::Travelogue, 3), std::log(0.5 / 5.0), 1e-15);
  EXPECT_NEAR(m.log_likelihood(Label::NonTravelogue, 2), std::log(3.5 / 5.0), 1e-15);
  EXPECT_NEAR(m.log_prior(Label::Travelogue), std::log(0.5), 1e-15);
  const auto lp = m.log_posteriors(SparseVector::from_unsorted(4, {}));
  EXPECT_NEAR(std::exp(lp[0]) + std::exp(lp[1]), 1.0, 1e-12);
}

TEST(Mnb, RejectsNegativeCounts) {
  std::vector<SparseVector> X = {SparseVector::from_unsorted(4, {{0, -1}}), SparseVector::from_unsorted(4, {{1, 1}})};
  std::vector<Label> y = {Label::Travelogue, Label::NonTravelogue};
  EXPECT_EQ(error_code([&] { train_mnb(X, y); }), ErrorCode::NegativeFeature);
}

// ---------------------------------------------------------------------------
// Gradients

TEST(Gradients, LogisticLoss) {
  const auto r = oracle::check_linear_gradients(LinearLoss::Logistic, 1);
  EXPECT_EQ(r.points, 20u);
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Gradients, HingeLossAwayFromKink) {
  const auto r = oracle::check_linear_gradients(LinearLoss::Hinge, 2);
  EXPECT_EQ(r.points, 20u);
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(Gradients, MlpAllLayers) {
  const auto r = oracle::check_mlp_gradients(3);
  EXPECT_EQ(r.points, 20u);
  EXPECT_LT(r.max_rel_error_w1, 1e-4);
  EXPECT_LT(r.max_rel_error_b1, 1e-4);
  EXPECT_LT(r.max_rel_error_w2, 1e-4);
  EXPECT_LT(r.max_rel_error_b2, 1e-4);
}

// ---------------------------------------------------------------------------
// Training

class FamilyTest : public ::testing::TestWithParam<ModelFamily> {};

TEST_P(FamilyTest, LearnsSeparableToyData) {
  const auto f = profile_for(GetParam());
  const auto train = toy_data(60, f, 1);
  const auto test = toy_data(40, f, 2);
  auto cfg = TrainConfig::defaults_for(GetParam());
  cfg.hidden_units = 16;
  cfg.seed = 9;
  const auto m = train_model(GetParam(), train.X, train.y, cfg, meta_for(f));
  EXPECT_GE(accuracy(m, test), 0.95);
}

TEST_P(FamilyTest, SameSeedSameBytes) {
  const auto f = profile_for(GetParam());
  const auto d = toy_data(20, f, 3);
  auto cfg = TrainConfig::defaults_for(GetParam());
  cfg.hidden_units = 8;
  cfg.seed = 4;
  const auto a = serialize_model(train_model(GetParam(), d.X, d.y, cfg, meta_for(f)));
  const auto b = serialize_model(train_model(GetParam(), d.X, d.y, cfg, meta_for(f)));
  EXPECT_EQ(a, b);
}

TEST_P(FamilyTest, SerializationRoundTripPreservesPredictions) {
  const auto f = profile_for(GetParam());
  const auto d = toy_data(20, f, 5);
  auto cfg = TrainConfig::defaults_for(GetParam());
  cfg.hidden_units = 8;
  const auto m = train_model(GetParam(), d.X, d.y, cfg, meta_for(f));
  trawl::testkit::TempDir dir;
  save_model(m, dir / "m.model");
  const auto back = load_model(dir / "m.model");
  EXPECT_EQ(back.family, m.family);
  EXPECT_EQ(back.meta, m.meta);
  EXPECT_EQ(model_fingerprint(back), model_fingerprint(m));
  for (const auto& x : d.X) EXPECT_EQ(predict_score(back, x).score, predict_score(m, x).score);
}

TEST_P(FamilyTest, CorruptedFileIsRejected) {
  const auto f = profile_for(GetParam());
  const auto d = toy_data(10, f, 6);
  auto cfg = TrainConfig::defaults_for(GetParam());
  cfg.hidden_units = 4;
  auto bytes = serialize_model(train_model(GetParam(), d.X, d.y, cfg, meta_for(f)));
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  EXPECT_EQ(error_code([&] { deserialize_model(flipped); }), ErrorCode::ChecksumMismatch);
  EXPECT_EQ(error_code([&] { deserialize_model(bytes.substr(0, bytes.size() - 3)); }), ErrorCode::ChecksumMismatch);
}

TEST_P(FamilyTest, SingleClassInputFails) {
  const auto f = profile_for(GetParam());
  auto d = toy_data(5, f, 7);
  std::fill(d.y.begin(), d.y.end(), Label::Travelogue);
  EXPECT_EQ(error_code([&] { train_model(GetParam(), d.X, d.y, TrainConfig::defaults_for(GetParam()), meta_for(f)); }),
            ErrorCode::SingleClassInput);
}

TEST_P(FamilyTest, WrongProfileFails) {
  const auto f = profile_for(GetParam());
  const auto other = GetParam() == ModelFamily::Mnb ? FeatureConfig::signed_profile(1u << 12)
                                                     : FeatureConfig::count_profile(1u << 12);
  const auto d = toy_data(5, other, 8);
  EXPECT_EQ(error_code([&] { train_model(GetParam(), d.X, d.y, TrainConfig::defaults_for(GetParam()), meta_for(other)); }),
            ErrorCode::ProfileMismatch);
  const auto ok = toy_data(5, f, 8);
  auto cfg = TrainConfig::defaults_for(GetParam());
  cfg.hidden_units = 4;
  const auto m = train_model(GetParam(), ok.X, ok.y, cfg, meta_for(f));
  EXPECT_EQ(error_code([&] { predict_score(m, d.X[0]); }), ErrorCode::ProfileMismatch);
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, FamilyTest, ::testing::ValuesIn(kAllFamilies),
                         [](const auto& info) { return std::string(display_name(info.param)); });

TEST(Training, LengthMismatch) {
  const auto f = FeatureConfig::signed_profile(1u << 12);
  auto d = toy_data(5, f, 1);
  d.y.pop_back();
  EXPECT_EQ(error_code([&] { train_linear(d.X, d.y, LinearLoss::Logistic, TrainConfig{}); }), ErrorCode::LengthMismatch);
}

TEST(Training, SvmScoreIsMonotoneInMargin) {
  const auto f = FeatureConfig::signed_profile(1u << 12);
  const auto d = toy_data(20, f, 2);
  const auto m = train_model(ModelFamily::Svm, d.X, d.y, TrainConfig{}, meta_for(f));
  std::vector<std::pair<double, double>> pairs;
  for (const auto& x : d.X) pairs.emplace_back(raw_decision(m, x), predict_score(m, x).score);
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i - 1].second, pairs[i].second);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.learning_rate = 0;
  EXPECT_EQ(error_code([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_EQ(error_code([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = TrainConfig{};
  c.l2 = 10;
  EXPECT_EQ(error_code([&] { c.validate(); }), ErrorCode::InvalidArgument);
  EXPECT_NO_THROW(TrainConfig{}.validate());
}

TEST(TrainConfig, PinnedDefaults) {
  const auto lin = TrainConfig::defaults_for(ModelFamily::Svm);
  EXPECT_EQ(lin.learning_rate, 0.1);
  EXPECT_EQ(lin.epochs, 20u);
  EXPECT_EQ(lin.batch_size, 32u);
  EXPECT_EQ(lin.l2, 1e-4);
  const auto mlp = TrainConfig::defaults_for(ModelFamily::Mlp);
  EXPECT_EQ(mlp.hidden_units, 256u);
  EXPECT_EQ(mlp.learning_rate, 0.5);
}

TEST(Classify, ThresholdIsInclusive) {
  EXPECT_EQ(classify(0.5).label, Label::Travelogue);
  EXPECT_EQ(classify(0.4999).label, Label::NonTravelogue);
  EXPECT_EQ(classify(0.7, 0.8).label, Label::NonTravelogue);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(1000), 1.0);
  EXPECT_EQ(sigmoid(-1000), 0.0);
  EXPECT_NEAR(sigmoid(0), 0.5, 1e-15);
}

TEST(Family, StringRoundTrip) {
  for (auto f : kAllFamilies) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_FALSE(family_from_string("rf"));
}
