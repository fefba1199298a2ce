#include <gtest/gtest.h>

#include <cstdlib>

#include "testing.hpp"
#include "trawl/config.hpp"
#include "trawl/error.hpp"

using namespace trawl;
using trawl::testkit::error_code;
using trawl::testkit::TempDir;
using trawl::testkit::write_file;

TEST(RunConfig, DefaultsWhenEmpty) {
  const auto c = parse_run_config("{}", "/base");
  EXPECT_TRUE(c.manifests.empty());
  EXPECT_EQ(c.min_count, 2u);
  EXPECT_EQ(c.hash_dim, 1u << 20);
  EXPECT_EQ(c.mlp_hash_dim, 1u << 16);
  EXPECT_EQ(c.ratio, 0.75);
  EXPECT_EQ(c.k, 5u);
  EXPECT_EQ(c.top_n, 200u);
  EXPECT_EQ(c.families.size(), 4u);
  EXPECT_EQ(c.sizes(), (std::vector<std::uint32_t>{5, 10, 15, 20, 25, 30, 50}));
  EXPECT_EQ(c.train_for(ModelFamily::Svm), TrainConfig::defaults_for(ModelFamily::Svm));
}

TEST(RunConfig, FeatureProfilesPerFamily) {
  const auto c = parse_run_config("{}", "/");
  EXPECT_TRUE(c.features_for(ModelFamily::Svm).signed_hash);
  EXPECT_EQ(c.features_for(ModelFamily::LogReg).hash_dim, 1u << 20);
  EXPECT_EQ(c.features_for(ModelFamily::Mlp).hash_dim, 1u << 16);
  EXPECT_FALSE(c.features_for(ModelFamily::Mnb).signed_hash);
  EXPECT_EQ(c.features_for(ModelFamily::Mnb).normalize, Normalize::None);
}

TEST(RunConfig, ManifestsResolveAgainstBase) {
  const auto c = parse_run_config(R"({"corpus":{"manifests":{"17":"a.jsonl","18":["b.jsonl","/abs/c.jsonl"]}}})", "/base");
  ASSERT_EQ(c.centuries(), (std::vector<Century>{Century::C17, Century::C18}));
  EXPECT_EQ(c.manifests.at(Century::C17)[0], "/base/a.jsonl");
  EXPECT_EQ(c.manifests.at(Century::C18)[1], "/abs/c.jsonl");
}

TEST(RunConfig, OverridesUseDottedKeys) {
  const auto c = parse_run_config("{}", "/", {"eval.k=3", "train.mlp.hidden_units=64", "curve.family=svm",
                                              "curve.extended=true", "service.bind=0.0.0.0"});
  EXPECT_EQ(c.k, 3u);
  EXPECT_EQ(c.train_for(ModelFamily::Mlp).hidden_units, 64u);
  EXPECT_EQ(c.curve_family, ModelFamily::Svm);
  EXPECT_EQ(c.sizes().back(), 100u);
  EXPECT_EQ(c.bind, "0.0.0.0");
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(error_code([] { parse_run_config("{not json", "/"); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config(R"({"eval":{"folds":3}})", "/"); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"eval.nope=1"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"eval.ratio=1.5"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"eval.k=1"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"features.hash_dim=1000"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"curve.family=forest"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"train.svm.learning_rate=-1"}); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config(R"({"corpus":{"manifests":{"12":"a"}}})", "/"); }), ErrorCode::ConfigError);
  EXPECT_EQ(error_code([] { parse_run_config("{}", "/", {"novalue"}); }), ErrorCode::ConfigError);
}

TEST(RunFingerprint, CoversSettingsAndManifestBytesOnly) {
  TempDir dir;
  write_file(dir / "m.jsonl", "{}\n");
  const std::string cfg = R"({"corpus":{"manifests":{"17":"m.jsonl"}}})";
  const auto base = run_fingerprint(parse_run_config(cfg, dir.path()));
  EXPECT_EQ(base.size(), 16u);
  EXPECT_EQ(run_fingerprint(parse_run_config(cfg, dir.path(), {"jobs=8", "service.port=9"})), base);
  EXPECT_NE(run_fingerprint(parse_run_config(cfg, dir.path(), {"eval.seed=1"})), base);

  // same bytes in another location: same fingerprint
  TempDir other;
  write_file(other / "m.jsonl", "{}\n");
  EXPECT_EQ(run_fingerprint(parse_run_config(cfg, other.path())), base);
  write_file(other / "m.jsonl", "{}\n{}\n");
  EXPECT_NE(run_fingerprint(parse_run_config(cfg, other.path())), base);
}

TEST(RunDirectory, HonorsRunRootVariable) {
  const auto c = parse_run_config("{}", "/");
  ::setenv("TRAWL_RUN_ROOT", "/tmp/trawl-root-test", 1);
  EXPECT_EQ(run_directory(c), std::filesystem::path("/tmp/trawl-root-test") / run_fingerprint(c));
  ::unsetenv("TRAWL_RUN_ROOT");
  EXPECT_EQ(run_directory(c), std::filesystem::path("runs") / run_fingerprint(c));
}

TEST(DefaultConfigJson, ParsesBack) {
  const auto text = default_config_json({{Century::C16, {"x.jsonl"}}});
  const auto c = parse_run_config(text, "/d");
  EXPECT_EQ(c.manifests.at(Century::C16)[0], "/d/x.jsonl");
}
