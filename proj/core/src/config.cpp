#include "trawl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trawl/curve.hpp"
#include "trawl/error.hpp"
#include "trawl/hash.hpp"

namespace trawl {
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::ConfigError, msg); }

json train_defaults(ModelFamily f) {
  const TrainConfig t = TrainConfig::defaults_for(f);
  json j;
  j["epochs"] = t.epochs;
  j["learning_rate"] = t.learning_rate;
  j["batch_size"] = t.batch_size;
  j["l2"] = t.l2;
  j["seed"] = t.seed;
  j["hidden_units"] = t.hidden_units;
  j["early_stop_patience"] = nullptr;
  j["alpha"] = t.alpha;
  return j;
}

json defaults() {
  json j;
  j["corpus"]["manifests"] = json::object();
  j["textprep"] = {{"min_count", 2}, {"reference", "corpus"}};
  j["features"] = {{"ngram_min", 1}, {"ngram_max", 2}, {"hash_dim", 1u << 20}, {"mlp_hash_dim", 1u << 16}};
  for (auto f : kAllFamilies) j["train"][std::string(to_string(f))] = train_defaults(f);
  j["eval"] = {{"ratio", 0.75},
               {"k", 5},
               {"seed", 0},
               {"baseline_trials", 1000},
               {"families", {"mnb", "svm", "logreg", "mlp"}}};
  j["curve"] = {{"sizes", std::vector<std::uint32_t>(std::begin(kCurveSizes), std::end(kCurveSizes))},
                {"extended", false},
                {"repeats", 5},
                {"family", "mlp"},
                {"seed", 0}};
  j["discover"] = {{"family", "mlp"}, {"top_n", 200}};
  j["service"] = {{"bind", "127.0.0.1"},
                  {"port", 8080},
                  {"annotation_log", ""},
                  {"round", 0},
                  {"excerpt_chars", 4000},
                  {"ui_dir", ""}};
  j["jobs"] = 1;
  return j;
}

/// Copies `src` onto `dst`; every key in `src` must already exist in `dst`
/// unless `dst` is an empty object (free-form map).
void merge(json& dst, const json& src, const std::string& where) {
  if (!src.is_object()) bad(where + ": expected an object");
  const bool free_form = dst.is_object() && dst.empty();
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!free_form && !dst.contains(it.key())) bad("unknown config key '" + key + "'");
    json& d = dst[it.key()];
    if (d.is_object() && !d.empty())
      merge(d, it.value(), key);
    else
      d = it.value();
  }
}

void apply_override(json& root, const std::string& ov) {
  const auto eq = ov.find('=');
  if (eq == std::string::npos || eq == 0) bad("override must be key=value: '" + ov + "'");
  const std::string key = ov.substr(0, eq);
  const std::string raw = ov.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &root;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    path += (path.empty() ? "" : ".") + part;
    const bool last = dot == std::string::npos;
    if (!node->is_object()) bad("override '" + key + "': '" + path + "' is not a section");
    const bool free_form = node->empty() || path.rfind("corpus.manifests", 0) == 0;
    if (!free_form && !node->contains(part)) bad("unknown config key '" + path + "'");
    node = &(*node)[part];
    if (last) break;
    start = dot + 1;
  }
  *node = value;
}

template <typename T>
T get(const json& j, const char* key, const std::string& section) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("bad value for '" + section + "." + key + "'");
  }
}

ModelFamily family_value(const json& v, const std::string& key) {
  if (!v.is_string()) bad("'" + key + "' must be a family name");
  const auto f = family_from_string(v.get<std::string>());
  if (!f) bad("'" + key + "': unknown family '" + v.get<std::string>() + "'");
  return *f;
}

std::string read_file(const std::filesystem::path& p, ErrorCode code) {
  std::ifstream f(p, std::ios::binary);
  if (!f) fail(code, "cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const std::vector<std::string>& overrides) {
  json user = json::parse(json_text, nullptr, false, true);
  if (user.is_discarded()) bad("config is not valid JSON");
  json j = defaults();
  merge(j, user, "");
  for (const auto& ov : overrides) apply_override(j, ov);

  RunConfig c;
  for (auto it = j["corpus"]["manifests"].begin(); it != j["corpus"]["manifests"].end(); ++it) {
    char* end = nullptr;
    const long n = std::strtol(it.key().c_str(), &end, 10);
    const auto century = *end == '\0' ? century_from_number(n) : std::nullopt;
    if (!century) bad("corpus.manifests: unknown century '" + it.key() + "'");
    std::vector<std::filesystem::path> paths;
    const json& v = it.value();
    if (v.is_string()) {
      paths.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& p : v) {
        if (!p.is_string()) bad("corpus.manifests." + it.key() + ": expected paths");
        paths.push_back(p.get<std::string>());
      }
    } else {
      bad("corpus.manifests." + it.key() + ": expected a path or a list of paths");
    }
    for (auto& p : paths)
      if (p.is_relative()) p = base_dir / p;
    c.manifests[*century] = std::move(paths);
  }

  const json& tp = j["textprep"];
  c.min_count = get<std::uint64_t>(tp, "min_count", "textprep");
  const auto ref = get<std::string>(tp, "reference", "textprep");
  if (ref == "corpus") c.reference = FreqReference::Corpus;
  else if (ref == "training") c.reference = FreqReference::Training;
  else bad("textprep.reference must be 'corpus' or 'training'");
  if (c.min_count < 1) bad("textprep.min_count must be >= 1");

  const json& fe = j["features"];
  c.ngram_min = get<std::uint32_t>(fe, "ngram_min", "features");
  c.ngram_max = get<std::uint32_t>(fe, "ngram_max", "features");
  c.hash_dim = get<std::uint32_t>(fe, "hash_dim", "features");
  c.mlp_hash_dim = get<std::uint32_t>(fe, "mlp_hash_dim", "features");

  for (auto f : kAllFamilies) {
    const std::string sec = "train." + std::string(to_string(f));
    const json& t = j["train"][std::string(to_string(f))];
    TrainConfig tc;
    tc.epochs = get<std::uint32_t>(t, "epochs", sec);
    tc.learning_rate = get<double>(t, "learning_rate", sec);
    tc.batch_size = get<std::uint32_t>(t, "batch_size", sec);
    tc.l2 = get<double>(t, "l2", sec);
    tc.seed = get<std::uint64_t>(t, "seed", sec);
    tc.hidden_units = get<std::uint32_t>(t, "hidden_units", sec);
    if (!t.at("early_stop_patience").is_null())
      tc.early_stop_patience = get<std::uint32_t>(t, "early_stop_patience", sec);
    tc.alpha = get<double>(t, "alpha", sec);
    try {
      tc.validate();
    } catch (const Error& e) {
      bad(sec + ": " + e.what());
    }
    c.train[f] = tc;
  }

  const json& ev = j["eval"];
  c.ratio = get<double>(ev, "ratio", "eval");
  c.k = get<std::uint32_t>(ev, "k", "eval");
  c.eval_seed = get<std::uint64_t>(ev, "seed", "eval");
  c.baseline_trials = get<std::uint32_t>(ev, "baseline_trials", "eval");
  if (!ev["families"].is_array() || ev["families"].empty()) bad("eval.families must be a non-empty list");
  c.families.clear();
  for (const auto& f : ev["families"]) {
    const auto fam = family_value(f, "eval.families");
    if (std::find(c.families.begin(), c.families.end(), fam) != c.families.end())
      bad("eval.families lists a family twice");
    c.families.push_back(fam);
  }
  if (!(c.ratio > 0.0 && c.ratio < 1.0)) bad("eval.ratio must be in (0, 1)");
  if (c.k < 2) bad("eval.k must be >= 2");
  if (c.baseline_trials < 1) bad("eval.baseline_trials must be >= 1");

  const json& cu = j["curve"];
  c.curve_sizes = get<std::vector<std::uint32_t>>(cu, "sizes", "curve");
  c.curve_extended = get<bool>(cu, "extended", "curve");
  c.curve_repeats = get<std::uint32_t>(cu, "repeats", "curve");
  c.curve_family = family_value(cu["family"], "curve.family");
  c.curve_seed = get<std::uint64_t>(cu, "seed", "curve");
  if (c.curve_repeats < 1) bad("curve.repeats must be >= 1");

  const json& di = j["discover"];
  c.discover_family = family_value(di["family"], "discover.family");
  c.top_n = get<std::size_t>(di, "top_n", "discover");

  const json& sv = j["service"];
  c.bind = get<std::string>(sv, "bind", "service");
  c.port = get<int>(sv, "port", "service");
  const auto log = get<std::string>(sv, "annotation_log", "service");
  if (!log.empty()) c.annotation_log = std::filesystem::path(log).is_relative() ? base_dir / log : std::filesystem::path(log);
  c.round = get<std::int64_t>(sv, "round", "service");
  c.excerpt_chars = get<std::size_t>(sv, "excerpt_chars", "service");
  const auto ui = get<std::string>(sv, "ui_dir", "service");
  if (!ui.empty()) c.ui_dir = std::filesystem::path(ui).is_relative() ? base_dir / ui : std::filesystem::path(ui);
  if (c.port < 0 || c.port > 65535) bad("service.port out of range");
  if (c.round < 0) bad("service.round must be >= 0");

  c.jobs = get<unsigned>(j, "jobs", "");

  for (auto f : kAllFamilies) {
    try {
      c.features_for(f).validate();
    } catch (const Error& e) {
      bad(std::string("features: ") + e.what());
    }
  }

  json canon = j;
  canon.erase("jobs");
  canon.erase("service");
  // manifests enter the fingerprint by content, not by location
  canon["corpus"]["manifests"] = json::object();
  c.canonical_json = canon.dump();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  const std::string text = read_file(path, ErrorCode::ConfigError);
  RunConfig c = parse_run_config(text, path.parent_path(), overrides);
  c.config_path = path;
  return c;
}

std::string default_config_json(const std::map<Century, std::vector<std::string>>& manifests) {
  json j = defaults();
  for (const auto& [c, paths] : manifests)
    j["corpus"]["manifests"][std::to_string(century_number(c))] = paths;
  return j.dump(2) + "\n";
}

std::string run_fingerprint(const RunConfig& cfg) {
  Xxh64Stream h;
  h.update(cfg.canonical_json);
  for (const auto& [c, paths] : cfg.manifests) {
    h.update("\ncentury=" + std::to_string(century_number(c)));
    for (const auto& p : paths) h.update(":" + to_hex(xxh64(read_file(p, ErrorCode::ConfigError))));
  }
  return to_hex(h.digest());
}

std::filesystem::path run_directory(const RunConfig& cfg) {
  const char* root = std::getenv("TRAWL_RUN_ROOT");
  const std::filesystem::path base = root && *root ? root : "runs";
  return base / run_fingerprint(cfg);
}

std::vector<Century> RunConfig::centuries() const {
  std::vector<Century> out;
  for (const auto& [c, _] : manifests) out.push_back(c);
  return out;
}

FeatureConfig RunConfig::features_for(ModelFamily f) const {
  FeatureConfig fc = f == ModelFamily::Mnb ? FeatureConfig::count_profile(hash_dim)
                     : f == ModelFamily::Mlp ? FeatureConfig::signed_profile(mlp_hash_dim)
                                             : FeatureConfig::signed_profile(hash_dim);
  fc.ngram_min = ngram_min;
  fc.ngram_max = ngram_max;
  return fc;
}

TrainConfig RunConfig::train_for(ModelFamily f) const {
  auto it = train.find(f);
  return it == train.end() ? TrainConfig::defaults_for(f) : it->second;
}

std::vector<std::uint32_t> RunConfig::sizes() const {
  auto s = curve_sizes;
  if (curve_extended && std::find(s.begin(), s.end(), kExtendedCurveSize) == s.end()) s.push_back(kExtendedCurveSize);
  return s;
}

}  // namespace trawl
