#include "trawl/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "trawl/binary_io.hpp"
#include "trawl/curve.hpp"
#include "trawl/discover.hpp"
#include "trawl/error.hpp"
#include "trawl/hash.hpp"
#include "trawl/parallel.hpp"

namespace trawl {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr char kVectorMagic[8] = {'T', 'R', 'W', 'L', 'V', 'E', 'C', '1'};
constexpr std::size_t kChunk = 256;

std::string cn(Century c) { return std::to_string(century_number(c)); }

void write_text(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + p.string());
  f << content;
  if (!f.flush()) fail(ErrorCode::Io, "write failed: " + p.string());
}

std::string read_whole(const fs::path& p, const std::string& stage) {
  std::ifstream f(p, std::ios::binary);
  if (!f) fail(ErrorCode::MissingArtifact, stage + ": missing " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void require(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p)) fail(ErrorCode::MissingArtifact, stage + ": missing " + p.string());
}

/// Families that need features/models: evaluated ones plus curve and discover.
std::vector<ModelFamily> used_families(const RunConfig& cfg) {
  std::set<ModelFamily> s(cfg.families.begin(), cfg.families.end());
  s.insert(cfg.curve_family);
  s.insert(cfg.discover_family);
  return {s.begin(), s.end()};
}

std::vector<FeatureConfig> used_profiles(const RunConfig& cfg) {
  std::vector<FeatureConfig> out;
  for (auto f : used_families(cfg)) {
    const auto fc = cfg.features_for(f);
    if (std::find(out.begin(), out.end(), fc) == out.end()) out.push_back(fc);
  }
  return out;
}

FrequencyTable load_freq(const Run& run, Century c) {
  require(run.freq_path(c), "prep");
  return FrequencyTable::load_tsv(run.freq_path(c));
}

ModelMeta meta_for(const Run& run, ModelFamily f, const std::string& freq_fp) {
  ModelMeta m;
  m.features = run.cfg.features_for(f);
  m.min_count = run.cfg.min_count;
  m.freq_fingerprint = freq_fp;
  m.run_fingerprint = run.fingerprint;
  return m;
}

ordered_json summary(const Run& run, const char* stage) {
  ordered_json j;
  j["stage"] = stage;
  j["status"] = "ok";
  j["fingerprint"] = run.fingerprint;
  j["run_dir"] = run.dir.string();
  return j;
}

}  // namespace

fs::path Run::freq_path(Century c) const { return dir / "prep" / ("freq_" + cn(c) + ".tsv"); }
fs::path Run::stats_path(Century c) const { return dir / "prep" / ("stats_" + cn(c) + ".json"); }
fs::path Run::vectors_path(Century c, const FeatureConfig& f) const {
  return dir / "prep" / ("vectors_" + cn(c) + "_" + to_hex(xxh64(canonical_string(f))).substr(0, 8) + ".bin");
}
fs::path Run::model_path(ModelFamily f, Century c) const {
  return dir / "models" / (std::string(to_string(f)) + "_" + cn(c) + ".model");
}
fs::path Run::queue_path(Century c) const { return dir / "rank" / ("queue_" + cn(c) + ".csv"); }
fs::path Run::annotation_log() const {
  return cfg.annotation_log.empty() ? dir / "annotations.jsonl" : cfg.annotation_log;
}

Run open_run_at(const RunConfig& cfg, const fs::path& dir) {
  Run r{cfg, run_fingerprint(cfg), dir};
  fs::create_directories(dir);
  write_text(dir / "config.json", nlohmann::json::parse(cfg.canonical_json).dump(2) + "\n");
  return r;
}

Run open_run(const RunConfig& cfg) { return open_run_at(cfg, run_directory(cfg)); }

CorpusPartition load_partition(const RunConfig& cfg, Century c) {
  auto it = cfg.manifests.find(c);
  if (it == cfg.manifests.end()) fail(ErrorCode::ConfigError, "no manifest for century " + cn(c));
  std::vector<DocumentRef> refs;
  std::unordered_set<std::string> ids;
  for (const auto& path : it->second) {
    for (auto& r : load_manifest(path)) {
      if (r.century != c) continue;
      if (!ids.insert(r.id).second) fail(ErrorCode::DuplicateId, "document '" + r.id + "' listed twice");
      refs.push_back(std::move(r));
    }
  }
  return partition(refs, c);
}

void save_vectors(const fs::path& path, const LabeledSet& set) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + path.string());
  f.write(kVectorMagic, sizeof kVectorMagic);
  bin::write_u32(f, static_cast<std::uint32_t>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    bin::write_str(f, set.ids[i]);
    bin::write_u8(f, static_cast<std::uint8_t>(set.y[i]));
    write_vector(f, set.X[i]);
  }
  if (!f.flush()) fail(ErrorCode::Io, "write failed: " + path.string());
}

LabeledSet read_vectors(const fs::path& path, const FeatureConfig& fc) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::MissingArtifact, "prep: missing " + path.string());
  char magic[8];
  if (!f.read(magic, 8) || !std::equal(magic, magic + 8, kVectorMagic))
    fail(ErrorCode::Io, path.string() + " is not a vector cache");
  LabeledSet s;
  const auto n = bin::read_u32(f);
  const FeatureProfile profile = FeatureProfile::of(fc);
  for (std::uint32_t i = 0; i < n; ++i) {
    s.ids.push_back(bin::read_str(f));
    const auto label = bin::read_u8(f);
    if (label > 1) fail(ErrorCode::Io, path.string() + ": bad label");
    s.y.push_back(static_cast<Label>(label));
    s.X.push_back(read_vector(f, profile));
    if (s.X.back().dim != fc.hash_dim) fail(ErrorCode::DimensionMismatch, path.string() + ": stale vector cache");
  }
  return s;
}

LabeledSet load_vectors(const Run& run, Century c, const FeatureConfig& f) {
  const auto p = run.vectors_path(c, f);
  require(p, "prep");
  return read_vectors(p, f);
}

std::string stage_prep(const Run& run) {
  const auto& cfg = run.cfg;
  ordered_json out = summary(run, "prep");
  out["centuries"] = ordered_json::array();
  for (Century c : cfg.centuries()) {
    const CorpusPartition p = load_partition(cfg, c);
    if (p.positives.empty() || p.negatives.empty())
      fail(ErrorCode::SingleClassInput, "century " + cn(c) + " needs labeled positives and negatives");

    std::vector<const DocumentRef*> docs;
    for (const auto* list : {&p.positives, &p.negatives, &p.candidates})
      for (const auto& r : *list) docs.push_back(&r);
    const std::size_t labeled = p.labeled_size();

    // count tokens chunk by chunk; only one chunk of streams is alive at once
    FrequencyTable freq;
    CorpusStats stats;
    for (std::size_t begin = 0; begin < docs.size(); begin += kChunk) {
      const std::size_t end = std::min(docs.size(), begin + kChunk);
      std::vector<TokenStream> streams(end - begin);
      parallel_for(end - begin, cfg.jobs,
                   [&](std::size_t k) { streams[k] = tokenize(read_text(docs[begin + k]->text_path)); });
      for (std::size_t k = 0; k < streams.size(); ++k) {
        stats.total_tokens += streams[k].tokens.size();
        ++stats.doc_count;
        if (cfg.reference == FreqReference::Corpus || begin + k < labeled) freq.add(streams[k]);
      }
    }
    if (stats.doc_count == 0) fail(ErrorCode::EmptyCorpus, "century " + cn(c) + " has no documents");

    fs::create_directories(run.dir / "prep");
    const std::string ref = cfg.reference == FreqReference::Corpus ? "corpus" : "training";
    const std::vector<std::string> header = {"century\t" + cn(c), "reference\t" + ref};
    freq.save_tsv(run.freq_path(c), header);

    ordered_json st;
    st["century"] = century_number(c);
    st["documents"] = stats.doc_count;
    st["positives"] = p.positives.size();
    st["negatives"] = p.negatives.size();
    st["candidates"] = p.candidates.size();
    st["total_tokens"] = stats.total_tokens;
    st["average_tokens"] = stats.average_tokens();
    st["vocabulary"] = freq.vocabulary_size();
    st["freq_reference"] = ref;
    st["freq_fingerprint"] = freq.fingerprint();
    st["negative_deficit"] = negative_deficit(p);
    write_text(run.stats_path(c), st.dump(2) + "\n");

    for (const auto& fc : used_profiles(cfg))
      save_vectors(run.vectors_path(c, fc), build_labeled_set(p, freq, fc, cfg.min_count, cfg.jobs));
    out["centuries"].push_back(st);
  }
  return out.dump();
}

std::string stage_train(const Run& run) {
  ordered_json out = summary(run, "train");
  out["models"] = ordered_json::array();
  for (Century c : run.cfg.centuries()) {
    const std::string freq_fp = load_freq(run, c).fingerprint();
    for (auto f : used_families(run.cfg)) {
      const auto data = load_vectors(run, c, run.cfg.features_for(f));
      const Model m = train_model(f, data.X, data.y, run.cfg.train_for(f), meta_for(run, f, freq_fp));
      fs::create_directories(run.dir / "models");
      save_model(m, run.model_path(f, c));
      ordered_json e;
      e["century"] = century_number(c);
      e["family"] = std::string(to_string(f));
      e["path"] = run.model_path(f, c).string();
      e["model_fingerprint"] = model_fingerprint(m);
      out["models"].push_back(e);
    }
  }
  return out.dump();
}

std::string stage_eval(const Run& run) {
  std::vector<EvaluationReport> reports;
  for (Century c : run.cfg.centuries()) {
    const std::string freq_fp = load_freq(run, c).fingerprint();
    for (auto f : run.cfg.families) {
      ExperimentConfig ec;
      ec.family = f;
      ec.features = run.cfg.features_for(f);
      ec.train = run.cfg.train_for(f);
      ec.ratio = run.cfg.ratio;
      ec.k = run.cfg.k;
      ec.seed = run.cfg.eval_seed;
      ec.baseline_trials = run.cfg.baseline_trials;
      ec.jobs = run.cfg.jobs;
      ec.meta = meta_for(run, f, freq_fp);
      reports.push_back(run_experiment(load_vectors(run, c, ec.features), c, ec));
    }
  }
  write_text(run.dir / "eval" / "report.json", report_json(reports, run.fingerprint));
  write_text(run.dir / "eval" / "table.txt", report_table(reports, true) + "\n" + report_table(reports, false));

  ordered_json out = summary(run, "eval");
  out["report"] = (run.dir / "eval" / "report.json").string();
  out["results"] = ordered_json::array();
  for (const auto& r : reports)
    out["results"].push_back({{"century", century_number(r.century)},
                              {"family", std::string(to_string(r.family))},
                              {"validation_f1", r.validation.f1},
                              {"cv_mean_f1", r.cv.mean_f1},
                              {"f1_spread", r.cv.f1_spread}});
  return out.dump();
}

std::string stage_curve(const Run& run) {
  ordered_json out = summary(run, "curve");
  out["curves"] = ordered_json::array();
  for (Century c : run.cfg.centuries()) {
    CurveConfig cc;
    cc.sizes = run.cfg.sizes();
    cc.repeats = run.cfg.curve_repeats;
    cc.family = run.cfg.curve_family;
    cc.train = run.cfg.train_for(cc.family);
    cc.features = run.cfg.features_for(cc.family);
    cc.seed = run.cfg.curve_seed;
    cc.jobs = run.cfg.jobs;
    const auto points = learning_curve(load_vectors(run, c, cc.features), cc);
    const fs::path base = run.dir / "curve";
    write_text(base / ("curve_" + cn(c) + ".csv"), curve_csv(points));
    write_text(base / ("curve_" + cn(c) + ".json"), curve_json(points, cc));
    ordered_json e;
    e["century"] = century_number(c);
    e["points"] = ordered_json::array();
    for (const auto& p : points)
      e["points"].push_back({{"size", p.per_class_size}, {"mean_f1", p.mean_f1}, {"variance", p.variance}});
    out["curves"].push_back(e);
  }
  return out.dump();
}

std::string stage_rank(const Run& run) {
  ordered_json out = summary(run, "rank");
  out["queues"] = ordered_json::array();
  for (Century c : run.cfg.centuries()) {
    const auto model_path = run.model_path(run.cfg.discover_family, c);
    require(model_path, "train");
    const Model model = load_model(model_path);
    const FrequencyTable freq = load_freq(run, c);
    const CorpusPartition p = load_partition(run.cfg, c);
    const Ranking ranking = score_candidates(model, p.candidates, freq, run.cfg.jobs);
    export_queue(ranking, run.queue_path(c), run.cfg.top_n);
    out["queues"].push_back({{"century", century_number(c)},
                             {"path", run.queue_path(c).string()},
                             {"scored", ranking.ranked.size()},
                             {"skipped", ranking.skipped.size()},
                             {"exported", std::min(run.cfg.top_n, ranking.ranked.size())}});
  }
  return out.dump();
}

std::string stage_report(const Run& run) {
  ordered_json out = summary(run, "report");
  const auto records = load_annotation_log(run.annotation_log());
  ordered_json discovery = ordered_json::array();
  for (Century c : run.cfg.centuries()) {
    const fs::path curve_json_path = run.dir / "curve" / ("curve_" + cn(c) + ".json");
    if (fs::exists(curve_json_path)) {
      const auto j = nlohmann::json::parse(read_whole(curve_json_path, "curve"));
      std::vector<CurvePoint> points;
      for (const auto& p : j.at("points"))
        points.push_back(CurvePoint::from_values(p.at("per_class_size").get<std::uint32_t>(),
                                                 p.at("f1_values").get<std::vector<double>>()));
      write_text(run.dir / "report" / ("curve_" + cn(c) + ".svg"),
                 curve_svg(points, "Mean F1 by examples per class, century " + cn(c)));
    }
    if (!fs::exists(run.queue_path(c))) continue;
    const Ranking queue = load_queue(run.queue_path(c));
    std::unordered_set<std::string> members;
    for (const auto& r : queue.ranked) members.insert(r.doc_id);
    std::vector<AnnotationRecord> mine;
    for (const auto& r : records)
      if (members.count(r.doc_id)) mine.push_back(r);
    const auto rep = discovery_report(queue, mine);
    discovery.push_back({{"century", century_number(c)},
                         {"queue_size", rep.queue_size},
                         {"evaluated_top_n", rep.evaluated_top_n},
                         {"confirmed", rep.confirmed},
                         {"confirmation_rate", rep.confirmation_rate},
                         {"rate_defined", rep.rate_defined}});
  }
  write_text(run.dir / "report" / "discovery.json", discovery.dump(2) + "\n");
  out["discovery"] = discovery;
  return out.dump();
}

}  // namespace trawl
