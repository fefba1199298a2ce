#include <fstream>
#include <sstream>

#include "trawl/binary_io.hpp"
#include "trawl/error.hpp"
#include "trawl/hash.hpp"
#include "trawl/models.hpp"

namespace trawl {
namespace {

constexpr char kMagic[8] = {'T', 'R', 'W', 'L', 'M', 'O', 'D', 'L'};

void write_params(std::ostream& out, const MnbModel& m) {
  bin::write_u32(out, m.dim());
  bin::write_f64(out, m.alpha());
  bin::write_f32(out, static_cast<float>(m.class_docs()[0]));
  bin::write_f32(out, static_cast<float>(m.class_docs()[1]));
  bin::write_u32(out, static_cast<std::uint32_t>(m.features().size()));
  for (const auto& f : m.features()) {
    bin::write_u32(out, f.index);
    bin::write_f32(out, static_cast<float>(f.counts[0]));
    bin::write_f32(out, static_cast<float>(f.counts[1]));
  }
}

void write_params(std::ostream& out, const LinearModel& m) {
  bin::write_u32(out, m.dim);
  bin::write_u8(out, static_cast<std::uint8_t>(m.loss));
  bin::write_f64(out, m.l2);
  bin::write_f32(out, m.bias);
  std::uint32_t nnz = 0;
  for (float w : m.weights) nnz += w != 0.0f ? 1 : 0;
  bin::write_u32(out, nnz);
  for (std::uint32_t j = 0; j < m.dim; ++j) {
    if (m.weights[j] == 0.0f) continue;
    bin::write_u32(out, j);
    bin::write_f32(out, m.weights[j]);
  }
}

void write_params(std::ostream& out, const MlpModel& m) {
  bin::write_u32(out, m.dim);
  bin::write_u32(out, m.hidden);
  bin::write_u64(out, m.seed);
  for (float w : m.w1) bin::write_f32(out, w);
  for (float w : m.b1) bin::write_f32(out, w);
  for (float w : m.w2) bin::write_f32(out, w);
  bin::write_f32(out, m.b2);
}

MnbModel read_mnb(std::istream& in) {
  const std::uint32_t dim = bin::read_u32(in);
  const double alpha = bin::read_f64(in);
  std::array<double, 2> docs{bin::read_f32(in), bin::read_f32(in)};
  const std::uint32_t n = bin::read_u32(in);
  std::vector<MnbFeature> features;
  features.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    MnbFeature f;
    f.index = bin::read_u32(in);
    f.counts[0] = bin::read_f32(in);
    f.counts[1] = bin::read_f32(in);
    features.push_back(f);
  }
  return MnbModel(dim, alpha, docs, std::move(features));
}

LinearModel read_linear(std::istream& in) {
  LinearModel m;
  m.dim = bin::read_u32(in);
  const auto loss = bin::read_u8(in);
  if (loss > 1) fail(ErrorCode::Io, "unknown linear loss tag");
  m.loss = static_cast<LinearLoss>(loss);
  m.l2 = bin::read_f64(in);
  m.bias = bin::read_f32(in);
  m.weights.assign(m.dim, 0.0f);
  const std::uint32_t nnz = bin::read_u32(in);
  for (std::uint32_t i = 0; i < nnz; ++i) {
    const std::uint32_t j = bin::read_u32(in);
    if (j >= m.dim) fail(ErrorCode::Io, "weight index out of range");
    m.weights[j] = bin::read_f32(in);
  }
  return m;
}

MlpModel read_mlp(std::istream& in) {
  MlpModel m;
  m.dim = bin::read_u32(in);
  m.hidden = bin::read_u32(in);
  m.seed = bin::read_u64(in);
  m.w1.resize(static_cast<std::size_t>(m.dim) * m.hidden);
  for (float& w : m.w1) w = bin::read_f32(in);
  m.b1.resize(m.hidden);
  for (float& w : m.b1) w = bin::read_f32(in);
  m.w2.resize(m.hidden);
  for (float& w : m.w2) w = bin::read_f32(in);
  m.b2 = bin::read_f32(in);
  return m;
}

}  // namespace

std::string serialize_model(const Model& model) {
  std::ostringstream out(std::ios::binary);
  out.write(kMagic, sizeof kMagic);
  bin::write_u32(out, kModelFormatVersion);
  bin::write_u8(out, static_cast<std::uint8_t>(model.family));

  const auto& f = model.meta.features;
  bin::write_u32(out, f.ngram_min);
  bin::write_u32(out, f.ngram_max);
  bin::write_u32(out, f.hash_dim);
  bin::write_u8(out, FeatureProfile::of(f).bits());
  bin::write_u64(out, model.meta.min_count);
  bin::write_str(out, model.meta.hash_id);
  bin::write_str(out, model.meta.freq_fingerprint);
  bin::write_str(out, model.meta.run_fingerprint);

  std::visit([&](const auto& m) { write_params(out, m); }, model.params);

  std::string bytes = std::move(out).str();
  const std::uint64_t checksum = xxh64(bytes);
  std::ostringstream tail(std::ios::binary);
  bin::write_u64(tail, checksum);
  bytes += tail.str();
  return bytes;
}

Model deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8 || std::string_view(bytes.data(), sizeof kMagic) !=
                                                   std::string_view(kMagic, sizeof kMagic)) {
    if (bytes.size() >= sizeof kMagic &&
        std::string_view(bytes.data(), sizeof kMagic) != std::string_view(kMagic, sizeof kMagic))
      fail(ErrorCode::Io, "not a model file");
    fail(ErrorCode::ChecksumMismatch, "model file truncated");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  std::istringstream tail(std::string(bytes.substr(bytes.size() - 8)), std::ios::binary);
  if (bin::read_u64(tail) != xxh64(body)) fail(ErrorCode::ChecksumMismatch, "model checksum mismatch");

  std::istringstream in(std::string(body), std::ios::binary);
  in.ignore(sizeof kMagic);
  const std::uint32_t version = bin::read_u32(in);
  if (version != kModelFormatVersion)
    fail(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) + ", expected " +
                                         std::to_string(kModelFormatVersion));
  const auto family = bin::read_u8(in);
  if (family > 3) fail(ErrorCode::Io, "unknown model family tag");

  Model m;
  m.family = static_cast<ModelFamily>(family);
  auto& f = m.meta.features;
  f.ngram_min = bin::read_u32(in);
  f.ngram_max = bin::read_u32(in);
  f.hash_dim = bin::read_u32(in);
  const auto profile = FeatureProfile::from_bits(bin::read_u8(in));
  f.signed_hash = profile.signed_hash;
  f.normalize = profile.normalize;
  f.weighting = profile.weighting;
  m.meta.min_count = bin::read_u64(in);
  m.meta.hash_id = bin::read_str(in);
  if (m.meta.hash_id != kFeatureHashId)
    fail(ErrorCode::ProfileMismatch, "model uses feature hash '" + m.meta.hash_id + "', expected '" +
                                         std::string(kFeatureHashId) + "'");
  m.meta.freq_fingerprint = bin::read_str(in);
  m.meta.run_fingerprint = bin::read_str(in);

  switch (m.family) {
    case ModelFamily::Mnb: m.params = read_mnb(in); break;
    case ModelFamily::Svm:
    case ModelFamily::LogReg: m.params = read_linear(in); break;
    case ModelFamily::Mlp: m.params = read_mlp(in); break;
  }
  if (in.peek() != std::char_traits<char>::eof()) fail(ErrorCode::Io, "trailing bytes in model file");
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

std::string model_fingerprint(const Model& model) {
  const std::string bytes = serialize_model(model);
  std::istringstream tail(bytes.substr(bytes.size() - 8), std::ios::binary);
  return to_hex(bin::read_u64(tail));
}

}  // namespace trawl
