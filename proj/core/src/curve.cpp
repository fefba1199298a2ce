#include "trawl/curve.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "trawl/error.hpp"
#include "trawl/parallel.hpp"
#include "trawl/rng.hpp"

namespace trawl {

CurvePoint CurvePoint::from_values(std::uint32_t size, std::vector<double> values) {
  CurvePoint p;
  p.per_class_size = size;
  p.repeats = static_cast<std::uint32_t>(values.size());
  p.f1_values = std::move(values);
  if (p.f1_values.empty()) return p;
  double sum = 0.0;
  for (double v : p.f1_values) sum += v;
  p.mean_f1 = sum / static_cast<double>(p.f1_values.size());
  if (p.f1_values.size() > 1) {
    double ss = 0.0;
    for (double v : p.f1_values) ss += (v - p.mean_f1) * (v - p.mean_f1);
    p.variance = ss / static_cast<double>(p.f1_values.size() - 1);
  }
  return p;
}

std::vector<CurvePoint> learning_curve(const LabeledSet& data, const CurveConfig& cfg) {
  if (cfg.repeats == 0) fail(ErrorCode::InvalidArgument, "repeats must be >= 1");
  std::array<std::vector<std::size_t>, 2> cls;
  for (std::size_t i = 0; i < data.size(); ++i) cls[is_positive(data.y[i]) ? 1 : 0].push_back(i);
  const std::size_t smallest = std::min(cls[0].size(), cls[1].size());
  for (auto s : cfg.sizes) {
    if (s == 0) fail(ErrorCode::InvalidArgument, "curve sizes must be >= 1");
    if (s + 1 > smallest)
      fail(ErrorCode::SizeTooLarge, "size " + std::to_string(s) + " needs at least " + std::to_string(s + 1) +
                                        " documents per class, have " + std::to_string(smallest));
  }

  const std::size_t cells = cfg.sizes.size() * cfg.repeats;
  std::vector<double> f1(cells);
  parallel_for(cells, cfg.jobs, [&](std::size_t cell) {
    const std::uint32_t size = cfg.sizes[cell / cfg.repeats];
    const std::uint32_t repeat = static_cast<std::uint32_t>(cell % cfg.repeats);
    const std::uint64_t cell_seed = derive_seed(cfg.seed, size, repeat);

    Rng rng(derive_seed(cell_seed, 0));
    std::vector<bool> in_train(data.size(), false);
    for (const auto& members : cls) {
      auto pool = members;
      // partial Fisher-Yates: first `size` slots become the sample
      for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        in_train[pool[i]] = true;
      }
    }
    std::vector<SparseVector> Xtr, Xte;
    std::vector<Label> ytr, yte;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (in_train[i] ? Xtr : Xte).push_back(data.X[i]);
      (in_train[i] ? ytr : yte).push_back(data.y[i]);
    }
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cell_seed, 1);
    ModelMeta meta;
    meta.features = cfg.features;
    const Model model = train_model(cfg.family, Xtr, ytr, tc, meta);
    std::vector<Label> pred;
    pred.reserve(Xte.size());
    for (const auto& x : Xte) pred.push_back(predict_score(model, x).label);
    f1[cell] = compute_metrics(yte, pred).f1;
  });

  std::vector<CurvePoint> out;
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s)
    out.push_back(CurvePoint::from_values(
        cfg.sizes[s], std::vector<double>(f1.begin() + static_cast<std::ptrdiff_t>(s * cfg.repeats),
                                          f1.begin() + static_cast<std::ptrdiff_t>((s + 1) * cfg.repeats))));
  return out;
}

std::string curve_csv(std::span<const CurvePoint> points) {
  std::string out = "size,repeat,f1\n";
  char buf[96];
  for (const auto& p : points)
    for (std::size_t r = 0; r < p.f1_values.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%u,%zu,%.17g\n", p.per_class_size, r, p.f1_values[r]);
      out += buf;
    }
  return out;
}

std::string curve_json(std::span<const CurvePoint> points, const CurveConfig& cfg) {
  nlohmann::ordered_json j;
  j["family"] = std::string(to_string(cfg.family));
  j["repeats"] = cfg.repeats;
  j["seed"] = cfg.seed;
  j["variance"] = "sample (n-1)";
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json e;
    e["per_class_size"] = p.per_class_size;
    e["repeats"] = p.repeats;
    e["f1_values"] = p.f1_values;
    e["mean_f1"] = p.mean_f1;
    e["variance"] = p.variance;
    j["points"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string curve_svg(std::span<const CurvePoint> points, const std::string& title) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  std::uint32_t max_size = 1;
  for (const auto& p : points) max_size = std::max(max_size, p.per_class_size);
  auto px = [&](double s) { return L + (W - L - R) * s / max_size; };
  auto py = [&](double f) { return T + (H - T - B) * (1.0 - std::clamp(f, 0.0, 1.0)); };

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  std::string esc;
  for (char c : title) {
    if (c == '<') esc += "&lt;";
    else if (c == '>') esc += "&gt;";
    else if (c == '&') esc += "&amp;";
    else esc += c;
  }
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << esc << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
    << "\" stroke=\"black\"/>\n<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << L << "\" y2=\"" << py(1)
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    o << "<text x=\"" << L - 8 << "\" y=\"" << py(f) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << f
      << "</text>\n";
  }
  for (const auto& p : points)
    o << "<text x=\"" << px(p.per_class_size) << "\" y=\"" << H - B + 16
      << "\" text-anchor=\"middle\" font-size=\"11\">" << p.per_class_size << "</text>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-size=\"12\">examples per class</text>\n";
  if (!points.empty()) {
    o << "<polygon fill=\"steelblue\" fill-opacity=\"0.25\" points=\"";
    for (const auto& p : points) o << px(p.per_class_size) << ',' << py(p.mean_f1 + p.variance) << ' ';
    for (auto it = points.rbegin(); it != points.rend(); ++it)
      o << px(it->per_class_size) << ',' << py(it->mean_f1 - it->variance) << ' ';
    o << "\"/>\n<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& p : points) o << px(p.per_class_size) << ',' << py(p.mean_f1) << ' ';
    o << "\"/>\n";
    for (const auto& p : points)
      o << "<circle cx=\"" << px(p.per_class_size) << "\" cy=\"" << py(p.mean_f1)
        << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace trawl
