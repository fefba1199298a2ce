#include "trawl/types.hpp"

namespace trawl {

std::optional<Century> century_from_number(long long n) {
  switch (n) {
    case 16: return Century::C16;
    case 17: return Century::C17;
    case 18: return Century::C18;
    case 19: return Century::C19;
    default: return std::nullopt;
  }
}

std::string_view to_string(Label l) {
  return l == Label::Travelogue ? "travelogue" : "non_travelogue";
}

std::optional<Label> label_from_string(std::string_view s) {
  if (s == "travelogue") return Label::Travelogue;
  if (s == "non_travelogue") return Label::NonTravelogue;
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::KeywordSearch: return "keyword_search";
    case Provenance::RandomSample: return "random_sample";
    case Provenance::ModelDiscovery: return "model_discovery";
  }
  return "keyword_search";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "keyword_search") return Provenance::KeywordSearch;
  if (s == "random_sample") return Provenance::RandomSample;
  if (s == "model_discovery") return Provenance::ModelDiscovery;
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Confirm: return "confirm";
    case Verdict::Reject: return "reject";
    case Verdict::Uncertain: return "uncertain";
  }
  return "uncertain";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "confirm") return Verdict::Confirm;
  if (s == "reject") return Verdict::Reject;
  if (s == "uncertain") return Verdict::Uncertain;
  return std::nullopt;
}

}  // namespace trawl
