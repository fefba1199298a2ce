#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace trawl {

enum class Century : std::uint8_t { C16 = 16, C17 = 17, C18 = 18, C19 = 19 };

inline constexpr std::array<Century, 4> kAllCenturies = {Century::C16, Century::C17,
                                                         Century::C18, Century::C19};

inline int century_number(Century c) { return static_cast<int>(c); }
std::optional<Century> century_from_number(long long n);

/// Travelogue is the positive class.
enum class Label : std::uint8_t { NonTravelogue = 0, Travelogue = 1 };

inline bool is_positive(Label l) { return l == Label::Travelogue; }

std::string_view to_string(Label l);
std::optional<Label> label_from_string(std::string_view s);

enum class Provenance : std::uint8_t { KeywordSearch, RandomSample, ModelDiscovery };

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

enum class Verdict : std::uint8_t { Confirm, Reject, Uncertain };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

}  // namespace trawl
