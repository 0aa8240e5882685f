#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isr/series.hpp"

namespace isr {

/// Ordinal order doubles as the deterministic tie-break order.
enum class ClassLabel : int { Control = 0, Regulated = 1, Delayed = 2 };

inline constexpr std::size_t kClassCount = 3;
inline constexpr std::array<ClassLabel, kClassCount> kAllLabels = {
    ClassLabel::Control, ClassLabel::Regulated, ClassLabel::Delayed};

std::string_view to_string(ClassLabel label);
std::optional<ClassLabel> parse_label(std::string_view text);

inline std::size_t ordinal(ClassLabel label) { return static_cast<std::size_t>(label); }

/// Lowest-ordinal label among those with the most votes.
ClassLabel plurality(const std::array<std::size_t, kClassCount>& votes);

/// One driver's telemetry for one drive of a route. dist_m is aligned with
/// series frames.
struct Session {
  std::string id;
  std::string participant;
  std::string route_id;
  ClassLabel label = ClassLabel::Control;
  MultiChannelSeries series;
  std::vector<double> dist_m;
};

/// Control participants form one stratum, treated (regulated or delayed)
/// participants the other.
inline bool is_experimental(ClassLabel label) { return label != ClassLabel::Control; }

}  // namespace isr
