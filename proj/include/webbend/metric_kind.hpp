#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace webbend {

// The eight community maneuvers, in report column order.
enum class Metric { back, build, bridge, boost, negate, neutralize, narrow, neglect };

inline constexpr std::array<Metric, 8> kAllMetrics{Metric::back,   Metric::build,      Metric::bridge, Metric::boost,
                                                   Metric::negate, Metric::neutralize, Metric::narrow, Metric::neglect};

inline constexpr std::string_view metric_name(Metric m) {
  constexpr std::array<std::string_view, 8> names{"back",   "build",      "bridge", "boost",
                                                  "negate", "neutralize", "narrow", "neglect"};
  return names[static_cast<std::size_t>(m)];
}

inline std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (metric_name(m) == name) return m;
  return std::nullopt;
}

// Neutralize and Neglect need two snapshots.
inline constexpr bool is_temporal(Metric m) { return m == Metric::neutralize || m == Metric::neglect; }

}  // namespace webbend
