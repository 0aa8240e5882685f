#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "isr/cohort_io.hpp"
#include "isr/route.hpp"
#include "isr/session.hpp"

namespace isr {

struct EventConfig {
  std::string name;
  int start_m = 0;
  int end_m = 0;
  double delta = 1.0;  // effect size
};

struct RouteConfig {
  std::string id;
  int length_m = 0;
  std::vector<EventConfig> events;
};

/// Standard deviations of the AR(1) noise per channel, in channel units.
struct NoiseConfig {
  double ar_phi = 0.98;  // per base-rate step
  double speed_mph = 1.5;
  double session_speed_mph = 2.5;  // spread of per-session mean speed
  double steering_deg = 2.0;
  double lane_ft = 0.4;
  double session_lane_ft = 0.0;  // per-session constant lane offset
  double heading_deg = 0.8;
  double pedal_pct = 3.0;
};

struct DroppedSession {
  std::string participant;
  std::string route_id;
  ClassLabel label = ClassLabel::Delayed;
};

struct CohortConfig {
  std::uint64_t seed = 1;
  std::vector<RouteConfig> routes;
  int control_participants = 15;
  int experimental_participants = 15;
  double base_rate_hz = 60.0;
  double emit_rate_hz = 10.0;
  double mean_speed_mph = 30.0;
  double min_duration_min = 6.0;
  double max_duration_min = 17.0;
  /// Inside events, DELAYED lane offset is delta * this (ft); REGULATED gets half.
  double lane_bias_ft = 1.0;
  NoiseConfig noise;
  std::vector<DroppedSession> drop;

  void validate() const;  // throws Error(Config)
  nlohmann::json to_json() const;
  static CohortConfig from_json(const nlohmann::json& j);  // throws Error(Config)

  /// 4 routes, 30 participants, 179 sessions, 31 top-level sections, three
  /// planted events per route with the given effect size.
  static CohortConfig default_fixture(std::uint64_t seed = 1, double delta = 1.0);
};

/// Generates at base_rate_hz and ingests to 10 Hz. Values are rounded to the
/// precision written by write_session_csv, so a written and reloaded cohort
/// equals the generated one.
Cohort generate_cohort(const CohortConfig& config, int jobs = 1);

/// Waypoints of the route's events with delta > 0.
WaypointSet ground_truth_waypoints(const CohortConfig& config, const std::string& route_id);

/// write_cohort plus the generator's event effect sizes in each route JSON.
/// Sessions are written at emit_rate_hz (regenerated at that rate when it
/// differs from 10 Hz).
void write_synthetic_cohort(const CohortConfig& config, const std::filesystem::path& dir,
                            int jobs = 1);

}  // namespace isr
