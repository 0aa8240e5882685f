#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "isr/series.hpp"
#include "isr/session.hpp"

namespace isr {

inline constexpr int kWaypointSpacingM = 5;
inline constexpr int kTopLevelLengthM = 1600;
inline constexpr int kTopLevelStrideM = 800;

/// Half-open interval [start_m, end_m) of route arc length.
struct Section {
  int start_m = 0;
  int end_m = 0;
  int depth = 0;

  int length_m() const noexcept { return end_m - start_m; }
  std::string label() const;  // "start-end"

  friend auto operator<=>(const Section&, const Section&) = default;
};

/// Dense set over the waypoints of one lattice.
class WaypointSet {
 public:
  WaypointSet() = default;
  explicit WaypointSet(std::size_t universe) : bits_(universe, false) {}

  std::size_t universe() const noexcept { return bits_.size(); }
  std::size_t count() const;
  bool contains(std::size_t i) const { return i < bits_.size() && bits_[i]; }
  void insert(std::size_t i);
  void insert_range(std::size_t first, std::size_t last);  // [first, last)

  WaypointSet& operator|=(const WaypointSet& other);
  WaypointSet& operator&=(const WaypointSet& other);

  std::vector<std::size_t> indices() const;
  /// Maximal runs as [first, last) pairs.
  std::vector<std::array<std::size_t, 2>> ranges() const;

  friend bool operator==(const WaypointSet&, const WaypointSet&) = default;

 private:
  std::vector<bool> bits_;
};

struct RouteEvent {
  std::string name;
  int start_m = 0;
  int end_m = 0;
};

/// 1-D lattice of waypoints every 5 m over [0, length_m).
class RouteLattice {
 public:
  RouteLattice(std::string route_id, int length_m, std::vector<RouteEvent> events = {});

  const std::string& route_id() const noexcept { return route_id_; }
  int length_m() const noexcept { return length_m_; }
  std::size_t waypoint_count() const noexcept {
    return static_cast<std::size_t>(length_m_ / kWaypointSpacingM);
  }
  double waypoint_distance(std::size_t index) const {
    return static_cast<double>(index) * kWaypointSpacingM;
  }
  const std::vector<RouteEvent>& events() const noexcept { return events_; }

  /// Union of the waypoints covered by all annotated events.
  WaypointSet event_waypoints() const;

 private:
  std::string route_id_;
  int length_m_;
  std::vector<RouteEvent> events_;
};

/// 1600 m sections every 800 m, plus the final 1600 m when not already present.
std::vector<Section> top_level_sections(const RouteLattice& lattice);

/// First, middle and last overlapping halves.
std::array<Section, 3> subdivide(const Section& section);

/// Frames whose dist_m lies in [start_m, end_m).
MultiChannelSeries clip_session(const Session& session, const Section& section);

/// Frame index range [first, last) selected by clip_session.
std::array<std::size_t, 2> clip_range(const Session& session, const Section& section);

WaypointSet waypoints_of(const Section& section, const RouteLattice& lattice);

}  // namespace isr
