#include "isr/route.hpp"

#include <algorithm>
#include <cmath>

#include "isr/error.hpp"

namespace isr {

std::string Section::label() const {
  return std::to_string(start_m) + "-" + std::to_string(end_m);
}

std::size_t WaypointSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

void WaypointSet::insert(std::size_t i) {
  if (i >= bits_.size()) throw Error(ErrorKind::Invalid, "waypoint index out of range");
  bits_[i] = true;
}

void WaypointSet::insert_range(std::size_t first, std::size_t last) {
  if (last > bits_.size() || first > last) {
    throw Error(ErrorKind::Invalid, "waypoint range out of bounds");
  }
  std::fill(bits_.begin() + static_cast<std::ptrdiff_t>(first),
            bits_.begin() + static_cast<std::ptrdiff_t>(last), true);
}

WaypointSet& WaypointSet::operator|=(const WaypointSet& other) {
  if (other.universe() != universe()) throw Error(ErrorKind::Invalid, "waypoint universe mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] || other.bits_[i];
  return *this;
}

WaypointSet& WaypointSet::operator&=(const WaypointSet& other) {
  if (other.universe() != universe()) throw Error(ErrorKind::Invalid, "waypoint universe mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] && other.bits_[i];
  return *this;
}

std::vector<std::size_t> WaypointSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::array<std::size_t, 2>> WaypointSet::ranges() const {
  std::vector<std::array<std::size_t, 2>> out;
  std::size_t i = 0;
  while (i < bits_.size()) {
    if (!bits_[i]) {
      ++i;
      continue;
    }
    const auto first = i;
    while (i < bits_.size() && bits_[i]) ++i;
    out.push_back({first, i});
  }
  return out;
}

RouteLattice::RouteLattice(std::string route_id, int length_m, std::vector<RouteEvent> events)
    : route_id_(std::move(route_id)), length_m_(length_m), events_(std::move(events)) {
  if (length_m_ < kWaypointSpacingM || length_m_ % kWaypointSpacingM != 0) {
    throw Error(ErrorKind::Data, "route length must be a positive multiple of 5 m");
  }
  for (const auto& e : events_) {
    if (e.start_m < 0 || e.end_m > length_m_ || e.start_m >= e.end_m ||
        e.start_m % kWaypointSpacingM != 0 || e.end_m % kWaypointSpacingM != 0) {
      throw Error(ErrorKind::Data, "event '" + e.name + "' outside route bounds or off grid");
    }
  }
}

WaypointSet RouteLattice::event_waypoints() const {
  WaypointSet set(waypoint_count());
  for (const auto& e : events_) {
    set.insert_range(static_cast<std::size_t>(e.start_m / kWaypointSpacingM),
                     static_cast<std::size_t>(e.end_m / kWaypointSpacingM));
  }
  return set;
}

std::vector<Section> top_level_sections(const RouteLattice& lattice) {
  const int length = lattice.length_m();
  if (length < kTopLevelLengthM) throw Error(ErrorKind::Data, "route too short");
  std::vector<Section> sections;
  for (int start = 0; start + kTopLevelLengthM <= length; start += kTopLevelStrideM) {
    sections.push_back(Section{start, start + kTopLevelLengthM, 0});
  }
  int last_start = length - kTopLevelLengthM;
  last_start -= last_start % kWaypointSpacingM;
  const Section last{last_start, last_start + kTopLevelLengthM, 0};
  if (std::find(sections.begin(), sections.end(), last) == sections.end()) {
    sections.push_back(last);
  }
  std::sort(sections.begin(), sections.end());
  return sections;
}

namespace {

int snap_down(int meters) { return meters - meters % kWaypointSpacingM; }

}  // namespace

std::array<Section, 3> subdivide(const Section& section) {
  const int len = section.length_m();
  if (len < 2 * kWaypointSpacingM) throw Error(ErrorKind::Invalid, "section not divisible");
  const int half = snap_down(len / 2);
  const int quarter = snap_down(len / 4);
  const int a = section.start_m;
  const int b = section.end_m;
  const int d = section.depth + 1;
  return {Section{a, a + half, d}, Section{a + quarter, a + quarter + half, d},
          Section{b - half, b, d}};
}

std::array<std::size_t, 2> clip_range(const Session& session, const Section& section) {
  const auto& dist = session.dist_m;
  if (dist.size() != session.series.frame_count()) {
    throw Error(ErrorKind::Data, "distance channel length mismatch");
  }
  if (std::adjacent_find(dist.begin(), dist.end(), std::greater<>()) != dist.end()) {
    throw Error(ErrorKind::Data, "distance not monotone");
  }
  const auto first = std::lower_bound(dist.begin(), dist.end(), double(section.start_m));
  const auto last = std::lower_bound(first, dist.end(), double(section.end_m));
  return {static_cast<std::size_t>(first - dist.begin()),
          static_cast<std::size_t>(last - dist.begin())};
}

MultiChannelSeries clip_session(const Session& session, const Section& section) {
  const auto [first, last] = clip_range(session, section);
  return session.series.slice(first, last - first);
}

WaypointSet waypoints_of(const Section& section, const RouteLattice& lattice) {
  if (section.start_m < 0 || section.end_m > lattice.length_m() ||
      section.start_m > section.end_m) {
    throw Error(ErrorKind::Invalid, "section outside lattice bounds");
  }
  WaypointSet set(lattice.waypoint_count());
  // Waypoint i sits at 5*i m; include those with start <= 5*i < end.
  const auto first = static_cast<std::size_t>((section.start_m + kWaypointSpacingM - 1) /
                                              kWaypointSpacingM);
  const auto last = static_cast<std::size_t>((section.end_m + kWaypointSpacingM - 1) /
                                             kWaypointSpacingM);
  set.insert_range(first, std::min(last, set.universe()));
  return set;
}

}  // namespace isr
