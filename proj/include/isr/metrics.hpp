#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isr/route.hpp"
#include "isr/session.hpp"

namespace isr {

/// Exact count ratio; 0/0 reads as 0.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  /// Four-decimal rendering used in reports.
  std::string render() const;
};

/// Fraction of positions where the labels agree. Throws on size mismatch or
/// empty input.
double accuracy(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted);

/// Per-fold waypoint footprints over one lattice, plus its event waypoints.
struct FootprintSet {
  std::vector<WaypointSet> folds;
  std::size_t lattice_size = 0;
  WaypointSet events;

  WaypointSet union_all() const;
  WaypointSet intersection_all() const;
};

/// |U S_i| / |L|
Ratio puor(const FootprintSet& footprints);
/// |n S_i| / |L|
Ratio pior(const FootprintSet& footprints);
/// PIoR / PUoR, i.e. |n S_i| / |U S_i|; 0 when the union is empty.
Ratio jiwu(const FootprintSet& footprints);
/// |(n S_i) n E| / |(U S_i) u E|; 0 when the denominator is empty.
Ratio jiwe(const FootprintSet& footprints);

}  // namespace isr
