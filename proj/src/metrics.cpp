#include "isr/metrics.hpp"

#include "isr/error.hpp"
#include "isr/text.hpp"

namespace isr {

std::string Ratio::render() const { return format_fixed(value(), 4); }

double accuracy(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorKind::Invalid, "label count mismatch");
  if (truth.empty()) throw Error(ErrorKind::Invalid, "accuracy of empty label set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

namespace {

void check(const FootprintSet& f) {
  if (f.folds.empty()) throw Error(ErrorKind::Invalid, "footprint set needs at least one fold");
  for (const auto& s : f.folds) {
    if (s.universe() != f.lattice_size) throw Error(ErrorKind::Invalid, "footprint universe mismatch");
  }
}

}  // namespace

WaypointSet FootprintSet::union_all() const {
  check(*this);
  WaypointSet u(lattice_size);
  for (const auto& s : folds) u |= s;
  return u;
}

WaypointSet FootprintSet::intersection_all() const {
  check(*this);
  WaypointSet n = folds.front();
  for (const auto& s : folds) n &= s;
  return n;
}

Ratio puor(const FootprintSet& f) { return {f.union_all().count(), f.lattice_size}; }

Ratio pior(const FootprintSet& f) { return {f.intersection_all().count(), f.lattice_size}; }

Ratio jiwu(const FootprintSet& f) { return {f.intersection_all().count(), f.union_all().count()}; }

Ratio jiwe(const FootprintSet& f) {
  WaypointSet events = f.events.universe() == 0 ? WaypointSet(f.lattice_size) : f.events;
  if (events.universe() != f.lattice_size) throw Error(ErrorKind::Invalid, "event universe mismatch");
  auto inter = f.intersection_all();
  inter &= events;
  auto uni = f.union_all();
  uni |= events;
  return {inter.count(), uni.count()};
}

}  // namespace isr
