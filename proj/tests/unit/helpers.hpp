#pragma once

#include <random>
#include <vector>

#include "isr/series.hpp"

namespace testutil {

inline isr::MultiChannelSeries random_series(std::mt19937_64& rng, std::size_t n,
                                             double rate = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<isr::Frame> frames(n);
  for (auto& f : frames)
    for (auto& v : f) v = z(rng);
  return isr::MultiChannelSeries(rate, std::move(frames));
}

inline isr::MultiChannelSeries scalar_series(const std::vector<double>& values, double rate = 1.0) {
  std::vector<isr::Frame> frames(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) frames[i][0] = values[i];
  return isr::MultiChannelSeries(rate, std::move(frames));
}

}  // namespace testutil
