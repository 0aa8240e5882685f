#include "isr/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isr/error.hpp"

namespace isr {

MultiChannelSeries::MultiChannelSeries(double rate_hz, std::vector<Frame> frames)
    : rate_hz_(rate_hz), frames_(std::move(frames)) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw Error(ErrorKind::Invalid, "rate_hz must be positive");
  }
}

std::vector<double> MultiChannelSeries::channel(Channel c) const {
  std::vector<double> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(f[static_cast<std::size_t>(c)]);
  return out;
}

MultiChannelSeries MultiChannelSeries::slice(std::size_t start, std::size_t length) const {
  if (start > frames_.size() || length > frames_.size() - start) {
    throw Error(ErrorKind::Invalid, "slice out of bounds");
  }
  auto first = frames_.begin() + static_cast<std::ptrdiff_t>(start);
  return MultiChannelSeries(rate_hz_,
                            std::vector<Frame>(first, first + static_cast<std::ptrdiff_t>(length)));
}

MultiChannelSeries paa_downsample(const MultiChannelSeries& series, std::size_t factor) {
  if (factor == 0) throw Error(ErrorKind::Invalid, "PAA factor must be >= 1");
  if (series.empty()) throw Error(ErrorKind::Data, "empty input");
  if (factor == 1) return series;

  const auto n = series.frame_count();
  const auto out_count = (n + factor - 1) / factor;
  std::vector<Frame> out(out_count);
  for (std::size_t k = 0; k < out_count; ++k) {
    const auto begin = k * factor;
    const auto end = std::min(begin + factor, n);
    Frame acc{};
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t c = 0; c < kChannelCount; ++c) acc[c] += series[i][c];
    }
    const auto len = static_cast<double>(end - begin);
    for (auto& v : acc) v /= len;
    out[k] = acc;
  }
  return MultiChannelSeries(series.rate_hz() / static_cast<double>(factor), std::move(out));
}

std::vector<double> paa_values(std::span<const double> values, std::size_t factor) {
  if (factor == 0) throw Error(ErrorKind::Invalid, "PAA factor must be >= 1");
  if (values.empty()) throw Error(ErrorKind::Data, "empty input");
  const auto n = values.size();
  std::vector<double> out((n + factor - 1) / factor);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto begin = k * factor;
    const auto end = std::min(begin + factor, n);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += values[i];
    out[k] = acc / static_cast<double>(end - begin);
  }
  return out;
}

std::vector<Window> sliding_windows(const MultiChannelSeries& series, std::size_t size,
                                    std::size_t stride) {
  if (size == 0 || stride == 0) {
    throw Error(ErrorKind::Invalid, "window size and stride must be >= 1");
  }
  std::vector<Window> windows;
  const auto n = series.frame_count();
  if (n < size) return windows;
  windows.reserve((n - size) / stride + 1);
  for (std::size_t start = 0; start + size <= n; start += stride) {
    windows.push_back(Window{start, size, series.slice(start, size)});
  }
  return windows;
}

namespace {

struct Moments {
  Frame sum{};
  std::size_t count = 0;
};

void accumulate_mean(const MultiChannelSeries& s, Moments& m) {
  for (const auto& f : s.frames()) {
    for (std::size_t c = 0; c < kChannelCount; ++c) m.sum[c] += f[c];
  }
  m.count += s.frame_count();
}

}  // namespace

ChannelStats pooled_channel_stats(std::span<const MultiChannelSeries> series) {
  Moments m;
  for (const auto& s : series) accumulate_mean(s, m);
  ChannelStats stats;
  if (m.count == 0) return stats;
  const auto n = static_cast<double>(m.count);
  for (std::size_t c = 0; c < kChannelCount; ++c) stats.mean[c] = m.sum[c] / n;

  // Two-pass variance.
  Frame sq{};
  for (const auto& s : series) {
    for (const auto& f : s.frames()) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        const double d = f[c] - stats.mean[c];
        sq[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < kChannelCount; ++c) stats.stddev[c] = std::sqrt(sq[c] / n);
  return stats;
}

ChannelStats channel_stats(const MultiChannelSeries& series) {
  return pooled_channel_stats(std::span<const MultiChannelSeries>(&series, 1));
}

MultiChannelSeries normalize_with(const MultiChannelSeries& series, const ChannelStats& stats) {
  std::vector<Frame> out(series.frame_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      out[i][c] = stats.stddev[c] < kMinStddev
                      ? 0.0
                      : (series[i][c] - stats.mean[c]) / stats.stddev[c];
    }
  }
  return MultiChannelSeries(series.rate_hz(), std::move(out));
}

MultiChannelSeries z_normalize(const MultiChannelSeries& series) {
  return normalize_with(series, channel_stats(series));
}

}  // namespace isr
