#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace isr {

/// Telemetry channels, in the fixed order used by every matrix, model and file.
enum class Channel : std::size_t {
  Throttle = 0,    // accelerator depression, %
  Brake,           // brake depression, %
  Steering,        // wheel rotation, degrees
  Velocity,        // forward speed, mph
  Jerk,            // forward jerk, mph/s^2
  LanePosition,    // lateral offset from lane centre, feet
  HeadingError,    // heading vs route direction, degrees
};

inline constexpr std::size_t kChannelCount = 7;

inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "throttle", "brake", "steering", "velocity", "jerk", "lane_pos", "heading_err"};

using Frame = std::array<double, kChannelCount>;

/// Fixed-layout multichannel series stored frame-major.
class MultiChannelSeries {
 public:
  MultiChannelSeries() = default;
  MultiChannelSeries(double rate_hz, std::vector<Frame> frames);

  double rate_hz() const noexcept { return rate_hz_; }
  std::size_t frame_count() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }

  std::span<const Frame> frames() const noexcept { return frames_; }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }

  double value(std::size_t frame, Channel c) const {
    return frames_[frame][static_cast<std::size_t>(c)];
  }
  std::vector<double> channel(Channel c) const;

  /// Frames [start, start + length). Throws when out of bounds.
  MultiChannelSeries slice(std::size_t start, std::size_t length) const;

  friend bool operator==(const MultiChannelSeries&, const MultiChannelSeries&) = default;

 private:
  double rate_hz_ = 1.0;
  std::vector<Frame> frames_;
};

struct Window {
  std::size_t start_frame = 0;
  std::size_t length_frames = 0;
  MultiChannelSeries data;
};

/// Block-mean downsampling. The trailing partial block is averaged, so the
/// output has ceil(n / factor) frames.
MultiChannelSeries paa_downsample(const MultiChannelSeries& series, std::size_t factor);

/// Same block-mean rule applied to a scalar sequence (used for dist_m).
std::vector<double> paa_values(std::span<const double> values, std::size_t factor);

/// Full windows only, starting at 0, stride, 2*stride, ...
std::vector<Window> sliding_windows(const MultiChannelSeries& series, std::size_t size,
                                    std::size_t stride);

/// Per-channel mean and population standard deviation.
struct ChannelStats {
  Frame mean{};
  Frame stddev{};
};

inline constexpr double kMinStddev = 1e-9;

ChannelStats channel_stats(const MultiChannelSeries& series);

/// Statistics pooled over every frame of every series (empty series skipped).
ChannelStats pooled_channel_stats(std::span<const MultiChannelSeries> series);

/// (x - mean) / stddev per channel; channels whose stddev is below kMinStddev
/// become all zeros.
MultiChannelSeries normalize_with(const MultiChannelSeries& series, const ChannelStats& stats);

/// normalize_with using the series' own statistics.
MultiChannelSeries z_normalize(const MultiChannelSeries& series);

}  // namespace isr
