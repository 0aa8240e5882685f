#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "isr/classifiers.hpp"
#include "isr/series.hpp"
#include "isr/session.hpp"

namespace isr {

// External classifier protocol: newline-delimited JSON over the child's
// stdin/stdout. Requests are {"type": "train" | "predict", "payload": ...};
// replies are {"type": "result" | "error", "payload": ...}. Window data is
// base64 of little-endian float32, frame-major (frames x 7 channels).

inline constexpr std::size_t kPluginWindowFrames = 30;
inline constexpr std::size_t kPluginWindowStride = 15;
inline constexpr const char* kPluginCommandEnv = "ISR_PLUGIN_CMD";

/// Sliding windows of a 10 Hz clip, base64-encoded. Clips shorter than one
/// window are padded by repeating their last frame; empty clips yield one
/// all-zero window.
std::vector<std::string> encode_plugin_windows(const MultiChannelSeries& clip);

/// ISR_PLUGIN_CMD when set and non-empty, else `fallback`.
std::string plugin_command(const std::string& fallback);

struct PluginClip {
  std::string id;
  std::optional<ClassLabel> label;  // present for training clips
  const MultiChannelSeries* clip = nullptr;
};

struct PluginOptions {
  std::string command;
  std::chrono::milliseconds timeout{120000};
};

/// One child process (started by /bin/sh -c) serving any number of models.
/// Calls are serialized; a protocol or process failure throws Error(Plugin)
/// and leaves the client unusable.
class PluginClient {
 public:
  explicit PluginClient(PluginOptions options);
  ~PluginClient();
  PluginClient(const PluginClient&) = delete;
  PluginClient& operator=(const PluginClient&) = delete;

  /// Returns the number of windows the plugin reports having trained on.
  std::size_t train(const std::string& model_key, std::uint64_t seed,
                    std::span<const PluginClip> clips);

  /// Per-clip labels, in request order.
  std::vector<ClassLabel> predict(const std::string& model_key, std::span<const PluginClip> clips);

  ClassLabel predict_one(const std::string& model_key, std::string_view id,
                         const MultiChannelSeries& clip);

  /// Sends one raw request line and returns the parsed reply.
  nlohmann::json exchange(const nlohmann::json& request);

 private:
  void start();
  void stop() noexcept;
  nlohmann::json exchange_locked(const nlohmann::json& request);
  std::string read_line();

  PluginOptions options_;
  std::mutex mutex_;
  int pid_ = -1;
  int fd_ = -1;
  bool broken_ = false;
  std::string buffer_;
};

/// Trains a plugin model on `train`, scores it on `dev`, and wraps the result.
/// Process failures, protocol violations and timeouts yield a module with
/// failed = true and dev_accuracy 0 instead of throwing.
TrainedModule plugin_adapter(const ModuleSpec& spec, const std::shared_ptr<PluginClient>& client,
                             const std::string& model_key, std::uint64_t seed,
                             std::span<const PluginClip> train, std::span<const PluginClip> dev);

}  // namespace isr
