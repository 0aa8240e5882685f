#include "isr/plugin.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "isr/base64.hpp"
#include "isr/error.hpp"

extern char** environ;

namespace isr {

std::vector<std::string> encode_plugin_windows(const MultiChannelSeries& clip) {
  std::vector<Frame> frames(clip.frames().begin(), clip.frames().end());
  if (frames.empty()) frames.push_back(Frame{});
  while (frames.size() < kPluginWindowFrames) frames.push_back(frames.back());

  std::vector<std::string> out;
  std::vector<float> packed(kPluginWindowFrames * kChannelCount);
  for (std::size_t start = 0; start + kPluginWindowFrames <= frames.size();
       start += kPluginWindowStride) {
    for (std::size_t f = 0; f < kPluginWindowFrames; ++f) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        packed[f * kChannelCount + c] = static_cast<float>(frames[start + f][c]);
      }
    }
    out.push_back(encode_float32_le(packed));
  }
  return out;
}

std::string plugin_command(const std::string& fallback) {
  const char* env = std::getenv(kPluginCommandEnv);
  if (env != nullptr && *env != '\0') return env;
  return fallback;
}

PluginClient::PluginClient(PluginOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw Error(ErrorKind::Plugin, "no plugin command configured");
  start();
}

PluginClient::~PluginClient() { stop(); }

void PluginClient::start() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorKind::Plugin, std::string("socketpair failed: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  std::string cmd = options_.command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw Error(ErrorKind::Plugin, std::string("cannot launch plugin: ") + std::strerror(rc));
  }
  pid_ = pid;
  fd_ = fds[0];
}

void PluginClient::stop() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string PluginClient::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) throw Error(ErrorKind::Plugin, "plugin timed out");
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::Plugin, "poll failed");
    }
    if (ready == 0) continue;
    char chunk[65536];
    const auto got = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::Plugin, "plugin read failed");
    }
    if (got == 0) throw Error(ErrorKind::Plugin, "plugin closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

nlohmann::json PluginClient::exchange_locked(const nlohmann::json& request) {
  if (broken_) throw Error(ErrorKind::Plugin, "plugin process unusable after earlier failure");
  try {
    const std::string line = request.dump() + "\n";
    std::size_t sent = 0;
    while (sent < line.size()) {
      const auto n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::Plugin, "plugin write failed");
      }
      sent += static_cast<std::size_t>(n);
    }
    const auto reply_text = read_line();
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(reply_text);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::Plugin, "malformed plugin reply");
    }
    if (!reply.is_object() || !reply.contains("type") || !reply["type"].is_string() ||
        !reply.contains("payload")) {
      throw Error(ErrorKind::Plugin, "plugin reply missing type/payload");
    }
    if (reply["type"] == "error") {
      std::string message = "plugin error";
      if (reply["payload"].is_object() && reply["payload"].contains("message")) {
        message += ": " + reply["payload"]["message"].dump();
      }
      throw Error(ErrorKind::Plugin, message);
    }
    if (reply["type"] != "result") throw Error(ErrorKind::Plugin, "unexpected plugin reply type");
    return reply;
  } catch (...) {
    broken_ = true;
    throw;
  }
}

nlohmann::json PluginClient::exchange(const nlohmann::json& request) {
  std::lock_guard lock(mutex_);
  return exchange_locked(request);
}

std::size_t PluginClient::train(const std::string& model_key, std::uint64_t seed,
                                std::span<const PluginClip> clips) {
  auto items = nlohmann::json::array();
  for (const auto& c : clips) {
    if (!c.label || !c.clip) throw Error(ErrorKind::Invalid, "training clip needs label and data");
    items.push_back({{"id", c.id}, {"label", std::string(to_string(*c.label))},
                     {"windows", encode_plugin_windows(*c.clip)}});
  }
  nlohmann::json request = {
      {"type", "train"},
      {"payload",
       {{"model", model_key}, {"seed", seed}, {"channels", kChannelCount},
        {"window", kPluginWindowFrames}, {"clips", items}}}};
  const auto reply = exchange(request);
  const auto& payload = reply["payload"];
  if (!payload.is_object() || !payload.contains("trained_windows") ||
      !payload["trained_windows"].is_number_unsigned()) {
    throw Error(ErrorKind::Plugin, "train reply missing trained_windows");
  }
  return payload["trained_windows"].get<std::size_t>();
}

std::vector<ClassLabel> PluginClient::predict(const std::string& model_key,
                                              std::span<const PluginClip> clips) {
  auto items = nlohmann::json::array();
  for (const auto& c : clips) {
    if (!c.clip) throw Error(ErrorKind::Invalid, "prediction clip needs data");
    items.push_back({{"id", c.id}, {"windows", encode_plugin_windows(*c.clip)}});
  }
  nlohmann::json request = {{"type", "predict"},
                            {"payload", {{"model", model_key}, {"clips", items}}}};
  const auto reply = exchange(request);
  const auto& payload = reply["payload"];
  if (!payload.is_object() || !payload.contains("predictions") ||
      !payload["predictions"].is_array() || payload["predictions"].size() != clips.size()) {
    throw Error(ErrorKind::Plugin, "predict reply has wrong prediction count");
  }
  std::vector<ClassLabel> labels;
  labels.reserve(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto& p = payload["predictions"][i];
    if (!p.is_object() || !p.contains("id") || p["id"] != clips[i].id || !p.contains("label") ||
        !p["label"].is_string()) {
      throw Error(ErrorKind::Plugin, "predict reply out of order or malformed");
    }
    const auto label = parse_label(p["label"].get<std::string>());
    if (!label) throw Error(ErrorKind::Plugin, "plugin returned an unknown label");
    labels.push_back(*label);
  }
  return labels;
}

ClassLabel PluginClient::predict_one(const std::string& model_key, std::string_view id,
                                     const MultiChannelSeries& clip) {
  const PluginClip query{std::string(id), std::nullopt, &clip};
  return predict(model_key, std::span<const PluginClip>(&query, 1)).front();
}

TrainedModule plugin_adapter(const ModuleSpec& spec, const std::shared_ptr<PluginClient>& client,
                             const std::string& model_key, std::uint64_t seed,
                             std::span<const PluginClip> train, std::span<const PluginClip> dev) {
  TrainedModule module;
  module.spec = spec;
  module.spec.kind = ClassifierKind::Plugin;
  for (const auto& c : train) module.training_ids.push_back(c.id);
  for (const auto& c : dev) module.development_ids.push_back(c.id);
  PluginModel model{client, model_key, {}};
  try {
    if (!client) throw Error(ErrorKind::Plugin, "no plugin client");
    client->train(model_key, seed, train);
    const auto predictions = client->predict(model_key, dev);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      model.replay.emplace_back(dev[i].id, predictions[i]);
      if (dev[i].label && *dev[i].label == predictions[i]) ++correct;
    }
    module.dev_accuracy =
        dev.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(dev.size());
  } catch (const Error&) {
    module.failed = true;
    module.dev_accuracy = 0.0;
  }
  module.model = std::move(model);
  return module;
}

}  // namespace isr
