// Stand-in classifier process for the plugin protocol. Each clip is reduced
// to its per-channel mean over all windows; prediction returns the label of
// the nearest training clip.
//
//   echo_plugin [--majority | --error | --malformed | --crash]
//
// --majority predicts the most frequent training label for every clip.
// --error answers every request with an error frame, --malformed replies with
// a line that is not JSON, --crash exits without replying.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "isr/base64.hpp"

namespace {

using Mean = std::array<double, 7>;

struct Model {
  std::vector<Mean> means;
  std::vector<std::string> labels;
};

Mean clip_mean(const nlohmann::json& windows, std::size_t channels) {
  Mean m{};
  std::size_t frames = 0;
  for (const auto& w : windows) {
    const auto values = isr::decode_float32_le(w.get<std::string>());
    for (std::size_t i = 0; i + channels <= values.size(); i += channels) {
      for (std::size_t c = 0; c < channels && c < m.size(); ++c) m[c] += values[i + c];
      ++frames;
    }
  }
  if (frames > 0) for (auto& v : m) v /= static_cast<double>(frames);
  return m;
}

void send(const nlohmann::json& j) {
  std::cout << j.dump() << '\n' << std::flush;
}

void send_error(const std::string& message) {
  send({{"type", "error"}, {"payload", {{"message", message}}}});
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode;
  if (argc > 1) mode = argv[1];

  std::map<std::string, Model> models;
  std::size_t channels = 7;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "--crash") return 3;
    if (mode == "--malformed") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }
    if (mode == "--error") {
      send_error("configured to fail");
      continue;
    }
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      send_error("request is not JSON");
      return 2;
    }
    try {
      const auto type = request.at("type").get<std::string>();
      const auto& payload = request.at("payload");
      const auto key = payload.at("model").get<std::string>();
      if (type == "train") {
        channels = payload.value("channels", std::size_t{7});
        Model m;
        std::size_t windows = 0;
        for (const auto& clip : payload.at("clips")) {
          m.means.push_back(clip_mean(clip.at("windows"), channels));
          m.labels.push_back(clip.at("label").get<std::string>());
          windows += clip.at("windows").size();
        }
        models[key] = std::move(m);
        send({{"type", "result"}, {"payload", {{"model", key}, {"trained_windows", windows}}}});
      } else if (type == "predict") {
        const auto it = models.find(key);
        if (it == models.end() || it->second.means.empty()) {
          send_error("unknown model " + key);
          continue;
        }
        auto predictions = nlohmann::json::array();
        if (mode == "--majority") {
          std::map<std::string, std::size_t> counts;
          for (const auto& l : it->second.labels) ++counts[l];
          std::string top;
          std::size_t best = 0;
          for (const auto* l : {"CONTROL", "REGULATED", "DELAYED"}) {
            if (counts[l] > best) {
              best = counts[l];
              top = l;
            }
          }
          for (const auto& clip : payload.at("clips"))
            predictions.push_back({{"id", clip.at("id")}, {"label", top}, {"windows", clip.at("windows").size()}});
          send({{"type", "result"}, {"payload", {{"predictions", predictions}}}});
          continue;
        }
        for (const auto& clip : payload.at("clips")) {
          const auto q = clip_mean(clip.at("windows"), channels);
          std::size_t best = 0;
          double best_d = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < it->second.means.size(); ++i) {
            double d = 0.0;
            for (std::size_t c = 0; c < q.size(); ++c) d += (q[c] - it->second.means[i][c]) * (q[c] - it->second.means[i][c]);
            if (d < best_d) {
              best_d = d;
              best = i;
            }
          }
          predictions.push_back({{"id", clip.at("id")},
                                 {"label", it->second.labels[best]},
                                 {"windows", clip.at("windows").size()}});
        }
        send({{"type", "result"}, {"payload", {{"predictions", predictions}}}});
      } else {
        send_error("unknown request type " + type);
        return 2;
      }
    } catch (const std::exception& e) {
      send_error(e.what());
      return 2;
    }
  }
  return 0;
}
