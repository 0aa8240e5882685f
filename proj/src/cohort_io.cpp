#include "isr/cohort_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "isr/error.hpp"
#include "isr/text.hpp"

namespace isr {

namespace fs = std::filesystem;

const RouteLattice& Cohort::route(const std::string& route_id) const {
  for (const auto& r : routes) {
    if (r.route_id() == route_id) return r;
  }
  throw Error(ErrorKind::Data, "unknown route '" + route_id + "'");
}

std::vector<Session> Cohort::sessions_for(const std::string& route_id) const {
  std::vector<Session> out;
  for (const auto& s : sessions) {
    if (s.route_id == route_id) out.push_back(s);
  }
  return out;
}

Session ingest_session(Session raw) {
  const double ratio = raw.series.rate_hz() / kIngestRateHz;
  const auto factor = static_cast<std::size_t>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9) {
    throw Error(ErrorKind::Data, "session " + raw.id + " rate is not a multiple of 10 Hz");
  }
  if (factor == 1) return raw;
  raw.series = paa_downsample(raw.series, factor);
  raw.dist_m = paa_values(raw.dist_m, factor);
  return raw;
}

void write_session_csv(std::ostream& out, const Session& session) {
  out << "t,dist_m";
  for (auto name : kChannelNames) out << ',' << name;
  out << '\n';
  const double rate = session.series.rate_hz();
  for (std::size_t i = 0; i < session.series.frame_count(); ++i) {
    out << format_fixed(static_cast<double>(i) / rate, 4) << ',' << format_fixed(session.dist_m[i], 4);
    for (double v : session.series[i]) out << ',' << format_fixed(v, 4);
    out << '\n';
  }
}

Session read_session_csv(std::istream& in, Session meta, double rate_hz) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Data, "session " + meta.id + ": empty file");
  const auto header = split_csv(line);
  if (header.size() != 2 + kChannelCount || header[0] != "t" || header[1] != "dist_m") {
    throw Error(ErrorKind::Data, "session " + meta.id + ": unexpected header");
  }
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (header[2 + c] != kChannelNames[c]) {
      throw Error(ErrorKind::Data, "session " + meta.id + ": unexpected channel " + std::string(header[2 + c]));
    }
  }
  std::vector<Frame> frames;
  std::vector<double> dist;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2 + kChannelCount) {
      throw Error(ErrorKind::Data, "session " + meta.id + ": row " + std::to_string(row) + " has wrong width");
    }
    dist.push_back(parse_double(cells[1]));
    Frame f{};
    for (std::size_t c = 0; c < kChannelCount; ++c) f[c] = parse_double(cells[2 + c]);
    frames.push_back(f);
  }
  meta.series = MultiChannelSeries(rate_hz, std::move(frames));
  meta.dist_m = std::move(dist);
  return meta;
}

nlohmann::json route_to_json(const RouteLattice& route) {
  auto events = nlohmann::json::array();
  for (const auto& e : route.events()) {
    events.push_back({{"name", e.name}, {"start_m", e.start_m}, {"end_m", e.end_m}});
  }
  return {{"route_id", route.route_id()}, {"length_m", route.length_m()}, {"events", events}};
}

RouteLattice route_from_json(const nlohmann::json& j) {
  try {
    std::vector<RouteEvent> events;
    for (const auto& e : j.value("events", nlohmann::json::array())) {
      events.push_back({e.value("name", std::string()), e.at("start_m").get<int>(), e.at("end_m").get<int>()});
    }
    return RouteLattice(j.at("route_id").get<std::string>(), j.at("length_m").get<int>(), std::move(events));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("bad route JSON: ") + e.what());
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Data, "write failed for " + path.string());
}

}  // namespace

void write_cohort(const Cohort& cohort, const fs::path& dir,
                  const std::vector<nlohmann::json>& route_extras) {
  std::error_code ec;
  fs::create_directories(dir / "routes", ec);
  fs::create_directories(dir / "sessions", ec);
  if (ec) throw Error(ErrorKind::Data, "cannot create " + dir.string());

  auto routes = nlohmann::json::array();
  for (std::size_t i = 0; i < cohort.routes.size(); ++i) {
    const auto& r = cohort.routes[i];
    auto j = route_to_json(r);
    if (i < route_extras.size()) j.update(route_extras[i]);
    const auto rel = "routes/" + r.route_id() + ".json";
    write_text(dir / rel, j.dump(2) + "\n");
    routes.push_back({{"route_id", r.route_id()}, {"path", rel}});
  }

  auto sessions = nlohmann::json::array();
  for (const auto& s : cohort.sessions) {
    const auto rel = "sessions/" + s.id + ".csv";
    std::ostringstream csv;
    write_session_csv(csv, s);
    write_text(dir / rel, csv.str());
    sessions.push_back({{"id", s.id},
                        {"participant", s.participant},
                        {"label", std::string(to_string(s.label))},
                        {"route", s.route_id},
                        {"rate_hz", s.series.rate_hz()},
                        {"path", rel}});
  }
  const nlohmann::json manifest = {{"config", cohort.config}, {"routes", routes}, {"sessions", sessions}};
  write_text(dir / "cohort.json", manifest.dump(2) + "\n");
}

Cohort load_cohort(const fs::path& path) {
  const auto manifest_path = fs::is_directory(path) ? path / "cohort.json" : path;
  const auto dir = manifest_path.parent_path();
  const auto manifest = read_json_file(manifest_path);
  Cohort cohort;
  try {
    cohort.config = manifest.value("config", nlohmann::json());
    for (const auto& r : manifest.at("routes")) {
      cohort.routes.push_back(route_from_json(read_json_file(dir / r.at("path").get<std::string>())));
    }
    for (const auto& s : manifest.at("sessions")) {
      Session meta;
      meta.id = s.at("id").get<std::string>();
      meta.participant = s.at("participant").get<std::string>();
      meta.route_id = s.at("route").get<std::string>();
      const auto label = parse_label(s.at("label").get<std::string>());
      if (!label) throw Error(ErrorKind::Data, "session " + meta.id + ": unknown label");
      meta.label = *label;
      const auto file = dir / s.at("path").get<std::string>();
      std::ifstream in(file);
      if (!in) throw Error(ErrorKind::Data, "cannot open " + file.string());
      cohort.sessions.push_back(
          ingest_session(read_session_csv(in, std::move(meta), s.value("rate_hz", kIngestRateHz))));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("bad cohort manifest: ") + e.what());
  }
  for (const auto& s : cohort.sessions) cohort.route(s.route_id);
  return cohort;
}

}  // namespace isr
