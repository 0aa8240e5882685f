#include "isr/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "isr/error.hpp"
#include "isr/parallel.hpp"
#include "isr/random.hpp"
#include "isr/text.hpp"

namespace isr {

namespace {

constexpr double kMetresPerSecondPerMph = 0.44704;
constexpr int kCsvPlaces = 4;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Config, message);
}

double quantize(double v) { return parse_double(format_fixed(v, kCsvPlaces)); }

std::string participant_id(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%02d", n);
  return buf;
}

struct SessionPlan {
  std::string id;
  std::string participant;
  std::size_t route_index = 0;
  ClassLabel label = ClassLabel::Control;
};

std::vector<SessionPlan> plan_sessions(const CohortConfig& c) {
  std::vector<SessionPlan> out;
  const int total = c.control_participants + c.experimental_participants;
  for (std::size_t r = 0; r < c.routes.size(); ++r) {
    for (int p = 1; p <= total; ++p) {
      const auto pid = participant_id(p);
      std::vector<ClassLabel> labels;
      if (p <= c.control_participants) {
        labels = {ClassLabel::Control};
      } else {
        labels = {ClassLabel::Regulated, ClassLabel::Delayed};
      }
      for (auto label : labels) {
        const bool dropped = std::any_of(c.drop.begin(), c.drop.end(), [&](const DroppedSession& d) {
          return d.participant == pid && d.route_id == c.routes[r].id && d.label == label;
        });
        if (dropped) continue;
        std::string id = c.routes[r].id + "-" + pid + "-" + std::string(to_string(label));
        std::transform(id.begin(), id.end(), id.begin(), [](unsigned char ch) { return std::tolower(ch); });
        out.push_back({id, pid, r, label});
      }
    }
  }
  return out;
}

/// Smooth per-route shapes shared by every session of the route.
struct RouteProfile {
  std::array<double, 2> speed_phase{};
  std::array<double, 2> steer_phase{};

  double speed_shape(double d) const {
    return 1.0 + 0.12 * std::sin(2.0 * std::numbers::pi * d / 1500.0 + speed_phase[0]) +
           0.06 * std::sin(2.0 * std::numbers::pi * d / 470.0 + speed_phase[1]);
  }
  double speed_shape_slope(double d) const {
    return 0.12 * 2.0 * std::numbers::pi / 1500.0 *
               std::cos(2.0 * std::numbers::pi * d / 1500.0 + speed_phase[0]) +
           0.06 * 2.0 * std::numbers::pi / 470.0 *
               std::cos(2.0 * std::numbers::pi * d / 470.0 + speed_phase[1]);
  }
  double steering(double d) const {
    return 15.0 * std::sin(2.0 * std::numbers::pi * d / 900.0 + steer_phase[0]) +
           6.0 * std::sin(2.0 * std::numbers::pi * d / 260.0 + steer_phase[1]);
  }
};

RouteProfile route_profile(const CohortConfig& c, std::size_t route_index) {
  std::mt19937_64 rng(derive_seed(c.seed, "route/" + c.routes[route_index].id));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  RouteProfile p;
  for (auto& x : p.speed_phase) x = phase(rng);
  for (auto& x : p.steer_phase) x = phase(rng);
  return p;
}

class Ar1 {
 public:
  explicit Ar1(double phi) : phi_(phi), innovation_(std::sqrt(1.0 - phi * phi)) {}
  double step(std::mt19937_64& rng, std::normal_distribution<double>& z) {
    x_ = phi_ * x_ + innovation_ * z(rng);
    return x_;
  }
  void reset(double x) { x_ = x; }

 private:
  double phi_;
  double innovation_;
  double x_ = 0.0;
};

/// One session at the base rate.
Session generate_raw(const CohortConfig& c, const SessionPlan& plan, const RouteProfile& profile) {
  const auto& route = c.routes[plan.route_index];
  std::mt19937_64 rng(derive_seed(c.seed, "session/" + plan.id));
  std::normal_distribution<double> z(0.0, 1.0);

  const double length = route.length_m;
  const double slowest = length / (c.max_duration_min * 60.0) / kMetresPerSecondPerMph;
  const double fastest = length / (c.min_duration_min * 60.0) / kMetresPerSecondPerMph;
  const double mean_mph =
      std::clamp(c.mean_speed_mph + c.noise.session_speed_mph * z(rng), slowest, fastest);

  const auto& n = c.noise;
  const double lane_offset = n.session_lane_ft * z(rng);
  Ar1 speed(n.ar_phi), steer(n.ar_phi), lane(n.ar_phi), heading(n.ar_phi), pedal(n.ar_phi),
      brake(n.ar_phi), jerk(n.ar_phi);
  for (auto* a : {&speed, &steer, &lane, &heading, &pedal, &brake, &jerk}) a->reset(z(rng));

  const double dt = 1.0 / c.base_rate_hz;
  std::vector<Frame> frames;
  std::vector<double> dist;
  frames.reserve(static_cast<std::size_t>(length / (mean_mph * kMetresPerSecondPerMph) * c.base_rate_hz * 1.1));
  double d = 0.0;
  double prev_accel = 0.0;
  bool first = true;
  while (d < length) {
    double scale = 0.0;
    for (const auto& e : route.events) {
      if (d >= e.start_m && d < e.end_m) {
        scale = plan.label == ClassLabel::Delayed ? e.delta
                : plan.label == ClassLabel::Regulated ? e.delta / 2.0
                                                      : 0.0;
      }
    }
    const double v_ref = mean_mph * profile.speed_shape(d);
    const double v = std::max(1.0, v_ref + n.speed_mph * speed.step(rng, z));
    // Acceleration of the reference profile along time, mph/s.
    const double accel = mean_mph * profile.speed_shape_slope(d) * v * kMetresPerSecondPerMph;
    const double jerk_ref = first ? 0.0 : (accel - prev_accel) / dt;
    prev_accel = accel;
    first = false;

    const double steer_noise = n.steering_deg * std::sqrt(1.0 + scale) * steer.step(rng, z);
    Frame f{};
    f[static_cast<std::size_t>(Channel::Throttle)] =
        std::clamp(22.0 + 6.0 * accel + n.pedal_pct * pedal.step(rng, z), 0.0, 100.0);
    f[static_cast<std::size_t>(Channel::Brake)] =
        std::max(0.0, -8.0 * accel + 0.5 * n.pedal_pct * brake.step(rng, z));
    f[static_cast<std::size_t>(Channel::Steering)] = profile.steering(d) + steer_noise;
    f[static_cast<std::size_t>(Channel::Velocity)] = v;
    f[static_cast<std::size_t>(Channel::Jerk)] = jerk_ref + 0.2 * jerk.step(rng, z);
    f[static_cast<std::size_t>(Channel::LanePosition)] =
        lane_offset + n.lane_ft * lane.step(rng, z) + scale * c.lane_bias_ft;
    f[static_cast<std::size_t>(Channel::HeadingError)] =
        n.heading_deg * heading.step(rng, z) + 0.05 * steer_noise;
    frames.push_back(f);
    dist.push_back(d);
    d += v * kMetresPerSecondPerMph * dt;
  }

  Session s;
  s.id = plan.id;
  s.participant = plan.participant;
  s.route_id = route.id;
  s.label = plan.label;
  s.series = MultiChannelSeries(c.base_rate_hz, std::move(frames));
  s.dist_m = std::move(dist);
  return s;
}

Session downsample_to(Session s, double rate_hz) {
  const double ratio = s.series.rate_hz() / rate_hz;
  const auto factor = static_cast<std::size_t>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9) {
    throw Error(ErrorKind::Config, "emit rate must divide the base rate");
  }
  if (factor == 1) return s;
  s.series = paa_downsample(s.series, factor);
  s.dist_m = paa_values(s.dist_m, factor);
  return s;
}

Session quantized(Session s) {
  std::vector<Frame> frames(s.series.frames().begin(), s.series.frames().end());
  for (auto& f : frames) for (auto& v : f) v = quantize(v);
  for (auto& v : s.dist_m) v = quantize(v);
  s.series = MultiChannelSeries(s.series.rate_hz(), std::move(frames));
  return s;
}

Cohort generate_at(const CohortConfig& config, double rate_hz, int jobs) {
  config.validate();
  const auto plans = plan_sessions(config);
  std::vector<RouteProfile> profiles;
  for (std::size_t r = 0; r < config.routes.size(); ++r) profiles.push_back(route_profile(config, r));

  Cohort cohort;
  cohort.config = config.to_json();
  for (const auto& r : config.routes) {
    std::vector<RouteEvent> events;
    for (const auto& e : r.events) events.push_back({e.name, e.start_m, e.end_m});
    cohort.routes.emplace_back(r.id, r.length_m, std::move(events));
  }
  cohort.sessions.resize(plans.size());
  parallel_for(plans.size(), jobs, [&](std::size_t i) {
    auto raw = generate_raw(config, plans[i], profiles[plans[i].route_index]);
    cohort.sessions[i] = quantized(downsample_to(std::move(raw), rate_hz));
  });
  return cohort;
}

}  // namespace

void CohortConfig::validate() const {
  require(!routes.empty(), "cohort needs at least one route");
  for (const auto& r : routes) {
    require(!r.id.empty(), "route id must be non-empty");
    require(r.length_m >= kTopLevelLengthM, "route " + r.id + " shorter than 1600 m");
    require(r.length_m % kWaypointSpacingM == 0, "route length must be a multiple of 5 m");
    for (const auto& e : r.events) {
      require(e.delta >= 0.0, "event effect size must be >= 0");
      require(e.start_m >= 0 && e.start_m < e.end_m && e.end_m <= r.length_m,
              "event outside route " + r.id);
      require(e.start_m % kWaypointSpacingM == 0 && e.end_m % kWaypointSpacingM == 0,
              "event bounds must lie on the 5 m grid");
    }
  }
  require(control_participants >= 0 && experimental_participants >= 0 &&
              control_participants + experimental_participants >= 1,
          "participant counts must be non-negative");
  require(control_participants + experimental_participants <= 99, "at most 99 participants");
  require(base_rate_hz >= kIngestRateHz, "base rate must be at least 10 Hz");
  require(emit_rate_hz >= kIngestRateHz && emit_rate_hz <= base_rate_hz, "emit rate out of range");
  const double up = base_rate_hz / kIngestRateHz;
  require(std::abs(up - std::round(up)) < 1e-9, "base rate must be a multiple of 10 Hz");
  const double emit = emit_rate_hz / kIngestRateHz;
  require(std::abs(emit - std::round(emit)) < 1e-9, "emit rate must be a multiple of 10 Hz");
  const double down = base_rate_hz / emit_rate_hz;
  require(std::abs(down - std::round(down)) < 1e-9, "emit rate must divide the base rate");
  require(mean_speed_mph > 0.0, "mean speed must be positive");
  require(min_duration_min > 0.0 && min_duration_min <= max_duration_min, "bad duration range");
  require(noise.ar_phi >= 0.0 && noise.ar_phi < 1.0, "ar_phi must be in [0, 1)");
  for (double s : {noise.speed_mph, noise.session_speed_mph, noise.steering_deg, noise.lane_ft, noise.session_lane_ft,
                   noise.heading_deg, noise.pedal_pct}) {
    require(s >= 0.0, "noise levels must be >= 0");
  }
}

nlohmann::json CohortConfig::to_json() const {
  auto rs = nlohmann::json::array();
  for (const auto& r : routes) {
    auto es = nlohmann::json::array();
    for (const auto& e : r.events) {
      es.push_back({{"name", e.name}, {"start_m", e.start_m}, {"end_m", e.end_m}, {"delta", e.delta}});
    }
    rs.push_back({{"id", r.id}, {"length_m", r.length_m}, {"events", es}});
  }
  auto ds = nlohmann::json::array();
  for (const auto& d : drop) {
    ds.push_back({{"participant", d.participant}, {"route", d.route_id},
                  {"label", std::string(to_string(d.label))}});
  }
  return {{"seed", seed},
          {"routes", rs},
          {"control_participants", control_participants},
          {"experimental_participants", experimental_participants},
          {"base_rate_hz", base_rate_hz},
          {"emit_rate_hz", emit_rate_hz},
          {"mean_speed_mph", mean_speed_mph},
          {"min_duration_min", min_duration_min},
          {"max_duration_min", max_duration_min},
          {"lane_bias_ft", lane_bias_ft},
          {"noise",
           {{"ar_phi", noise.ar_phi},
            {"speed_mph", noise.speed_mph},
            {"session_speed_mph", noise.session_speed_mph},
            {"steering_deg", noise.steering_deg},
            {"lane_ft", noise.lane_ft},
            {"session_lane_ft", noise.session_lane_ft},
            {"heading_deg", noise.heading_deg},
            {"pedal_pct", noise.pedal_pct}}},
          {"drop", ds}};
}

CohortConfig CohortConfig::from_json(const nlohmann::json& j) {
  CohortConfig c;
  try {
    require(j.is_object(), "cohort config must be a JSON object");
    if (j.value("fixture", std::string()) == "default") {
      c = default_fixture(j.value("seed", std::uint64_t{1}), j.value("delta", 1.0));
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("routes")) {
      c.routes.clear();
      for (const auto& r : j.at("routes")) {
        RouteConfig rc;
        rc.id = r.at("id").get<std::string>();
        rc.length_m = r.at("length_m").get<int>();
        for (const auto& e : r.value("events", nlohmann::json::array())) {
          rc.events.push_back({e.value("name", std::string("event")), e.at("start_m").get<int>(),
                               e.at("end_m").get<int>(), e.value("delta", 1.0)});
        }
        c.routes.push_back(std::move(rc));
      }
    }
    c.control_participants = j.value("control_participants", c.control_participants);
    c.experimental_participants = j.value("experimental_participants", c.experimental_participants);
    c.base_rate_hz = j.value("base_rate_hz", c.base_rate_hz);
    c.emit_rate_hz = j.value("emit_rate_hz", c.emit_rate_hz);
    c.mean_speed_mph = j.value("mean_speed_mph", c.mean_speed_mph);
    c.min_duration_min = j.value("min_duration_min", c.min_duration_min);
    c.max_duration_min = j.value("max_duration_min", c.max_duration_min);
    c.lane_bias_ft = j.value("lane_bias_ft", c.lane_bias_ft);
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      c.noise.ar_phi = n.value("ar_phi", c.noise.ar_phi);
      c.noise.speed_mph = n.value("speed_mph", c.noise.speed_mph);
      c.noise.session_speed_mph = n.value("session_speed_mph", c.noise.session_speed_mph);
      c.noise.steering_deg = n.value("steering_deg", c.noise.steering_deg);
      c.noise.lane_ft = n.value("lane_ft", c.noise.lane_ft);
      c.noise.session_lane_ft = n.value("session_lane_ft", c.noise.session_lane_ft);
      c.noise.heading_deg = n.value("heading_deg", c.noise.heading_deg);
      c.noise.pedal_pct = n.value("pedal_pct", c.noise.pedal_pct);
    }
    if (j.contains("drop")) {
      c.drop.clear();
      for (const auto& d : j.at("drop")) {
        const auto label = parse_label(d.at("label").get<std::string>());
        require(label.has_value(), "unknown label in drop list");
        c.drop.push_back({d.at("participant").get<std::string>(), d.at("route").get<std::string>(), *label});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad cohort config: ") + e.what());
  }
  c.validate();
  return c;
}

CohortConfig CohortConfig::default_fixture(std::uint64_t seed, double delta) {
  CohortConfig c;
  c.seed = seed;
  // Events sit on the 400 m sub-section grid and are separated by gaps of
  // 400-800 m, so every depth-1 section is either pure event, pure gap or a
  // known mix.
  struct Layout {
    const char* id;
    int length;
    std::array<std::pair<int, int>, 3> events;
  };
  const std::array<Layout, 4> layouts = {{
      {"drive1", 8400, {{{0, 2400}, {3200, 5600}, {6400, 8400}}}},
      {"drive2", 7600, {{{0, 2400}, {3200, 4800}, {5600, 7600}}}},
      {"drive3", 6400, {{{0, 1600}, {2400, 4000}, {4800, 6400}}}},
      {"drive4", 4800, {{{0, 1200}, {1600, 3200}, {3600, 4800}}}},
  }};
  for (const auto& l : layouts) {
    RouteConfig r{l.id, l.length, {}};
    const char* names[] = {"event-a", "event-b", "event-c"};
    for (std::size_t i = 0; i < l.events.size(); ++i) {
      r.events.push_back({names[i], l.events[i].first, l.events[i].second, delta});
    }
    c.routes.push_back(std::move(r));
  }
  c.drop = {{participant_id(c.control_participants + c.experimental_participants), "drive3",
             ClassLabel::Delayed}};
  return c;
}

Cohort generate_cohort(const CohortConfig& config, int jobs) {
  return generate_at(config, kIngestRateHz, jobs);
}

WaypointSet ground_truth_waypoints(const CohortConfig& config, const std::string& route_id) {
  for (const auto& r : config.routes) {
    if (r.id != route_id) continue;
    RouteLattice lattice(r.id, r.length_m);
    WaypointSet out(lattice.waypoint_count());
    for (const auto& e : r.events) {
      if (e.delta > 0.0) out |= waypoints_of(Section{e.start_m, e.end_m, 0}, lattice);
    }
    return out;
  }
  throw Error(ErrorKind::Config, "unknown route " + route_id);
}

void write_synthetic_cohort(const CohortConfig& config, const std::filesystem::path& dir, int jobs) {
  const auto cohort = generate_at(config, config.emit_rate_hz, jobs);
  std::vector<nlohmann::json> extras;
  for (const auto& r : config.routes) {
    auto deltas = nlohmann::json::object();
    for (const auto& e : r.events) deltas[e.name] = e.delta;
    extras.push_back({{"event_delta", deltas}});
  }
  write_cohort(cohort, dir, extras);
}

}  // namespace isr
