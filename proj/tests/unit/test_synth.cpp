#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "isr/cohort_io.hpp"
#include "isr/error.hpp"
#include "isr/synth.hpp"
#include "small_cohort.hpp"

using namespace isr;
namespace fs = std::filesystem;

namespace {

const Cohort& default_cohort() {
  static const Cohort c = generate_cohort(CohortConfig::default_fixture(1, 1.0), 4);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct MeanSe {
  double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

// Per-session mean of one channel over frames inside (or outside) any event.
std::vector<double> session_means(const Cohort& c, ClassLabel label, Channel ch, bool inside) {
  std::vector<double> out;
  for (const auto& s : c.sessions) {
    if (s.label != label) continue;
    const auto& ev = c.route(s.route_id).events();
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.dist_m.size(); ++i) {
      bool in = false;
      for (const auto& e : ev) in = in || (s.dist_m[i] >= e.start_m - 50 && s.dist_m[i] < e.end_m + 50);
      if (in != inside) continue;
      sum += s.series.value(i, ch);
      ++n;
    }
    if (n > 0) out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("default fixture shape") {
  const auto& c = default_cohort();
  CHECK(c.sessions.size() == 179);
  CHECK(c.routes.size() == 4);
  std::map<ClassLabel, int> per_label;
  std::set<std::string> participants;
  for (const auto& s : c.sessions) {
    ++per_label[s.label];
    participants.insert(s.participant);
    CHECK(s.series.rate_hz() == 10.0);
  }
  CHECK(participants.size() == 30);
  CHECK(per_label[ClassLabel::Control] == 60);
  CHECK(per_label[ClassLabel::Regulated] == 60);
  CHECK(per_label[ClassLabel::Delayed] == 59);
  CHECK(c.sessions_for("drive3").size() == 44);
}

TEST_CASE("distance is monotone and reaches the route end") {
  for (const auto& s : default_cohort().sessions) {
    const double len = default_cohort().route(s.route_id).length_m();
    CHECK(std::is_sorted(s.dist_m.begin(), s.dist_m.end()));
    CHECK(s.dist_m.back() >= 0.99 * len);
    CHECK(s.dist_m.back() < len + 1.0);
    const double minutes = static_cast<double>(s.series.frame_count()) / 10.0 / 60.0;
    CHECK(minutes >= 6.0 * 0.95);
    CHECK(minutes <= 17.0 * 1.05);
  }
}

TEST_CASE("generation is deterministic and independent of jobs") {
  const auto cfg = testutil::small_config(5);
  const auto a = generate_cohort(cfg, 1);
  const auto b = generate_cohort(cfg, 3);
  REQUIRE(a.sessions.size() == b.sessions.size());
  for (std::size_t i = 0; i < a.sessions.size(); ++i) CHECK(a.sessions[i].series == b.sessions[i].series);
  const auto other = generate_cohort(testutil::small_config(6), 1);
  CHECK_FALSE(other.sessions[0].series == a.sessions[0].series);
}

TEST_CASE("written files are byte-identical for one seed") {
  const auto base = fs::temp_directory_path() / ("isr_synth_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const auto cfg = testutil::small_config(9);
  write_synthetic_cohort(cfg, base / "a", 1);
  write_synthetic_cohort(cfg, base / "b", 2);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), base / "a");
    CHECK(slurp(e.path()) == slurp(base / "b" / rel));
    ++files;
  }
  CHECK(files == 30 + 2 + 1);
  const auto loaded = load_cohort(base / "a");
  CHECK(loaded.sessions[3].series == generate_cohort(cfg, 1).sessions[3].series);
  CHECK(loaded.route("r1").event_waypoints() == ground_truth_waypoints(cfg, "r1"));
  fs::remove_all(base);
}

TEST_CASE("higher emit rates are written and ingested back to 10 Hz") {
  auto cfg = testutil::small_config(2, 1.0, 2);
  cfg.emit_rate_hz = 30;
  const auto dir = fs::temp_directory_path() / ("isr_emit_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  write_synthetic_cohort(cfg, dir, 1);
  const auto manifest = read_json_file(dir / "cohort.json");
  CHECK(manifest["sessions"][0]["rate_hz"] == 30.0);
  const auto c = load_cohort(dir);
  CHECK(c.sessions[0].series.rate_hz() == 10.0);
  fs::remove_all(dir);
}

TEST_CASE("ground truth waypoints") {
  auto cfg = testutil::small_config();
  CHECK(ground_truth_waypoints(cfg, "r2").count() == 0);
  cfg.routes[0].events = {{"e", 2000, 2400, 1.0}};
  CHECK(ground_truth_waypoints(cfg, "r1").count() == 80);
  cfg.routes[0].events[0].delta = 0.0;
  CHECK(ground_truth_waypoints(cfg, "r1").count() == 0);
  CHECK(ground_truth_waypoints(CohortConfig::default_fixture(), "drive1").count() == 1360);
  CHECK_THROWS_AS(ground_truth_waypoints(cfg, "nope"), Error);
}

TEST_CASE("classes differ only inside events") {
  const auto& c = default_cohort();
  const auto ctrl_out = mean_se(session_means(c, ClassLabel::Control, Channel::LanePosition, false));
  const auto del_out = mean_se(session_means(c, ClassLabel::Delayed, Channel::LanePosition, false));
  CHECK(std::abs(ctrl_out.mean - del_out.mean) < 3 * std::hypot(ctrl_out.se, del_out.se));
  for (auto ch : {Channel::Velocity, Channel::Throttle, Channel::HeadingError}) {
    const auto a = mean_se(session_means(c, ClassLabel::Control, ch, false));
    const auto b = mean_se(session_means(c, ClassLabel::Regulated, ch, false));
    CHECK(std::abs(a.mean - b.mean) < 3 * std::hypot(a.se, b.se));
  }
  const auto ctrl_in = mean_se(session_means(c, ClassLabel::Control, Channel::LanePosition, true));
  const auto reg_in = mean_se(session_means(c, ClassLabel::Regulated, Channel::LanePosition, true));
  const auto del_in = mean_se(session_means(c, ClassLabel::Delayed, Channel::LanePosition, true));
  CHECK(reg_in.mean - ctrl_in.mean > 0.3);
  CHECK(del_in.mean - reg_in.mean > 0.3);
}

TEST_CASE("config JSON") {
  const auto cfg = CohortConfig::from_json(nlohmann::json{{"fixture", "default"}, {"seed", 4}, {"delta", 0.0}});
  CHECK(cfg.seed == 4);
  CHECK(cfg.routes.size() == 4);
  for (const auto& r : cfg.routes)
    for (const auto& e : r.events) CHECK(e.delta == 0.0);
  const auto back = CohortConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK_THROWS_AS(CohortConfig::from_json(nlohmann::json{{"routes", {{{"id", "x"}, {"length_m", 1000}}}}}), Error);
  auto bad = testutil::small_config();
  bad.emit_rate_hz = 25;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = testutil::small_config();
  bad.routes[0].events[0].delta = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

}
