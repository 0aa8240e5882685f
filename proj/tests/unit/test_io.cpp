#include <doctest.h>

#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "isr/base64.hpp"
#include "isr/cohort_io.hpp"
#include "isr/error.hpp"
#include "isr/random.hpp"
#include "isr/synth.hpp"
#include "isr/text.hpp"
#include "small_cohort.hpp"

using namespace isr;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("isr_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("base64 known vectors") {
  CHECK(base64_encode(bytes("")) == "");
  CHECK(base64_encode(bytes("f")) == "Zg==");
  CHECK(base64_encode(bytes("fo")) == "Zm8=");
  CHECK(base64_encode(bytes("foo")) == "Zm9v");
  CHECK(base64_encode(bytes("foobar")) == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYmE=") == bytes("fooba"));
  CHECK_THROWS_AS(base64_decode("Zm9v!"), Error);
  CHECK_THROWS_AS(base64_decode("Zm9"), Error);
}

TEST_CASE("float32 packing") {
  const std::vector<float> v = {1.0f, -2.5f, 3.25e-7f, 0.0f};
  CHECK(decode_float32_le(encode_float32_le(v)) == v);
  CHECK(encode_float32_le(std::vector<float>{1.0f}) == "AACAPw==");
}

TEST_CASE("text helpers") {
  CHECK(format_fixed(0.123456, 4) == "0.1235");
  CHECK(parse_double(format_double(0.1)) == 0.1);
  CHECK(parse_double("-3.5e2") == -350.0);
  CHECK_THROWS_AS(parse_double("1.0x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK(parse_int("42") == 42);
  const auto f = split_csv("a,,b");
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());
}

TEST_CASE("seed derivation separates tags and indices") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("session CSV round trip and validation") {
  const auto cohort = generate_cohort(testutil::small_config(), 1);
  const auto& s = cohort.sessions.front();
  std::stringstream io;
  write_session_csv(io, s);
  CHECK(io.str().rfind("t,dist_m,throttle,brake,steering,velocity,jerk,lane_pos,heading_err\n", 0) == 0);
  Session meta = s;
  meta.series = {};
  meta.dist_m.clear();
  const auto back = read_session_csv(io, meta, 10.0);
  CHECK(back.series == s.series);
  CHECK(back.dist_m == s.dist_m);

  std::stringstream bad("t,dist_m,throttle\n0,0,1\n");
  CHECK_THROWS_AS(read_session_csv(bad, meta, 10.0), Error);
  std::stringstream narrow("t,dist_m,throttle,brake,steering,velocity,jerk,lane_pos,heading_err\n0,0,1\n");
  CHECK_THROWS_AS(read_session_csv(narrow, meta, 10.0), Error);
}

TEST_CASE("ingest block-averages to 10 Hz") {
  Session raw;
  raw.id = "x";
  std::vector<Frame> f(12);
  for (std::size_t i = 0; i < 12; ++i) {
    f[i].fill(static_cast<double>(i));
    raw.dist_m.push_back(static_cast<double>(i));
  }
  raw.series = MultiChannelSeries(60.0, f);
  const auto s = ingest_session(raw);
  REQUIRE(s.series.frame_count() == 2);
  CHECK(s.series.rate_hz() == 10.0);
  CHECK(s.series[1][3] == doctest::Approx(8.5));
  CHECK(s.dist_m[0] == doctest::Approx(2.5));
  raw.series = MultiChannelSeries(25.0, f);
  CHECK_THROWS_AS(ingest_session(raw), Error);
}

TEST_CASE("route JSON round trip") {
  const RouteLattice r("drive9", 4000, {{"a", 100, 500}, {"b", 2000, 2400}});
  const auto back = route_from_json(route_to_json(r));
  CHECK(back.route_id() == "drive9");
  CHECK(back.length_m() == 4000);
  CHECK(back.event_waypoints() == r.event_waypoints());
  CHECK_THROWS_AS(route_from_json(nlohmann::json{{"route_id", "x"}}), Error);
}

TEST_CASE("cohort round trip through disk") {
  const auto dir = scratch("cohort");
  const auto cohort = generate_cohort(testutil::small_config(), 2);
  write_cohort(cohort, dir);
  for (const auto& p : {dir, dir / "cohort.json"}) {
    const auto back = load_cohort(p);
    REQUIRE(back.sessions.size() == cohort.sessions.size());
    REQUIRE(back.routes.size() == 2);
    for (std::size_t i = 0; i < back.sessions.size(); ++i) {
      CHECK(back.sessions[i].id == cohort.sessions[i].id);
      CHECK(back.sessions[i].label == cohort.sessions[i].label);
      CHECK(back.sessions[i].participant == cohort.sessions[i].participant);
      CHECK(back.sessions[i].series == cohort.sessions[i].series);
      CHECK(back.sessions[i].dist_m == cohort.sessions[i].dist_m);
    }
    CHECK(back.route("r1").event_waypoints().count() == 160);
    CHECK(back.sessions_for("r2").size() == 15);
  }
  CHECK_THROWS_AS(load_cohort(dir / "missing"), Error);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK_THROWS_AS(read_json_file(dir / "broken.json"), Error);
  fs::remove_all(dir);
}

}
