#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "isr/isr.h"

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({"seed":3,"routes":[{"id":"r1","length_m":2400,
  "events":[{"name":"e","start_m":800,"end_m":1600,"delta":1.0}]}],
  "control_participants":5,"experimental_participants":5,
  "min_duration_min":1.0,"max_duration_min":5.0})";

fs::path scratch() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / ("isr_capi_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path cohort_dir() {
  static const fs::path d = [] {
    const auto out = scratch() / "cohort";
    REQUIRE(isr_synth(kSmall, out.c_str(), 2) == ISR_OK);
    return out;
  }();
  return d;
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(isr_version()).size() > 0);
  CHECK(isr_synth("{not json", (scratch() / "x").c_str(), 1) == ISR_ERR_CONFIG);
  CHECK(std::string(isr_last_error()).size() > 0);
  isr_cohort* c = nullptr;
  CHECK(isr_cohort_open((scratch() / "missing").c_str(), 1, &c) == ISR_ERR_DATA);
  CHECK(c == nullptr);
  CHECK(isr_cohort_open(nullptr, 1, &c) == ISR_ERR_INVALID);
  isr_cohort_close(nullptr);
}

TEST_CASE("distance") {
  const std::vector<double> a(7 * 3, 0.0);
  std::vector<double> b(7 * 2, 0.0);
  b[0] = 3;
  b[1] = 4;
  double out = -1;
  CHECK(isr_distance(a.data(), 3, b.data(), 2, "DTW", &out) == ISR_OK);
  CHECK(out == doctest::Approx(5.0));
  CHECK(isr_distance(a.data(), 3, b.data(), 2, "SC_DTW:1", &out) == ISR_OK);
  CHECK(isr_distance(a.data(), 3, b.data(), 2, "BOGUS", &out) == ISR_ERR_CONFIG);
  CHECK(isr_distance(a.data(), 0, b.data(), 2, "DTW", &out) == ISR_ERR_INVALID);
}

TEST_CASE("grid sizes") {
  size_t n = 0;
  CHECK(isr_grid_size("full", 0, &n) == ISR_OK);
  CHECK(n == 2640);
  CHECK(isr_grid_size("full", 1, &n) == ISR_OK);
  CHECK(n == 2728);
  CHECK(isr_grid_size("small", 0, &n) == ISR_OK);
  CHECK(n == 32);
  CHECK(isr_grid_size("medium", 0, &n) == ISR_ERR_CONFIG);
  const auto list = scratch() / "grid.csv";
  CHECK(isr_grid_list("full", 1, list.c_str()) == ISR_OK);
  const auto text = slurp(list);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2729);
}

TEST_CASE("cohort handle") {
  isr_cohort* c = nullptr;
  REQUIRE(isr_cohort_open(cohort_dir().c_str(), 2, &c) == ISR_OK);
  size_t n = 0;
  CHECK(isr_cohort_session_count(c, &n) == ISR_OK);
  CHECK(n == 15);
  CHECK(isr_cohort_route_count(c, &n) == ISR_OK);
  CHECK(n == 1);
  const char* id = nullptr;
  CHECK(isr_cohort_route_id(c, 0, &id) == ISR_OK);
  CHECK(std::string(id) == "r1");
  CHECK(isr_cohort_route_id(c, 1, &id) == ISR_ERR_INVALID);

  const auto mats = scratch() / "mats";
  CHECK(isr_simmat(c, "r1", 1, "FAST_DTW:1", mats.c_str()) == ISR_OK);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(mats)) files += e.path().extension() == ".csv" ? 1 : 0;
  // Two overlapping top-level sections share one child.
  CHECK(files == 5 + 1);
  CHECK(fs::exists(mats / "r1_0-800_FAST_DTW-1.csv"));
  CHECK(isr_simmat(c, "nope", 0, "DTW", mats.c_str()) == ISR_ERR_DATA);
  CHECK(isr_simmat(c, "r1", 0, "DTW:4", mats.c_str()) == ISR_ERR_CONFIG);
  isr_cohort_close(c);
}

TEST_CASE("evaluate and recover") {
  isr_cohort* c = nullptr;
  REQUIRE(isr_cohort_open(cohort_dir().c_str(), 1, &c) == ISR_OK);
  const char* params = R"({"max_depth":2,"threshold":0.3,"paradigm":"ANY","classifier":"KNN","similarity":"FAST_DTW:1"})";
  const auto csv = scratch() / "eval.csv";
  const auto fp = scratch() / "eval.footprints.json";
  CHECK(isr_evaluate(c, "r1", params, 5, nullptr, csv.c_str(), fp.c_str()) == ISR_OK);
  const auto first = slurp(csv);
  CHECK(first.rfind("route,similarity,module,paradigm,max_depth,threshold,acc,puor,pior,jiwu,jiwe", 0) == 0);
  CHECK(isr_evaluate(c, "r1", params, 5, nullptr, csv.c_str(), nullptr) == ISR_OK);
  CHECK(slurp(csv) == first);
  CHECK(isr_evaluate(c, "r1", "{\"max_depth\":9}", 5, nullptr, csv.c_str(), nullptr) == ISR_ERR_CONFIG);
  CHECK(isr_evaluate(c, "r1", "{]", 5, nullptr, csv.c_str(), nullptr) == ISR_ERR_CONFIG);

  const auto rec = scratch() / "recover.csv";
  CHECK(isr_recover(csv.c_str(), fp.c_str(), cohort_dir().c_str(), rec.c_str()) == ISR_OK);
  const auto text = slurp(rec);
  CHECK(text.rfind("route,grid_index,acc,truth,unanimous,hit,precision,recall,jiwe\nr1,", 0) == 0);
  isr_cohort_close(c);
}

TEST_CASE("plugin failures surface as plugin errors") {
  isr_cohort* c = nullptr;
  REQUIRE(isr_cohort_open(cohort_dir().c_str(), 1, &c) == ISR_OK);
  const char* params = R"({"max_depth":1,"threshold":0.0,"paradigm":"ANY","classifier":"PLUGIN"})";
  const auto csv = scratch() / "plugin.csv";
  CHECK(isr_evaluate(c, "r1", params, 1, "/nonexistent/plugin", csv.c_str(), nullptr) == ISR_ERR_PLUGIN);
  isr_cohort_close(c);
}
