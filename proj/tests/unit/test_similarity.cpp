#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "helpers.hpp"
#include "isr/error.hpp"
#include "isr/similarity.hpp"

using namespace isr;

namespace {

// Plain O(NM) recurrence restricted to cells accepted by `allowed`.
template <typename Pred>
double banded_reference(const MultiChannelSeries& a, const MultiChannelSeries& b, Pred allowed) {
  const auto n = a.frame_count(), m = b.frame_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(n, std::vector<double>(m, inf));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!allowed(i, j)) continue;
      double prev = (i == 0 && j == 0) ? 0.0 : inf;
      if (i > 0) prev = std::min(prev, D[i - 1][j]);
      if (j > 0) prev = std::min(prev, D[i][j - 1]);
      if (i > 0 && j > 0) prev = std::min(prev, D[i - 1][j - 1]);
      D[i][j] = prev + oracle::frame_distance(a[i], b[j]);
    }
  }
  return D[n - 1][m - 1];
}

bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m, std::size_t r) {
  auto round_ratio = [](std::size_t num, std::size_t den) { return (2 * num + den) / (2 * den); };
  if (n >= m) {
    const std::size_t c = n == 1 ? 0 : round_ratio(i * (m - 1), n - 1);
    return (j > c ? j - c : c - j) <= r;
  }
  const std::size_t c = round_ratio(j * (n - 1), m - 1);
  return (i > c ? i - c : c - i) <= r;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("point distance") {
  Frame a{}, b{};
  CHECK(point_distance(a, b) == 0.0);
  b[0] = 3;
  b[4] = 4;
  CHECK(point_distance(a, b) == doctest::Approx(5.0));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto s = testutil::random_series(rng, 2);
    CHECK(rel(point_distance(s[0], s[1]), oracle::frame_distance(s[0], s[1])) < 1e-12);
  }
  const std::vector<double> x(3), y(4);
  CHECK_THROWS_AS(point_distance(x, y), Error);
}

TEST_CASE("dtw basic examples") {
  std::mt19937_64 rng(2);
  const auto a = testutil::random_series(rng, 20);
  CHECK(dtw(a, a) == 0.0);
  const auto x = testutil::random_series(rng, 1), y = testutil::random_series(rng, 1);
  CHECK(dtw(x, y) == doctest::Approx(point_distance(x[0], y[0])));
  CHECK(dtw(testutil::scalar_series({1, 2, 3}), testutil::scalar_series({1, 2, 2, 3})) == 0.0);
  CHECK_THROWS_AS(dtw(a, MultiChannelSeries{}), Error);
}

TEST_CASE("dtw matches path enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  for (int t = 0; t < 200; ++t) {
    const auto a = testutil::random_series(rng, len(rng));
    const auto b = testutil::random_series(rng, len(rng));
    CHECK(rel(dtw(a, b), oracle::dtw_enumerate(a, b)) < 1e-12);
  }
}

TEST_CASE("dtw is symmetric") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = testutil::random_series(rng, 5 + t), b = testutil::random_series(rng, 40 - t / 2);
    CHECK(rel(dtw(a, b), dtw(b, a)) < 1e-12);
  }
}

TEST_CASE("sc_dtw equals a banded reference recurrence") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  for (int t = 0; t < 200; ++t) {
    const auto a = testutil::random_series(rng, len(rng)), b = testutil::random_series(rng, len(rng));
    for (int r : {1, 3, 7}) {
      const auto n = a.frame_count(), m = b.frame_count();
      const double ref = banded_reference(a, b, [&](std::size_t i, std::size_t j) {
        return in_band(i, j, n, m, static_cast<std::size_t>(r));
      });
      CHECK(rel(sc_dtw(a, b, r), ref) < 1e-12);
    }
  }
}

TEST_CASE("approximations dominate dtw and wide bands are exact") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> len(10, 120);
  for (int t = 0; t < 100; ++t) {
    const auto a = testutil::random_series(rng, len(rng)), b = testutil::random_series(rng, len(rng));
    const double d = dtw(a, b);
    double prev_sc = std::numeric_limits<double>::infinity();
    for (int r : kGridRadii) {
      const double sc = sc_dtw(a, b, r);
      CHECK(sc >= d * (1 - 1e-12));
      CHECK(sc <= prev_sc * (1 + 1e-12));
      prev_sc = sc;
      CHECK(fast_dtw(a, b, r) >= d * (1 - 1e-12));
    }
    const int wide = static_cast<int>(std::max(a.frame_count(), b.frame_count()));
    CHECK(rel(sc_dtw(a, b, wide), d) < 1e-12);
  }
}

TEST_CASE("fast_dtw base case and self-similarity") {
  std::mt19937_64 rng(7);
  const auto a = testutil::random_series(rng, 6), b = testutil::random_series(rng, 9);
  CHECK(fast_dtw(a, b, 5) == doctest::Approx(dtw(a, b)).epsilon(1e-12));
  const auto c = testutil::random_series(rng, 300);
  CHECK(fast_dtw(c, c, 1) == 0.0);
  CHECK(sc_dtw(c, c, 1) == 0.0);
  CHECK_THROWS_AS(fast_dtw(a, b, 0), Error);
  CHECK_THROWS_AS(sc_dtw(a, b, 0), Error);
}

TEST_CASE("fast_dtw path is a valid warping path with its reported cost") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto a = testutil::random_series(rng, 50 + 7 * t), b = testutil::random_series(rng, 90);
    const auto r = detail::fast_dtw_with_path(a, b, 2);
    REQUIRE_FALSE(r.path.empty());
    CHECK(r.path.front() == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(r.path.back() == std::pair<std::size_t, std::size_t>{a.frame_count() - 1, b.frame_count() - 1});
    double sum = 0;
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      if (k > 0) {
        const auto di = r.path[k].first - r.path[k - 1].first;
        const auto dj = r.path[k].second - r.path[k - 1].second;
        CHECK(di <= 1);
        CHECK(dj <= 1);
        CHECK(di + dj >= 1);
      }
      sum += oracle::frame_distance(a[r.path[k].first], b[r.path[k].second]);
    }
    CHECK(rel(sum, r.cost) < 1e-9);
  }
}

TEST_CASE("spec names round-trip") {
  for (const auto& s : all_similarity_specs()) CHECK(SimilaritySpec::parse(s.name()) == s);
  CHECK(all_similarity_specs().size() == 15);
  CHECK(SimilaritySpec::parse("SC_DTW:5").radius == 5);
  CHECK_THROWS_AS(SimilaritySpec::parse("DTW:3"), Error);
  CHECK_THROWS_AS(SimilaritySpec::parse("FAST_DTW"), Error);
  CHECK_THROWS_AS(SimilaritySpec::parse("SC_DTW:0"), Error);
  CHECK_THROWS_AS(SimilaritySpec::parse("EUCLID"), Error);
}

TEST_CASE("approximation error") {
  CHECK(*approximation_error(10, 10) == 0.0);
  CHECK(*approximation_error(10, 13) == doctest::Approx(0.3));
  CHECK(*approximation_error(0, 0) == 0.0);
  CHECK_FALSE(approximation_error(0, 1).has_value());
  CHECK_THROWS_AS(approximation_error(-1, 1), Error);
}

TEST_CASE("similarity matrix") {
  std::mt19937_64 rng(9);
  const auto a = testutil::random_series(rng, 30);
  std::vector<MultiChannelSeries> same(3, a);
  std::vector<std::string> ids = {"a", "b", "c"};
  const auto z = build_similarity_matrix(same, ids, SimilaritySpec{}, Section{0, 1600, 0});
  for (double v : z.values) CHECK(v == 0.0);

  std::vector<MultiChannelSeries> clips;
  std::vector<std::string> names;
  for (int i = 0; i < 12; ++i) {
    clips.push_back(testutil::random_series(rng, 10 + i));
    names.push_back("s" + std::to_string(i));
  }
  clips[4] = MultiChannelSeries{};
  std::vector<CompareRecord> log;
  const auto m1 = build_similarity_matrix(clips, names, SimilaritySpec{}, Section{0, 1600, 0}, 1, &log);
  const auto m4 = build_similarity_matrix(clips, names, SimilaritySpec{}, Section{0, 1600, 0}, 4);
  CHECK(m1.values == m4.values);
  CHECK(log.size() == 12 * 11 / 2);
  const MultiChannelSeries zero(1.0, std::vector<Frame>(1));
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(m1.at(i, i) == 0.0);
    for (std::size_t j = 0; j < 12; ++j) CHECK(std::abs(m1.at(i, j) - m1.at(j, i)) < 1e-12);
  }
  CHECK(m1.at(4, 0) == doctest::Approx(dtw(zero, clips[0])));

  std::ostringstream os;
  write_matrix_csv(os, m1);
  CHECK(os.str().rfind("id,s0,s1,", 0) == 0);
  CHECK_THROWS_AS(build_similarity_matrix(std::span(clips).first(1), std::span(names).first(1),
                                          SimilaritySpec{}, Section{0, 1600, 0}),
                  Error);
}

TEST_CASE("timed compare") {
  std::mt19937_64 rng(10);
  const auto a = testutil::random_series(rng, 50), b = testutil::random_series(rng, 60);
  const auto r = timed_compare(a, b, SimilaritySpec{SimilarityKind::ScDtw, 5});
  CHECK(r.len_a == 50);
  CHECK(r.len_b == 60);
  CHECK(r.ttc_seconds > 0.0);
  CHECK(r.cost == sc_dtw(a, b, 5));
  std::ostringstream os;
  write_compare_log_header(os);
  append_compare_log(os, std::span(&r, 1));
  CHECK(os.str().rfind("len_a,len_b,kind,radius,cost,ttc_s,error\n50,60,SC_DTW,5,", 0) == 0);
}

}
