#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "isr/error.hpp"
#include "isr/series.hpp"

using namespace isr;

TEST_SUITE("series") {

TEST_CASE("paa of four values by two") {
  const auto out = paa_downsample(testutil::scalar_series({1, 2, 3, 4}, 2.0), 2);
  REQUIRE(out.frame_count() == 2);
  CHECK(out[0][0] == doctest::Approx(1.5));
  CHECK(out[1][0] == doctest::Approx(3.5));
  CHECK(out.rate_hz() == doctest::Approx(1.0));
}

TEST_CASE("paa averages the ragged tail") {
  const auto out = paa_downsample(testutil::scalar_series({1, 2, 3, 4, 10}), 2);
  REQUIRE(out.frame_count() == 3);
  CHECK(out[2][0] == doctest::Approx(10.0));
  CHECK(paa_values(std::vector<double>{0, 1, 2, 3, 4, 5, 6}, 3).size() == 3);
}

TEST_CASE("paa of a constant series stays constant") {
  for (std::size_t factor : {1u, 2u, 3u, 7u}) {
    const auto out = paa_downsample(testutil::scalar_series(std::vector<double>(20, 4.25)), factor);
    CHECK(out.frame_count() == (20 + factor - 1) / factor);
    for (const auto& f : out.frames()) CHECK(f[0] == 4.25);
  }
}

TEST_CASE("paa 60 Hz to 10 Hz against a block-mean oracle") {
  std::mt19937_64 rng(11);
  const auto s = testutil::random_series(rng, 600, 60.0);
  const auto out = paa_downsample(s, 6);
  REQUIRE(out.frame_count() == 100);
  CHECK(out.rate_hz() == doctest::Approx(10.0));
  for (std::size_t k = 0; k < 100; ++k) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      double sum = 0;
      for (std::size_t i = 6 * k; i < 6 * k + 6; ++i) sum += s[i][c];
      CHECK(out[k][c] == doctest::Approx(sum / 6).epsilon(1e-12));
    }
  }
}

TEST_CASE("paa identity and composition") {
  std::mt19937_64 rng(3);
  const auto s = testutil::random_series(rng, 120, 60.0);
  CHECK(paa_downsample(s, 1) == s);
  const auto twice = paa_downsample(paa_downsample(s, 2), 3);
  const auto once = paa_downsample(s, 6);
  REQUIRE(twice.frame_count() == once.frame_count());
  for (std::size_t i = 0; i < once.frame_count(); ++i)
    for (std::size_t c = 0; c < kChannelCount; ++c)
      CHECK(twice[i][c] == doctest::Approx(once[i][c]).epsilon(1e-12));
}

TEST_CASE("paa rejects empty input and zero factor") {
  CHECK_THROWS_AS(paa_downsample(MultiChannelSeries{}, 2), Error);
  CHECK_THROWS_AS(paa_downsample(testutil::scalar_series({1}), 0), Error);
}

TEST_CASE("sliding windows") {
  CHECK(sliding_windows(testutil::scalar_series(std::vector<double>(30)), 30, 15).size() == 1);
  CHECK(sliding_windows(testutil::scalar_series(std::vector<double>(29)), 30, 15).empty());
  const auto w = sliding_windows(testutil::scalar_series(std::vector<double>(60)), 30, 15);
  REQUIRE(w.size() == 3);
  CHECK(w[0].start_frame == 0);
  CHECK(w[1].start_frame == 15);
  CHECK(w[2].start_frame == 30);
  for (std::size_t n = 0; n < 200; n += 7) {
    for (std::size_t size : {1u, 5u, 30u}) {
      for (std::size_t stride : {1u, 4u, 15u}) {
        const auto ws = sliding_windows(testutil::scalar_series(std::vector<double>(n)), size, stride);
        std::size_t expected = 0;
        for (std::size_t s = 0; s + size <= n; s += stride) ++expected;
        CHECK(ws.size() == expected);
        for (const auto& x : ws) {
          CHECK(x.start_frame + x.length_frames <= n);
          CHECK(x.data.frame_count() == size);
        }
      }
    }
  }
}

TEST_CASE("z-normalize") {
  const auto flat = z_normalize(testutil::scalar_series({1, 1, 1}));
  for (const auto& f : flat.frames()) CHECK(f[0] == 0.0);
  const auto two = z_normalize(testutil::scalar_series({0, 2}));
  CHECK(two[0][0] == doctest::Approx(-1.0));
  CHECK(two[1][0] == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  const auto z = z_normalize(testutil::random_series(rng, 100));
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    double mean = 0, sq = 0;
    for (const auto& f : z.frames()) mean += f[c];
    mean /= 100;
    for (const auto& f : z.frames()) sq += (f[c] - mean) * (f[c] - mean);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(std::sqrt(sq / 100) - 1.0) < 1e-9);
  }
}

TEST_CASE("pooled statistics cover all frames") {
  const std::vector<MultiChannelSeries> parts = {testutil::scalar_series({0, 2}),
                                                 testutil::scalar_series({4}), MultiChannelSeries{}};
  const auto st = pooled_channel_stats(parts);
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.stddev[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
}

TEST_CASE("slice bounds") {
  const auto s = testutil::scalar_series({1, 2, 3});
  CHECK(s.slice(1, 2)[0][0] == 2.0);
  CHECK_THROWS_AS(s.slice(2, 2), Error);
}

}
