#include <doctest.h>

#include <random>
#include <set>

#include "../oracles.hpp"
#include "isr/error.hpp"
#include "isr/metrics.hpp"

using namespace isr;

namespace {

WaypointSet range_set(std::size_t n, std::size_t a, std::size_t b) {
  WaypointSet s(n);
  s.insert_range(a, b);
  return s;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("accuracy") {
  using L = ClassLabel;
  const std::vector<L> t = {L::Control, L::Delayed, L::Regulated};
  CHECK(accuracy(t, t) == 1.0);
  CHECK(accuracy(t, std::vector<L>{L::Delayed, L::Control, L::Control}) == 0.0);
  CHECK_THROWS_AS(accuracy(t, std::vector<L>{L::Control}), Error);
  CHECK_THROWS_AS(accuracy(std::vector<L>{}, std::vector<L>{}), Error);

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(0, 2);
  std::vector<L> truth(10000, L::Regulated), guess;
  for (int i = 0; i < 10000; ++i) guess.push_back(static_cast<L>(c(rng)));
  CHECK(std::abs(accuracy(truth, guess) - 1.0 / 3) < 0.02);
}

TEST_CASE("coverage examples") {
  FootprintSet f{{range_set(100, 0, 100), range_set(100, 0, 100)}, 100, WaypointSet(100)};
  CHECK(puor(f).value() == 1.0);
  f.folds = {WaypointSet(100), WaypointSet(100)};
  CHECK(puor(f).value() == 0.0);
  CHECK(jiwu(f).value() == 0.0);
  f.folds = {range_set(100, 0, 60), range_set(100, 40, 80)};
  CHECK(puor(f).value() == doctest::Approx(0.8));
  f.folds = {range_set(100, 0, 30), range_set(100, 50, 80)};
  CHECK(pior(f).value() == 0.0);
  f.folds = {range_set(100, 0, 50), range_set(100, 0, 50)};
  CHECK(pior(f).value() == 0.5);
  CHECK(jiwu(f).value() == 1.0);
}

TEST_CASE("JIwE examples") {
  FootprintSet f{{range_set(100, 10, 30), range_set(100, 10, 30)}, 100, range_set(100, 20, 40)};
  CHECK(jiwe(f).num == 10);
  CHECK(jiwe(f).den == 30);
  f.events = range_set(100, 10, 30);
  CHECK(jiwe(f).value() == 1.0);
  f.events = range_set(100, 60, 70);
  CHECK(jiwe(f).value() == 0.0);
  f.folds = {WaypointSet(100)};
  f.events = WaypointSet(100);
  CHECK(jiwe(f).value() == 0.0);
}

TEST_CASE("random footprints satisfy the identities and match set operations") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % 6;
    FootprintSet f;
    f.lattice_size = n;
    std::vector<std::set<std::size_t>> ref(k);
    std::set<std::size_t> ev;
    f.events = WaypointSet(n);
    const double p = static_cast<double>(rng() % 100) / 100.0;
    std::bernoulli_distribution b(p), e(0.3);
    for (std::size_t i = 0; i < k; ++i) {
      WaypointSet s(n);
      for (std::size_t w = 0; w < n; ++w)
        if (b(rng)) {
          s.insert(w);
          ref[i].insert(w);
        }
      f.folds.push_back(s);
    }
    for (std::size_t w = 0; w < n; ++w)
      if (e(rng)) {
        f.events.insert(w);
        ev.insert(w);
      }
    const auto o = oracle::set_metrics(ref, ev, n);
    const auto U = puor(f), I = pior(f), J = jiwu(f), E = jiwe(f);
    CHECK(U.num == o.unite);
    CHECK(U.den == n);
    CHECK(I.num == o.inter);
    CHECK(E.num == o.jiwe_num);
    CHECK(E.den == o.jiwe_den);
    CHECK(I.num <= U.num);
    CHECK(U.num <= U.den);
    if (U.num > 0) CHECK(J.num * U.num == I.num * J.den);
    CHECK(J.value() * U.value() == doctest::Approx(I.value()).epsilon(1e-12));
  }
}

TEST_CASE("ratio rendering") {
  CHECK(Ratio{1, 3}.render() == "0.3333");
  CHECK(Ratio{0, 0}.render() == "0.0000");
}

}
