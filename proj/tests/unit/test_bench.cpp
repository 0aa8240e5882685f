#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "isr/bench.hpp"

using namespace isr;

namespace {

BenchCorpusOptions tiny() {
  BenchCorpusOptions o;
  o.min_length = 20;
  o.max_length = 200;
  o.pairs_per_bucket = {4, 4, 3, 2};
  return o;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("length buckets") {
  CHECK(length_bucket(0) == 0);
  CHECK(length_bucket(1) == 1);
  CHECK(length_bucket(25) == 16);
  CHECK(length_bucket(128) == 128);
  CHECK(length_bucket(3200) == 2048);
}

TEST_CASE("corpus is deterministic and stratified") {
  const auto a = make_bench_corpus(tiny());
  const auto b = make_bench_corpus(tiny());
  REQUIRE(a.size() == 13);
  std::map<std::size_t, std::size_t> per_bucket;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a == b[i].a);
    CHECK(a[i].b == b[i].b);
    const auto longest = std::max(a[i].a.frame_count(), a[i].b.frame_count());
    CHECK(longest >= 20);
    CHECK(longest <= 200);
    CHECK(a[i].a.rate_hz() == 1.0);
    ++per_bucket[length_bucket(longest)];
  }
  CHECK(per_bucket.size() == 4);
}

TEST_CASE("benchmark records") {
  const auto corpus = make_bench_corpus(tiny());
  const auto specs = all_similarity_specs();
  BenchOptions o;
  o.repeats = 1;
  o.warmup = false;
  std::size_t calls = 0;
  o.progress = [&](std::size_t, std::size_t) { ++calls; };
  const auto rec = run_benchmark(corpus, specs, o);
  CHECK(calls == corpus.size());
  REQUIRE(rec.size() == corpus.size() * 15);
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const auto& d = rec[p * 15];
    CHECK(d.spec.kind == SimilarityKind::Dtw);
    CHECK(*d.error == 0.0);
    for (std::size_t s = 0; s < 15; ++s) {
      const auto& r = rec[p * 15 + s];
      CHECK(r.ttc_seconds > 0.0);
      CHECK(r.cost >= d.cost * (1 - 1e-12));
      if (r.error) CHECK(*r.error >= 0.0);
    }
  }
}

TEST_CASE("aggregation is order independent") {
  const auto corpus = make_bench_corpus(tiny());
  BenchOptions o;
  o.repeats = 1;
  o.warmup = false;
  auto rec = run_benchmark(corpus, all_similarity_specs(), o);
  const auto t1 = aggregate(rec);
  std::mt19937_64 rng(3);
  std::shuffle(rec.begin(), rec.end(), rng);
  const auto t2 = aggregate(rec);
  std::ostringstream a, b;
  write_bucket_csv(a, t1.ttc);
  write_bucket_csv(a, t1.error);
  write_bucket_csv(b, t2.ttc);
  write_bucket_csv(b, t2.error);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("bucket,spec,mean,count,stddev\n", 0) == 0);
  CHECK(t1.ttc.size() == 4 * 15);
}

TEST_CASE("aggregate statistics and slope fit") {
  std::vector<CompareRecord> rec;
  const SimilaritySpec dtw_spec{};
  for (std::size_t len : {100u, 200u, 400u, 800u}) {
    for (int k = 0; k < 3; ++k) {
      CompareRecord r;
      r.len_a = len;
      r.len_b = len / 2;
      r.spec = dtw_spec;
      r.ttc_seconds = 1e-6 * static_cast<double>(len * len) * (k == 1 ? 1.2 : (k == 2 ? 0.8 : 1.0));
      r.error = k == 0 ? std::optional<double>{} : std::optional<double>{0.5 * k};
      rec.push_back(r);
    }
  }
  const auto t = aggregate(rec);
  REQUIRE(t.ttc.size() == 4);
  CHECK(t.ttc[0].bucket == 64);
  CHECK(t.ttc[0].count == 3);
  CHECK(t.ttc[0].mean == doctest::Approx(1e-6 * 100 * 100));
  CHECK(t.error[0].count == 2);
  CHECK(t.error[0].mean == doctest::Approx(0.75));
  CHECK(t.error[0].stddev == doctest::Approx(0.25));
  const auto fit = fit_loglog(t.ttc, dtw_spec, 1, 4096);
  CHECK(fit.points == 4);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(mean_error(rec, dtw_spec) == doctest::Approx(0.75));
}

}
