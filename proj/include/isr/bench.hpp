#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "isr/series.hpp"
#include "isr/similarity.hpp"

namespace isr {

struct BenchPair {
  MultiChannelSeries a;
  MultiChannelSeries b;
};

struct BenchCorpusOptions {
  std::uint64_t seed = 7;
  std::size_t min_length = 25;
  std::size_t max_length = 3200;
  /// Pairs per power-of-two bucket, starting at the bucket holding min_length.
  std::vector<std::size_t> pairs_per_bucket = {800, 800, 600, 500, 300, 200, 80, 40};
  /// Fraction of the series length by which the two warps may disagree.
  double warp_strength = 0.15;
  double noise_sd = 0.3;
};

/// 1 Hz pairs that share a smooth latent profile under independent monotone
/// time warps plus AR(1) noise. The longer series of each pair falls in the
/// pair's bucket.
std::vector<BenchPair> make_bench_corpus(const BenchCorpusOptions& options);

struct BenchOptions {
  int repeats = 3;  // timed runs per kernel; the median is kept
  bool warmup = true;
  /// Each timed run repeats the kernel until at least this much wall time has
  /// passed and reports the per-call average. 0 times a single call.
  double min_sample_seconds = 200e-6;
  /// Called after each pair with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// For each pair: DTW first, then every other spec in order; one record per
/// (pair, spec) with the median TTC and the error against the DTW cost.
std::vector<CompareRecord> run_benchmark(std::span<const BenchPair> corpus,
                                         std::span<const SimilaritySpec> specs,
                                         const BenchOptions& options = {});

/// Largest power of two not above `length` (0 for 0).
std::size_t length_bucket(std::size_t length);

struct BucketStat {
  std::size_t bucket = 0;
  SimilaritySpec spec;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
  double mean_length = 0.0;  // mean of max(len_a, len_b)
};

struct BenchTables {
  std::vector<BucketStat> ttc;
  std::vector<BucketStat> error;  // undefined errors excluded
};

/// Groups by (bucket of max length, spec). Independent of record order.
BenchTables aggregate(std::span<const CompareRecord> records);

/// bucket,spec,mean,count,stddev
void write_bucket_csv(std::ostream& out, std::span<const BucketStat> stats);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least squares of log(mean) on log(mean_length) over buckets in
/// [min_bucket, max_bucket] for one spec.
SlopeFit fit_loglog(std::span<const BucketStat> stats, const SimilaritySpec& spec,
                    std::size_t min_bucket, std::size_t max_bucket);

/// Mean of the defined errors of one spec across all records.
double mean_error(std::span<const CompareRecord> records, const SimilaritySpec& spec);

}  // namespace isr
