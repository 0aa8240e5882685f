#include "isr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>

#include "isr/error.hpp"
#include "isr/random.hpp"
#include "isr/text.hpp"

namespace isr {

namespace {

struct Latent {
  std::array<std::array<double, 3>, kChannelCount> amp{};
  std::array<std::array<double, 3>, kChannelCount> freq{};
  std::array<std::array<double, 3>, kChannelCount> phase{};
};

struct Warp {
  double a = 0.0;
  double b = 0.0;
};

MultiChannelSeries render(const Latent& latent, const Warp& warp, std::size_t length,
                          double span, double strength, double noise_sd, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  constexpr double kPhi = 0.5;
  const double innovation = std::sqrt(1.0 - kPhi * kPhi) * noise_sd;
  Frame noise{};
  for (auto& n : noise) n = noise_sd * z(rng);
  std::vector<Frame> frames(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double x = length == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(length - 1);
    const double bump = warp.a * std::sin(std::numbers::pi * x) + warp.b * std::sin(2.0 * std::numbers::pi * x);
    const double tau = span * (x + strength * bump);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      double v = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        v += latent.amp[c][k] * std::sin(2.0 * std::numbers::pi * latent.freq[c][k] * tau + latent.phase[c][k]);
      }
      noise[c] = kPhi * noise[c] + innovation * z(rng);
      frames[i][c] = v + noise[c];
    }
  }
  return MultiChannelSeries(1.0, std::move(frames));
}

}  // namespace

std::vector<BenchPair> make_bench_corpus(const BenchCorpusOptions& o) {
  if (o.min_length < 2 || o.max_length < o.min_length) throw Error(ErrorKind::Config, "bad corpus length range");
  if (o.warp_strength < 0.0 || o.warp_strength > 0.3) throw Error(ErrorKind::Config, "warp_strength must be in [0, 0.3]");
  std::vector<BenchPair> out;
  std::size_t bucket = length_bucket(o.min_length);
  for (std::size_t bi = 0; bi < o.pairs_per_bucket.size(); ++bi, bucket *= 2) {
    const std::size_t lo = std::max(o.min_length, bucket);
    if (lo > o.max_length) break;
    const std::size_t hi = std::min(o.max_length, 2 * bucket > o.max_length ? o.max_length : 2 * bucket - 1);
    for (std::size_t p = 0; p < o.pairs_per_bucket[bi]; ++p) {
      std::mt19937_64 rng(derive_seed(o.seed, "bench_pair", bi * 1000003 + p));
      std::uniform_int_distribution<std::size_t> len(lo, hi);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const std::size_t len_a = len(rng);
      const auto len_b = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(static_cast<double>(len_a) * (0.75 + 0.25 * u(rng)))));
      Latent latent;
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        for (std::size_t k = 0; k < 3; ++k) {
          latent.amp[c][k] = 0.3 + 0.7 * u(rng);
          latent.freq[c][k] = 1.0 / (15.0 + 45.0 * u(rng));
          latent.phase[c][k] = 2.0 * std::numbers::pi * u(rng);
        }
      }
      // |a| pi + 2 |b| pi < 1 / strength keeps each warp monotone.
      auto warp = [&] { return Warp{u(rng) - 0.5, 0.5 * (u(rng) - 0.5)}; };
      const Warp wa = warp();
      const Warp wb = warp();
      const double span = static_cast<double>(len_a);
      BenchPair pair;
      pair.a = render(latent, wa, len_a, span, o.warp_strength, o.noise_sd, rng);
      pair.b = render(latent, wb, len_b, span, o.warp_strength, o.noise_sd, rng);
      out.push_back(std::move(pair));
    }
  }
  return out;
}

namespace {

double sample_seconds(const BenchPair& pair, const SimilaritySpec& spec, double min_seconds,
                      CompareRecord& rec) {
  using Clock = std::chrono::steady_clock;
  rec = timed_compare(pair.a, pair.b, spec);
  if (rec.ttc_seconds >= min_seconds) return rec.ttc_seconds;
  const auto calls = static_cast<long>(std::ceil(min_seconds / std::max(rec.ttc_seconds, 1e-7)));
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (long c = 0; c < calls; ++c) sink = similarity(pair.a, pair.b, spec);
  const auto stop = Clock::now();
  (void)sink;
  return std::chrono::duration<double>(stop - start).count() / static_cast<double>(calls);
}

}  // namespace

std::vector<CompareRecord> run_benchmark(std::span<const BenchPair> corpus,
                                         std::span<const SimilaritySpec> specs,
                                         const BenchOptions& options) {
  if (options.repeats < 1) throw Error(ErrorKind::Config, "repeats must be >= 1");
  std::vector<SimilaritySpec> order;
  for (const auto& s : specs) if (s.kind == SimilarityKind::Dtw) order.push_back(s);
  const bool time_dtw = !order.empty();
  if (order.size() > 1) order.resize(1);
  for (const auto& s : specs) if (s.kind != SimilarityKind::Dtw) order.push_back(s);

  std::vector<CompareRecord> records;
  records.reserve(corpus.size() * order.size());
  std::vector<double> times(static_cast<std::size_t>(options.repeats));
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const auto& pair = corpus[p];
    double truth = 0.0;
    if (!time_dtw) truth = dtw(pair.a, pair.b);
    for (const auto& spec : order) {
      if (options.warmup) (void)similarity(pair.a, pair.b, spec);
      CompareRecord rec;
      for (int r = 0; r < options.repeats; ++r) {
        times[static_cast<std::size_t>(r)] =
            sample_seconds(pair, spec, options.min_sample_seconds, rec);
      }
      std::sort(times.begin(), times.end());
      rec.ttc_seconds = times[times.size() / 2];
      if (spec.kind == SimilarityKind::Dtw) {
        truth = rec.cost;
      } else {
        rec.error = approximation_error(truth, rec.cost);
      }
      records.push_back(rec);
    }
    if (options.progress) options.progress(p + 1, corpus.size());
  }
  return records;
}

std::size_t length_bucket(std::size_t length) {
  if (length == 0) return 0;
  std::size_t b = 1;
  while (b <= length / 2) b *= 2;
  return b;
}

BenchTables aggregate(std::span<const CompareRecord> records) {
  struct Group {
    std::vector<double> ttc;
    std::vector<double> err;
    std::vector<double> len;
  };
  std::map<std::pair<SimilaritySpec, std::size_t>, Group> groups;
  for (const auto& r : records) {
    const auto longest = std::max(r.len_a, r.len_b);
    auto& g = groups[{r.spec, length_bucket(longest)}];
    g.ttc.push_back(r.ttc_seconds);
    g.len.push_back(static_cast<double>(longest));
    if (r.error) g.err.push_back(*r.error);
  }
  // Sorted summation makes every statistic independent of record order.
  auto stat = [](std::vector<double>& v, std::vector<double>& len, std::size_t bucket,
                 const SimilaritySpec& spec) {
    std::sort(v.begin(), v.end());
    std::sort(len.begin(), len.end());
    BucketStat s;
    s.bucket = bucket;
    s.spec = spec;
    s.count = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size()));
    double lsum = 0.0;
    for (double x : len) lsum += x;
    s.mean_length = lsum / static_cast<double>(len.size());
    return s;
  };
  BenchTables t;
  for (auto& [key, g] : groups) {
    t.ttc.push_back(stat(g.ttc, g.len, key.second, key.first));
    if (!g.err.empty()) t.error.push_back(stat(g.err, g.len, key.second, key.first));
  }
  return t;
}

void write_bucket_csv(std::ostream& out, std::span<const BucketStat> stats) {
  out << "bucket,spec,mean,count,stddev\n";
  for (const auto& s : stats) {
    out << s.bucket << ',' << s.spec.name() << ',' << format_double(s.mean) << ',' << s.count << ','
        << format_double(s.stddev) << '\n';
  }
}

SlopeFit fit_loglog(std::span<const BucketStat> stats, const SimilaritySpec& spec,
                    std::size_t min_bucket, std::size_t max_bucket) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : stats) {
    if (s.spec == spec && s.bucket >= min_bucket && s.bucket <= max_bucket && s.mean > 0.0) {
      pts.emplace_back(std::log(s.mean_length), std::log(s.mean));
    }
  }
  SlopeFit fit;
  fit.points = pts.size();
  if (pts.size() < 2) throw Error(ErrorKind::Data, "need at least two buckets to fit a slope");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double mean_error(std::span<const CompareRecord> records, const SimilaritySpec& spec) {
  std::vector<double> v;
  for (const auto& r : records) if (r.spec == spec && r.error) v.push_back(*r.error);
  if (v.empty()) throw Error(ErrorKind::Data, "no defined errors for " + spec.name());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace isr
