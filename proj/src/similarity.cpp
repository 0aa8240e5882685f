#include "isr/similarity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "isr/error.hpp"
#include "isr/parallel.hpp"
#include "isr/text.hpp"

namespace isr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_empty(const MultiChannelSeries& a, const MultiChannelSeries& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::Invalid, "empty input");
}

void require_radius(int radius) {
  if (radius < 1) throw Error(ErrorKind::Invalid, "radius must be >= 1");
}

}  // namespace

std::string_view kind_name(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::Dtw: return "DTW";
    case SimilarityKind::ScDtw: return "SC_DTW";
    case SimilarityKind::FastDtw: return "FAST_DTW";
  }
  return "DTW";
}

std::string SimilaritySpec::name() const {
  if (kind == SimilarityKind::Dtw) return "DTW";
  return std::string(kind_name(kind)) + ":" + std::to_string(radius);
}

SimilaritySpec SimilaritySpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  SimilaritySpec spec;
  if (head == "DTW") {
    if (colon != std::string_view::npos) {
      throw Error(ErrorKind::Config, "DTW takes no radius: '" + std::string(text) + "'");
    }
    return spec;
  }
  if (head == "SC_DTW") {
    spec.kind = SimilarityKind::ScDtw;
  } else if (head == "FAST_DTW") {
    spec.kind = SimilarityKind::FastDtw;
  } else {
    throw Error(ErrorKind::Config, "unknown similarity '" + std::string(text) + "'");
  }
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::Config, "missing radius in '" + std::string(text) + "'");
  }
  try {
    spec.radius = static_cast<int>(parse_int(text.substr(colon + 1)));
  } catch (const Error&) {
    throw Error(ErrorKind::Config, "bad radius in '" + std::string(text) + "'");
  }
  if (spec.radius < 1) throw Error(ErrorKind::Config, "radius must be >= 1");
  return spec;
}

std::vector<SimilaritySpec> all_similarity_specs() {
  std::vector<SimilaritySpec> specs{{SimilarityKind::Dtw, 0}};
  for (auto kind : {SimilarityKind::ScDtw, SimilarityKind::FastDtw}) {
    for (int r : kGridRadii) specs.push_back({kind, r});
  }
  return specs;
}

double point_distance(const Frame& a, const Frame& b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double point_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Invalid, "channel count mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double dtw(const MultiChannelSeries& a, const MultiChannelSeries& b) {
  require_non_empty(a, b);
  const auto n = a.frame_count();
  const auto m = b.frame_count();
  std::vector<double> prev(m, kInf);
  std::vector<double> cur(m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = point_distance(a[i], b[j]);
      if (i == 0 && j == 0) {
        cur[j] = d;
        continue;
      }
      double best = kInf;
      if (i > 0) best = prev[j];
      if (j > 0) best = std::min(best, cur[j - 1]);
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      cur[j] = d + best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

namespace detail {

std::size_t WarpWindow::cells() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) total += hi[i] - lo[i] + 1;
  return total;
}

WarpWindow full_window(std::size_t n, std::size_t m) {
  return WarpWindow{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, m - 1)};
}

namespace {

// round(num / den) for non-negative integers, halves rounded up.
std::size_t rounded_ratio(std::size_t num, std::size_t den) { return (2 * num + den) / (2 * den); }

}  // namespace

WarpWindow sakoe_chiba_window(std::size_t n, std::size_t m, int radius) {
  const auto r = static_cast<std::size_t>(radius);
  WarpWindow w{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
  if (n >= m) {
    // Walk the longer series (rows); centre column moves by at most one.
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = n == 1 ? 0 : rounded_ratio(i * (m - 1), n - 1);
      w.lo[i] = c > r ? c - r : 0;
      w.hi[i] = std::min(m - 1, c + r);
    }
    return w;
  }
  // Columns are the longer series: column j admits rows |i - centre(j)| <= r.
  std::vector<std::size_t> centre(m);
  for (std::size_t j = 0; j < m; ++j) centre[j] = rounded_ratio(j * (n - 1), m - 1);
  std::size_t first = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (centre[first] + r < i) ++first;
    while (last + 1 < m && centre[last + 1] <= i + r) ++last;
    w.lo[i] = first;
    w.hi[i] = last;
  }
  return w;
}

WarpWindow project_window(const WarpPath& coarse_path, std::size_t coarse_n,
                          std::size_t coarse_m, std::size_t n, std::size_t m, int radius) {
  // Column extent of the coarse path in each coarse row.
  std::vector<std::size_t> path_lo(coarse_n, coarse_m);
  std::vector<std::size_t> path_hi(coarse_n, 0);
  for (const auto& [ci, cj] : coarse_path) {
    path_lo[ci] = std::min(path_lo[ci], cj);
    path_hi[ci] = std::max(path_hi[ci], cj);
  }

  // Each coarse cell covers a 2x2 block at full resolution.
  std::vector<std::size_t> lo(n);
  std::vector<std::size_t> hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = i / 2;
    lo[i] = std::min(2 * path_lo[ci], m - 1);
    hi[i] = std::min(2 * path_hi[ci] + 1, m - 1);
  }

  // Grow by radius cells in every direction.
  const auto r = static_cast<std::size_t>(radius);
  WarpWindow w{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto above = i > r ? i - r : 0;
    const auto below = std::min(n - 1, i + r);
    w.lo[i] = lo[above] > r ? lo[above] - r : 0;
    w.hi[i] = std::min(m - 1, hi[below] + r);
  }
  return w;
}

WarpResult windowed_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b,
                        const WarpWindow& window, bool want_path) {
  require_non_empty(a, b);
  const auto n = a.frame_count();
  const auto m = b.frame_count();
  if (window.lo.size() != n || window.hi.size() != n) {
    throw Error(ErrorKind::Invalid, "window row count mismatch");
  }

  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + (window.hi[i] - window.lo[i] + 1);
  std::vector<double> cost(offset[n], kInf);

  auto at = [&](std::size_t i, std::size_t j) -> double {
    if (j < window.lo[i] || j > window.hi[i]) return kInf;
    return cost[offset[i] + (j - window.lo[i])];
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = window.lo[i]; j <= window.hi[i]; ++j) {
      const double d = point_distance(a[i], b[j]);
      double& cell = cost[offset[i] + (j - window.lo[i])];
      if (i == 0 && j == 0) {
        cell = d;
        continue;
      }
      double best = kInf;
      if (i > 0) best = at(i - 1, j);
      if (j > 0) best = std::min(best, at(i, j - 1));
      if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      cell = d + best;
    }
  }

  WarpResult result;
  result.cost = at(n - 1, m - 1);
  if (!std::isfinite(result.cost)) {
    throw Error(ErrorKind::Invalid, "warping window does not connect the corners");
  }
  if (!want_path) return result;

  std::size_t i = n - 1;
  std::size_t j = m - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

namespace {

WarpResult fast_dtw_impl(const MultiChannelSeries& a, const MultiChannelSeries& b, int radius,
                         bool want_path) {
  const auto n = a.frame_count();
  const auto m = b.frame_count();
  const auto min_size = static_cast<std::size_t>(radius) + 2;
  if (std::min(n, m) <= min_size) {
    return windowed_dtw(a, b, full_window(n, m), want_path);
  }
  const auto coarse_a = paa_downsample(a, 2);
  const auto coarse_b = paa_downsample(b, 2);
  const auto coarse = fast_dtw_impl(coarse_a, coarse_b, radius, true);
  const auto window = project_window(coarse.path, coarse_a.frame_count(),
                                     coarse_b.frame_count(), n, m, radius);
  return windowed_dtw(a, b, window, want_path);
}

}  // namespace

WarpResult fast_dtw_with_path(const MultiChannelSeries& a, const MultiChannelSeries& b,
                              int radius) {
  require_non_empty(a, b);
  require_radius(radius);
  return fast_dtw_impl(a, b, radius, true);
}

}  // namespace detail

double sc_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b, int radius) {
  require_non_empty(a, b);
  require_radius(radius);
  const auto window = detail::sakoe_chiba_window(a.frame_count(), b.frame_count(), radius);
  return detail::windowed_dtw(a, b, window, false).cost;
}

double fast_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b, int radius) {
  require_non_empty(a, b);
  require_radius(radius);
  return detail::fast_dtw_impl(a, b, radius, false).cost;
}

double similarity(const MultiChannelSeries& a, const MultiChannelSeries& b,
                  const SimilaritySpec& spec) {
  switch (spec.kind) {
    case SimilarityKind::Dtw: return dtw(a, b);
    case SimilarityKind::ScDtw: return sc_dtw(a, b, spec.radius);
    case SimilarityKind::FastDtw: return fast_dtw(a, b, spec.radius);
  }
  return dtw(a, b);
}

std::optional<double> approximation_error(double true_cost, double approx_cost) {
  if (true_cost < 0.0 || approx_cost < 0.0) {
    throw Error(ErrorKind::Invalid, "costs must be non-negative");
  }
  if (true_cost == 0.0) {
    if (approx_cost == 0.0) return 0.0;
    return std::nullopt;
  }
  return std::abs(true_cost - approx_cost) / true_cost;
}

CompareRecord timed_compare(const MultiChannelSeries& a, const MultiChannelSeries& b,
                            const SimilaritySpec& spec) {
  using Clock = std::chrono::steady_clock;
  CompareRecord record;
  record.len_a = a.frame_count();
  record.len_b = b.frame_count();
  record.spec = spec;
  const auto start = Clock::now();
  record.cost = similarity(a, b, spec);
  const auto stop = Clock::now();
  record.ttc_seconds =
      static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()) *
      1e-9;
  if (spec.kind == SimilarityKind::Dtw) record.error = 0.0;
  return record;
}

void write_compare_log_header(std::ostream& out) {
  out << "len_a,len_b,kind,radius,cost,ttc_s,error\n";
}

void append_compare_log(std::ostream& out, std::span<const CompareRecord> records) {
  for (const auto& r : records) {
    out << r.len_a << ',' << r.len_b << ',' << kind_name(r.spec.kind) << ',' << r.spec.radius
        << ',' << format_double(r.cost) << ',' << format_double(r.ttc_seconds) << ',';
    if (r.error) out << format_double(*r.error);
    out << '\n';
  }
}

SimilarityMatrix build_similarity_matrix(std::span<const MultiChannelSeries> clips,
                                         std::span<const std::string> ids,
                                         const SimilaritySpec& spec, const Section& section,
                                         int jobs, std::vector<CompareRecord>* log) {
  const auto n = clips.size();
  if (ids.size() != n) throw Error(ErrorKind::Invalid, "clip/id count mismatch");
  if (n < 2) throw Error(ErrorKind::Data, "degenerate matrix");

  double rate = 1.0;
  for (const auto& c : clips) {
    if (!c.empty()) {
      rate = c.rate_hz();
      break;
    }
  }
  const MultiChannelSeries placeholder(rate, std::vector<Frame>(1, Frame{}));
  auto clip_at = [&](std::size_t i) -> const MultiChannelSeries& {
    return clips[i].empty() ? placeholder : clips[i];
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }

  std::vector<CompareRecord> records(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    records[k] = timed_compare(clip_at(i), clip_at(j), spec);
  });

  SimilarityMatrix matrix;
  matrix.item_ids.assign(ids.begin(), ids.end());
  matrix.values.assign(n * n, 0.0);
  matrix.spec = spec;
  matrix.section = section;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    matrix.values[i * n + j] = records[k].cost;
    matrix.values[j * n + i] = records[k].cost;
  }
  if (log) log->insert(log->end(), records.begin(), records.end());
  return matrix;
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << "id";
  for (const auto& id : matrix.item_ids) out << ',' << id;
  out << '\n';
  const auto n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << matrix.item_ids[i];
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(matrix.at(i, j));
    out << '\n';
  }
}

}  // namespace isr
