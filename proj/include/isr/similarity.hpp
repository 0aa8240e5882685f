#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isr/route.hpp"
#include "isr/series.hpp"

namespace isr {

enum class SimilarityKind { Dtw, ScDtw, FastDtw };

inline constexpr std::array<int, 7> kGridRadii = {1, 5, 10, 15, 20, 25, 30};

struct SimilaritySpec {
  SimilarityKind kind = SimilarityKind::Dtw;
  int radius = 0;  // unused for Dtw

  /// "DTW", "SC_DTW:5", "FAST_DTW:1".
  std::string name() const;
  /// Inverse of name(); throws Error(Config) on malformed text.
  static SimilaritySpec parse(std::string_view text);

  friend auto operator<=>(const SimilaritySpec&, const SimilaritySpec&) = default;
};

std::string_view kind_name(SimilarityKind kind);

/// DTW plus both approximations at every grid radius (15 specs).
std::vector<SimilaritySpec> all_similarity_specs();

/// Euclidean norm of the per-channel differences.
double point_distance(const Frame& a, const Frame& b);
double point_distance(std::span<const double> a, std::span<const double> b);

using WarpPath = std::vector<std::pair<std::size_t, std::size_t>>;

/// Exact dynamic time warping with symmetric unit steps; raw summed cost.
double dtw(const MultiChannelSeries& a, const MultiChannelSeries& b);

/// Sakoe-Chiba band DTW. The band follows the corner-to-corner diagonal
/// scaled to the lengths, radius cells either side along the longer series.
double sc_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b, int radius);

/// Multiresolution FastDTW (coarsen by 2-frame PAA, project, refine).
double fast_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b, int radius);

double similarity(const MultiChannelSeries& a, const MultiChannelSeries& b,
                  const SimilaritySpec& spec);

/// |truth - approx| / truth; 0 when both are 0; nullopt when only truth is 0.
std::optional<double> approximation_error(double true_cost, double approx_cost);

namespace detail {

/// Per-row inclusive column ranges; lo and hi are non-decreasing by row.
struct WarpWindow {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::size_t cells() const;
};

struct WarpResult {
  double cost = 0.0;
  WarpPath path;
};

WarpWindow full_window(std::size_t n, std::size_t m);
WarpWindow sakoe_chiba_window(std::size_t n, std::size_t m, int radius);
/// Window at (n, m) resolution from a path found on the 2x-coarsened pair.
WarpWindow project_window(const WarpPath& coarse_path, std::size_t coarse_n,
                          std::size_t coarse_m, std::size_t n, std::size_t m, int radius);

WarpResult windowed_dtw(const MultiChannelSeries& a, const MultiChannelSeries& b,
                        const WarpWindow& window, bool want_path);

WarpResult fast_dtw_with_path(const MultiChannelSeries& a, const MultiChannelSeries& b,
                              int radius);

}  // namespace detail

/// One timed pairwise computation.
struct CompareRecord {
  std::size_t len_a = 0;
  std::size_t len_b = 0;
  SimilaritySpec spec;
  double cost = 0.0;
  double ttc_seconds = 0.0;
  std::optional<double> error;
};

/// Computes spec on the pair and times only the kernel call.
CompareRecord timed_compare(const MultiChannelSeries& a, const MultiChannelSeries& b,
                            const SimilaritySpec& spec);

void write_compare_log_header(std::ostream& out);
void append_compare_log(std::ostream& out, std::span<const CompareRecord> records);

/// Symmetric pairwise cost matrix over the clips of one section.
struct SimilarityMatrix {
  std::vector<std::string> item_ids;
  std::vector<double> values;  // row-major, size n*n
  SimilaritySpec spec;
  Section section;

  std::size_t size() const noexcept { return item_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * item_ids.size() + j]; }
};

/// Empty clips are replaced by a single all-zeros frame. Cells are computed
/// on up to `jobs` threads; the result does not depend on `jobs`. When `log`
/// is given, one record per off-diagonal pair is appended in (i, j) order.
SimilarityMatrix build_similarity_matrix(std::span<const MultiChannelSeries> clips,
                                         std::span<const std::string> ids,
                                         const SimilaritySpec& spec, const Section& section,
                                         int jobs = 1, std::vector<CompareRecord>* log = nullptr);

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace isr
