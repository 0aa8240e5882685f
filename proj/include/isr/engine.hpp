#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isr/classifiers.hpp"
#include "isr/metrics.hpp"
#include "isr/route.hpp"
#include "isr/session.hpp"
#include "isr/similarity.hpp"

namespace isr {

class PluginClient;

enum class Paradigm { Any, All };

std::string_view to_string(Paradigm paradigm);
Paradigm parse_paradigm(std::string_view text);  // throws Error(Config)

inline constexpr int kEvaluationFolds = 5;
inline constexpr std::array<int, 4> kDepthGrid = {1, 2, 3, 4};
inline constexpr std::array<double, 11> kThresholdGrid = {0.00, 0.05, 0.10, 0.15, 0.20, 0.25,
                                                          0.30, 0.35, 0.40, 0.45, 0.50};

/// Participant -> fold assignment, stratified by control/experimental group.
struct FoldPlan {
  int k = 0;
  std::map<std::string, int> fold_of;

  int fold_of_participant(const std::string& participant) const;
};

/// Deterministic for a given seed. Throws Error(Invalid) when k < 2 or there
/// are fewer participants than folds.
FoldPlan make_fold_plan(std::span<const Session> sessions, int k, std::uint64_t seed);

struct IsrParams {
  int num_dev = kEvaluationFolds - 1;
  int max_depth = 1;
  double threshold = 0.0;
  Paradigm paradigm = Paradigm::Any;
  ModuleSpec module;

  void validate() const;  // throws Error(Config)
  nlohmann::json to_json() const;
  static IsrParams from_json(const nlohmann::json& j);  // throws Error(Config)
};

/// Clips of every session of a route for one section, normalized per channel
/// with statistics pooled over all clips of the section.
struct SectionClips {
  std::vector<MultiChannelSeries> clips_10hz;
  std::vector<MultiChannelSeries> clips_1hz;
};

/// Sessions of one route plus lazily built, shared per-section clips and
/// similarity matrices (keyed by section and similarity spec). Safe for
/// concurrent use.
class RouteData {
 public:
  /// Sessions must be recorded at 10 Hz on this route.
  RouteData(RouteLattice lattice, std::vector<Session> sessions, int jobs = 1);

  const RouteLattice& lattice() const noexcept { return lattice_; }
  std::span<const Session> sessions() const noexcept { return sessions_; }
  const std::vector<std::string>& session_ids() const noexcept { return ids_; }
  int jobs() const noexcept { return jobs_; }

  const SectionClips& clips(const Section& section) const;
  const SimilarityMatrix& matrix(const Section& section, const SimilaritySpec& spec) const;

  /// Every section reachable from the top level within max_depth levels.
  std::vector<Section> sections_up_to(int max_depth) const;

  std::size_t cached_matrix_count() const;

 private:
  template <typename T>
  struct Slot {
    std::once_flag once;
    std::unique_ptr<T> value;
  };

  RouteLattice lattice_;
  std::vector<Session> sessions_;
  std::vector<std::string> ids_;
  int jobs_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<Slot<SectionClips>>> clips_;
  mutable std::map<std::tuple<int, int, SimilaritySpec>, std::shared_ptr<Slot<SimilarityMatrix>>>
      matrices_;
};

/// Session -> development fold (0..num_dev-1), or -1 for the held-out
/// evaluation fold.
struct DevSplit {
  std::vector<int> dev_fold;
  int num_dev = 0;
  int eval_fold = -1;
};

DevSplit make_dev_split(const RouteData& route, const FoldPlan& plan, int eval_fold);

/// One node visited by isr(), for inspection.
struct IsrVisit {
  Section section;
  std::vector<double> dev_accuracies;
  std::size_t kept = 0;
  bool pruned = false;
};

struct IsrStats {
  std::size_t candidates = 0;
  std::size_t failed = 0;
};

struct IsrContext {
  const RouteData& route;
  const DevSplit& split;
  std::uint64_t seed = 0;
  std::shared_ptr<PluginClient> plugin;
  std::vector<IsrVisit>* trace = nullptr;
  IsrStats* stats = nullptr;
};

/// Trains one candidate on the `train` sessions and scores it on `dev`.
/// Fewer than two classes in `train` yields a failed module.
TrainedModule train_section_module(const IsrContext& ctx, const Section& section,
                                   const ModuleSpec& spec, std::span<const std::size_t> train,
                                   std::span<const std::size_t> dev, int dev_fold);

/// Iterative section reduction on one section tree.
std::vector<TrainedModule> isr(const IsrContext& ctx, const Section& section, int depth,
                               int max_depth, double thresh, Paradigm paradigm,
                               const ModuleSpec& spec);

struct Ensemble {
  int eval_fold = 0;
  IsrParams params;
  std::vector<TrainedModule> modules;
  WaypointSet footprint;
  /// Prediction when no module survived: majority class of the training data.
  ClassLabel fallback = ClassLabel::Control;
  std::vector<std::string> evaluation_ids;
  IsrStats stats;

  nlohmann::json to_json() const;
  /// No member was trained or developed on an evaluation session.
  bool leak_free() const;
};

Ensemble build_ensemble(const RouteData& route, const FoldPlan& plan, int eval_fold,
                        const IsrParams& params, std::uint64_t seed,
                        std::shared_ptr<PluginClient> plugin = nullptr);

/// Equal-weight plurality vote; ties go to the lower class ordinal.
ClassLabel classify_session(const Ensemble& ensemble, const RouteData& route,
                            std::size_t session_index);

struct EvaluationReport {
  std::string route_id;
  IsrParams params;
  std::uint64_t seed = 0;
  std::optional<std::size_t> grid_index;
  std::vector<double> fold_accuracy;
  double acc = 0.0;
  Ratio puor;
  Ratio pior;
  Ratio jiwu;
  Ratio jiwe;
  std::vector<WaypointSet> footprints;
  std::size_t module_count = 0;
  std::size_t empty_ensembles = 0;
};

struct EvaluationOptions {
  std::shared_ptr<PluginClient> plugin;
  std::vector<Ensemble>* ensembles = nullptr;
};

EvaluationReport evaluate_route(const RouteData& route, const IsrParams& params,
                                std::uint64_t seed, const EvaluationOptions& options = {});

// ---------------------------------------------------------------- grid search

enum class GridSize { Full, Small };

GridSize parse_grid_size(std::string_view text);  // throws Error(Config)

struct GridConfig {
  std::size_t index = 0;
  IsrParams params;
};

struct GridUniverse {
  std::vector<SimilaritySpec> similarities;
  std::vector<ClassifierKind> classifiers;
  std::vector<int> depths;
  std::vector<double> thresholds;
  std::vector<Paradigm> paradigms;
};

GridUniverse grid_universe(GridSize size);

/// Similarity track: similarity x classifier x depth x threshold x paradigm.
std::vector<GridConfig> enumerate_similarity_grid(const GridUniverse& universe);
/// Plugin track: depth x threshold x paradigm. Indices continue after
/// `first_index`.
std::vector<GridConfig> enumerate_plugin_grid(const GridUniverse& universe,
                                              std::size_t first_index = 0);

/// Evaluates every config (up to route.jobs() at a time) and ranks by Acc
/// descending, then fewer modules, then grid index.
std::vector<EvaluationReport> grid_search(const RouteData& route,
                                          std::span<const GridConfig> configs, std::uint64_t seed,
                                          std::shared_ptr<PluginClient> plugin = nullptr,
                                          std::vector<Ensemble>* ensembles = nullptr);

// ---------------------------------------------------------------- reports

/// Table-1 columns followed by provenance columns.
std::vector<std::string> report_columns();
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const EvaluationReport& report);

/// {"route", "lattice_size", "folds": [[[first, last), ...], ...]}
nlohmann::json footprints_to_json(const EvaluationReport& report);

}  // namespace isr
