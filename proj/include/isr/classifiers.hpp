#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isr/route.hpp"
#include "isr/session.hpp"
#include "isr/similarity.hpp"

namespace isr {

enum class ClassifierKind { Knn, LogReg, Plugin };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view text);  // throws Error(Config)

struct LogRegParams {
  double l2_lambda = 1e-3;
  double learning_rate = 1e-2;
  int iterations = 500;
};

struct ModuleSpec {
  ClassifierKind kind = ClassifierKind::Knn;
  int k = 1;
  SimilaritySpec similarity;
  LogRegParams logreg;

  /// Report label: "1-NN", "LogReg" or "Plugin".
  std::string classifier_name() const;
  void validate() const;  // throws Error(Config)
};

/// Dense row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

struct KnnModel {
  std::vector<ClassLabel> labels;  // one per training instance
  int k = 1;
};

struct LogRegModel {
  std::vector<double> column_mean;
  std::vector<double> column_scale;  // 0 marks a constant column
  FeatureMatrix weights;             // kClassCount x (features + 1), bias last
};

class PluginClient;

struct PluginModel {
  std::shared_ptr<PluginClient> client;
  std::string model_key;
  /// Predictions already obtained for development clips, replayed by id.
  std::vector<std::pair<std::string, ClassLabel>> replay;
};

/// What a module sees of one query: its costs to each training instance
/// (similarity modules) or its clip (plugin modules).
struct ModuleInput {
  std::string_view id;
  std::span<const double> costs;
  const MultiChannelSeries* clip = nullptr;
};

/// Section-specific classifier with its development score.
class TrainedModule {
 public:
  ModuleSpec spec;
  Section section;
  std::vector<std::string> training_ids;
  std::vector<std::string> development_ids;
  /// Matrix row of each training instance; lets callers slice query costs.
  std::vector<std::size_t> training_rows;
  double dev_accuracy = 0.0;
  bool failed = false;
  std::variant<KnnModel, LogRegModel, PluginModel> model;

  /// Throws Error(Invalid) when the feature dimension does not match.
  ClassLabel predict(const ModuleInput& input) const;
  ClassLabel predict(std::span<const double> costs) const {
    return predict(ModuleInput{{}, costs, nullptr});
  }

  nlohmann::json to_json() const;
};

/// Stores labels; queries vote among the k cheapest training instances.
TrainedModule knn_train(std::span<const ClassLabel> labels, int k = 1);

/// Class of the k nearest instances; cost ties and vote ties go to the lower
/// class ordinal.
ClassLabel knn_predict(const KnnModel& model, std::span<const double> costs);

/// Softmax regression on column-standardized similarity features, trained by
/// full-batch gradient descent from zero weights. Throws Error(Data,
/// "degenerate labels") when fewer than two classes are present.
TrainedModule logreg_train(const FeatureMatrix& features, std::span<const ClassLabel> labels,
                           const LogRegParams& params);

std::array<double, kClassCount> logreg_probabilities(const LogRegModel& model,
                                                     std::span<const double> features);

namespace detail {

/// Mean cross-entropy plus (lambda / 2) * |W|^2 over non-bias weights, with
/// its gradient. `standardized` must already be column-standardized.
double logreg_loss(const FeatureMatrix& weights, const FeatureMatrix& standardized,
                   std::span<const ClassLabel> labels, double l2_lambda,
                   FeatureMatrix* gradient);

/// Training loss at the start and after each iteration.
std::vector<double> logreg_loss_history(const FeatureMatrix& features,
                                        std::span<const ClassLabel> labels,
                                        const LogRegParams& params);

}  // namespace detail

std::size_t distinct_label_count(std::span<const ClassLabel> labels);

}  // namespace isr
