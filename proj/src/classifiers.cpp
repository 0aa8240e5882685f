#include "isr/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isr/error.hpp"
#include "isr/plugin.hpp"

namespace isr {

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "KNN";
    case ClassifierKind::LogReg: return "LOGREG";
    case ClassifierKind::Plugin: return "PLUGIN";
  }
  return "KNN";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  for (auto kind : {ClassifierKind::Knn, ClassifierKind::LogReg, ClassifierKind::Plugin}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorKind::Config, "unknown classifier '" + std::string(text) + "'");
}

std::string ModuleSpec::classifier_name() const {
  if (kind == ClassifierKind::Knn) return k == 1 ? "1-NN" : std::to_string(k) + "-NN";
  if (kind == ClassifierKind::LogReg) return "LogReg";
  return "Plugin";
}

void ModuleSpec::validate() const {
  if (kind == ClassifierKind::Knn && k < 1) throw Error(ErrorKind::Config, "k must be >= 1");
  if (kind == ClassifierKind::LogReg) {
    if (!(logreg.learning_rate > 0.0) || logreg.iterations < 1 || logreg.l2_lambda < 0.0) {
      throw Error(ErrorKind::Config, "logistic regression hyperparameters must be positive");
    }
  }
  if (kind != ClassifierKind::Plugin && similarity.kind != SimilarityKind::Dtw &&
      similarity.radius < 1) {
    throw Error(ErrorKind::Config, "radius must be >= 1");
  }
}

std::size_t distinct_label_count(std::span<const ClassLabel> labels) {
  std::array<bool, kClassCount> seen{};
  for (auto l : labels) seen[ordinal(l)] = true;
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

// ---------------------------------------------------------------- k-NN

TrainedModule knn_train(std::span<const ClassLabel> labels, int k) {
  if (labels.empty()) throw Error(ErrorKind::Data, "empty training set");
  if (k < 1) throw Error(ErrorKind::Invalid, "k must be >= 1");
  TrainedModule module;
  module.spec.kind = ClassifierKind::Knn;
  module.spec.k = k;
  module.model = KnnModel{std::vector<ClassLabel>(labels.begin(), labels.end()), k};
  return module;
}

ClassLabel knn_predict(const KnnModel& model, std::span<const double> costs) {
  if (costs.size() != model.labels.size()) {
    throw Error(ErrorKind::Invalid, "feature dimension mismatch");
  }
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto closer = [&](std::size_t x, std::size_t y) {
    if (costs[x] != costs[y]) return costs[x] < costs[y];
    if (model.labels[x] != model.labels[y]) return ordinal(model.labels[x]) < ordinal(model.labels[y]);
    return x < y;
  };
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(model.k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    closer);
  std::array<std::size_t, kClassCount> votes{};
  for (std::size_t i = 0; i < k; ++i) ++votes[ordinal(model.labels[order[i]])];
  return plurality(votes);
}

// ---------------------------------------------------------------- softmax regression

namespace {

void softmax_scores(const FeatureMatrix& weights, std::span<const double> x,
                    std::array<double, kClassCount>& out) {
  const auto d = x.size();
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    double s = weights(c, d);
    for (std::size_t f = 0; f < d; ++f) s += weights(c, f) * x[f];
    out[c] = s;
    max_score = std::max(max_score, s);
  }
  double total = 0.0;
  for (auto& s : out) {
    s = std::exp(s - max_score);
    total += s;
  }
  for (auto& s : out) s /= total;
}

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
};

Standardizer fit_standardizer(const FeatureMatrix& features) {
  Standardizer st{std::vector<double>(features.cols, 0.0), std::vector<double>(features.cols, 0.0)};
  const auto n = static_cast<double>(features.rows);
  for (std::size_t j = 0; j < features.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < features.rows; ++i) sum += features(i, j);
    st.mean[j] = sum / n;
    double sq = 0.0;
    for (std::size_t i = 0; i < features.rows; ++i) {
      const double d = features(i, j) - st.mean[j];
      sq += d * d;
    }
    const double sd = std::sqrt(sq / n);
    st.scale[j] = sd < kMinStddev ? 0.0 : sd;
  }
  return st;
}

void standardize_row(std::span<const double> raw, const std::vector<double>& mean,
                     const std::vector<double>& scale, std::span<double> out) {
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = scale[j] == 0.0 ? 0.0 : (raw[j] - mean[j]) / scale[j];
  }
}

FeatureMatrix standardize(const FeatureMatrix& features, const Standardizer& st) {
  FeatureMatrix out(features.rows, features.cols);
  for (std::size_t i = 0; i < features.rows; ++i) {
    standardize_row(features.row(i), st.mean, st.scale,
                    std::span<double>(out.values.data() + i * out.cols, out.cols));
  }
  return out;
}

void check_training_set(const FeatureMatrix& features, std::span<const ClassLabel> labels) {
  if (features.rows == 0 || labels.empty()) throw Error(ErrorKind::Data, "empty training set");
  if (features.rows != labels.size()) throw Error(ErrorKind::Invalid, "feature/label count mismatch");
  if (distinct_label_count(labels) < 2) throw Error(ErrorKind::Data, "degenerate labels");
}

}  // namespace

namespace detail {

double logreg_loss(const FeatureMatrix& weights, const FeatureMatrix& standardized,
                   std::span<const ClassLabel> labels, double l2_lambda,
                   FeatureMatrix* gradient) {
  const auto n = standardized.rows;
  const auto d = standardized.cols;
  if (gradient) *gradient = FeatureMatrix(kClassCount, d + 1);
  double loss = 0.0;
  std::array<double, kClassCount> p{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = standardized.row(i);
    softmax_scores(weights, x, p);
    const auto y = ordinal(labels[i]);
    loss -= std::log(std::max(p[y], 1e-300));
    if (!gradient) continue;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const double residual = p[c] - (c == y ? 1.0 : 0.0);
      for (std::size_t f = 0; f < d; ++f) (*gradient)(c, f) += residual * x[f];
      (*gradient)(c, d) += residual;
    }
  }
  const auto inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  double penalty = 0.0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    for (std::size_t f = 0; f < d; ++f) penalty += weights(c, f) * weights(c, f);
  }
  loss += 0.5 * l2_lambda * penalty;
  if (gradient) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      for (std::size_t f = 0; f <= d; ++f) {
        (*gradient)(c, f) *= inv_n;
        if (f < d) (*gradient)(c, f) += l2_lambda * weights(c, f);
      }
    }
  }
  return loss;
}

std::vector<double> logreg_loss_history(const FeatureMatrix& features,
                                        std::span<const ClassLabel> labels,
                                        const LogRegParams& params) {
  check_training_set(features, labels);
  const auto x = standardize(features, fit_standardizer(features));
  FeatureMatrix w(kClassCount, features.cols + 1);
  FeatureMatrix grad;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(params.iterations) + 1);
  history.push_back(logreg_loss(w, x, labels, params.l2_lambda, nullptr));
  for (int it = 0; it < params.iterations; ++it) {
    logreg_loss(w, x, labels, params.l2_lambda, &grad);
    for (std::size_t k = 0; k < w.values.size(); ++k) {
      w.values[k] -= params.learning_rate * grad.values[k];
    }
    history.push_back(logreg_loss(w, x, labels, params.l2_lambda, nullptr));
  }
  return history;
}

}  // namespace detail

TrainedModule logreg_train(const FeatureMatrix& features, std::span<const ClassLabel> labels,
                           const LogRegParams& params) {
  check_training_set(features, labels);
  if (!(params.learning_rate > 0.0) || params.iterations < 1 || params.l2_lambda < 0.0) {
    throw Error(ErrorKind::Invalid, "logistic regression hyperparameters must be positive");
  }
  const auto st = fit_standardizer(features);
  const auto x = standardize(features, st);
  FeatureMatrix w(kClassCount, features.cols + 1);
  FeatureMatrix grad;
  for (int it = 0; it < params.iterations; ++it) {
    detail::logreg_loss(w, x, labels, params.l2_lambda, &grad);
    for (std::size_t k = 0; k < w.values.size(); ++k) {
      w.values[k] -= params.learning_rate * grad.values[k];
    }
  }
  TrainedModule module;
  module.spec.kind = ClassifierKind::LogReg;
  module.spec.logreg = params;
  module.model = LogRegModel{st.mean, st.scale, std::move(w)};
  return module;
}

std::array<double, kClassCount> logreg_probabilities(const LogRegModel& model,
                                                     std::span<const double> features) {
  if (features.size() != model.column_mean.size()) {
    throw Error(ErrorKind::Invalid, "feature dimension mismatch");
  }
  std::vector<double> x(features.size());
  standardize_row(features, model.column_mean, model.column_scale, x);
  std::array<double, kClassCount> p{};
  softmax_scores(model.weights, x, p);
  return p;
}

// ---------------------------------------------------------------- modules

ClassLabel TrainedModule::predict(const ModuleInput& input) const {
  if (failed) throw Error(ErrorKind::Invalid, "failed module cannot predict");
  if (const auto* knn = std::get_if<KnnModel>(&model)) return knn_predict(*knn, input.costs);
  if (const auto* lr = std::get_if<LogRegModel>(&model)) {
    const auto p = logreg_probabilities(*lr, input.costs);
    std::size_t best = 0;
    for (std::size_t c = 1; c < kClassCount; ++c) {
      if (p[c] > p[best]) best = c;
    }
    return kAllLabels[best];
  }
  const auto& plugin = std::get<PluginModel>(model);
  for (const auto& [id, label] : plugin.replay) {
    if (id == input.id) return label;
  }
  if (!plugin.client) throw Error(ErrorKind::Plugin, "plugin module has no client");
  if (!input.clip) throw Error(ErrorKind::Invalid, "plugin module needs the query clip");
  return plugin.client->predict_one(plugin.model_key, input.id, *input.clip);
}

nlohmann::json TrainedModule::to_json() const {
  nlohmann::json j;
  j["classifier"] = std::string(to_string(spec.kind));
  if (spec.kind == ClassifierKind::Knn) j["k"] = spec.k;
  if (spec.kind != ClassifierKind::Plugin) j["similarity"] = spec.similarity.name();
  if (spec.kind == ClassifierKind::LogReg) {
    j["logreg"] = {{"l2_lambda", spec.logreg.l2_lambda},
                   {"learning_rate", spec.logreg.learning_rate},
                   {"iterations", spec.logreg.iterations}};
  }
  j["section"] = {{"start_m", section.start_m}, {"end_m", section.end_m}, {"depth", section.depth}};
  j["training_ids"] = training_ids;
  j["development_ids"] = development_ids;
  j["dev_accuracy"] = dev_accuracy;
  if (const auto* knn = std::get_if<KnnModel>(&model)) {
    auto labels = nlohmann::json::array();
    for (auto l : knn->labels) labels.push_back(std::string(to_string(l)));
    j["training_labels"] = labels;
  } else if (const auto* lr = std::get_if<LogRegModel>(&model)) {
    j["column_mean"] = lr->column_mean;
    j["column_scale"] = lr->column_scale;
    auto rows = nlohmann::json::array();
    for (std::size_t c = 0; c < lr->weights.rows; ++c) {
      rows.push_back(std::vector<double>(lr->weights.row(c).begin(), lr->weights.row(c).end()));
    }
    j["weights"] = rows;
  } else {
    j["plugin_model"] = std::get<PluginModel>(model).model_key;
  }
  return j;
}

}  // namespace isr
