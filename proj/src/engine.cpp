#include "isr/engine.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "isr/error.hpp"
#include "isr/parallel.hpp"
#include "isr/plugin.hpp"
#include "isr/random.hpp"
#include "isr/text.hpp"

namespace isr {

std::string_view to_string(Paradigm paradigm) {
  return paradigm == Paradigm::Any ? "ANY" : "ALL";
}

Paradigm parse_paradigm(std::string_view text) {
  if (text == "ANY") return Paradigm::Any;
  if (text == "ALL") return Paradigm::All;
  throw Error(ErrorKind::Config, "unknown paradigm '" + std::string(text) + "'");
}

// ---------------------------------------------------------------- folds

int FoldPlan::fold_of_participant(const std::string& participant) const {
  const auto it = fold_of.find(participant);
  if (it == fold_of.end()) throw Error(ErrorKind::Invalid, "participant not in fold plan: " + participant);
  return it->second;
}

FoldPlan make_fold_plan(std::span<const Session> sessions, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Invalid, "fold count must be at least 2");
  std::map<std::string, bool> experimental;
  for (const auto& s : sessions) experimental[s.participant] |= is_experimental(s.label);
  if (experimental.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::Invalid, "fewer participants than folds");
  }
  std::vector<std::string> control;
  std::vector<std::string> treated;
  for (const auto& [p, exp] : experimental) (exp ? treated : control).push_back(p);

  std::mt19937_64 rng(derive_seed(seed, "fold_plan"));
  std::shuffle(control.begin(), control.end(), rng);
  std::shuffle(treated.begin(), treated.end(), rng);

  FoldPlan plan;
  plan.k = k;
  std::size_t next = 0;
  for (const auto* group : {&control, &treated}) {
    for (const auto& p : *group) plan.fold_of[p] = static_cast<int>(next++ % static_cast<std::size_t>(k));
  }
  return plan;
}

// ---------------------------------------------------------------- params

void IsrParams::validate() const {
  if (num_dev < 2) throw Error(ErrorKind::Config, "num_dev must be >= 2");
  if (max_depth < 1 || max_depth > 4) throw Error(ErrorKind::Config, "max_depth must be in 1..4");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::Config, "threshold must be in [0, 1]");
  module.validate();
}

nlohmann::json IsrParams::to_json() const {
  nlohmann::json j = {{"num_dev", num_dev},
                      {"max_depth", max_depth},
                      {"threshold", threshold},
                      {"paradigm", std::string(to_string(paradigm))},
                      {"classifier", std::string(to_string(module.kind))}};
  if (module.kind != ClassifierKind::Plugin) j["similarity"] = module.similarity.name();
  if (module.kind == ClassifierKind::Knn) j["k"] = module.k;
  if (module.kind == ClassifierKind::LogReg) {
    j["logreg"] = {{"l2_lambda", module.logreg.l2_lambda},
                   {"learning_rate", module.logreg.learning_rate},
                   {"iterations", module.logreg.iterations}};
  }
  return j;
}

IsrParams IsrParams::from_json(const nlohmann::json& j) {
  IsrParams p;
  try {
    if (!j.is_object()) throw Error(ErrorKind::Config, "params must be a JSON object");
    p.num_dev = j.value("num_dev", p.num_dev);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.threshold = j.value("threshold", p.threshold);
    p.paradigm = parse_paradigm(j.value("paradigm", std::string("ANY")));
    p.module.kind = parse_classifier_kind(j.value("classifier", std::string("KNN")));
    p.module.k = j.value("k", 1);
    if (p.module.kind != ClassifierKind::Plugin) {
      p.module.similarity = SimilaritySpec::parse(j.value("similarity", std::string("DTW")));
    }
    if (j.contains("logreg")) {
      const auto& l = j.at("logreg");
      p.module.logreg.l2_lambda = l.value("l2_lambda", p.module.logreg.l2_lambda);
      p.module.logreg.learning_rate = l.value("learning_rate", p.module.logreg.learning_rate);
      p.module.logreg.iterations = l.value("iterations", p.module.logreg.iterations);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad params: ") + e.what());
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------- route data

RouteData::RouteData(RouteLattice lattice, std::vector<Session> sessions, int jobs)
    : lattice_(std::move(lattice)), sessions_(std::move(sessions)), jobs_(std::max(1, jobs)) {
  if (sessions_.size() < 2) throw Error(ErrorKind::Data, "route needs at least 2 sessions");
  std::set<std::string> seen;
  for (const auto& s : sessions_) {
    if (s.series.rate_hz() != 10.0) throw Error(ErrorKind::Data, "session " + s.id + " is not 10 Hz");
    if (s.route_id != lattice_.route_id()) {
      throw Error(ErrorKind::Data, "session " + s.id + " belongs to route " + s.route_id);
    }
    if (!seen.insert(s.id).second) throw Error(ErrorKind::Data, "duplicate session id " + s.id);
    ids_.push_back(s.id);
  }
}

const SectionClips& RouteData::clips(const Section& section) const {
  std::shared_ptr<Slot<SectionClips>> slot;
  {
    std::lock_guard lock(mutex_);
    auto& entry = clips_[{section.start_m, section.end_m}];
    if (!entry) entry = std::make_shared<Slot<SectionClips>>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    std::vector<MultiChannelSeries> raw10;
    std::vector<MultiChannelSeries> raw1;
    raw10.reserve(sessions_.size());
    for (const auto& s : sessions_) {
      raw10.push_back(clip_session(s, section));
      raw1.push_back(raw10.back().empty() ? MultiChannelSeries(1.0, {})
                                          : paa_downsample(raw10.back(), 10));
    }
    auto out = std::make_unique<SectionClips>();
    const auto stats10 = pooled_channel_stats(raw10);
    const auto stats1 = pooled_channel_stats(raw1);
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
      out->clips_10hz.push_back(raw10[i].empty() ? raw10[i] : normalize_with(raw10[i], stats10));
      out->clips_1hz.push_back(raw1[i].empty() ? raw1[i] : normalize_with(raw1[i], stats1));
    }
    slot->value = std::move(out);
  });
  return *slot->value;
}

const SimilarityMatrix& RouteData::matrix(const Section& section, const SimilaritySpec& spec) const {
  std::shared_ptr<Slot<SimilarityMatrix>> slot;
  {
    std::lock_guard lock(mutex_);
    auto& entry = matrices_[{section.start_m, section.end_m, spec}];
    if (!entry) entry = std::make_shared<Slot<SimilarityMatrix>>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    const auto& c = clips(section);
    slot->value = std::make_unique<SimilarityMatrix>(
        build_similarity_matrix(c.clips_1hz, ids_, spec, section, jobs_));
  });
  return *slot->value;
}

std::vector<Section> RouteData::sections_up_to(int max_depth) const {
  std::vector<Section> out;
  std::vector<Section> frontier = top_level_sections(lattice_);
  for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    std::vector<Section> next;
    for (const auto& s : frontier) {
      out.push_back(s);
      if (depth + 1 < max_depth && s.length_m() >= 2 * kWaypointSpacingM) {
        for (const auto& c : subdivide(s)) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t RouteData::cached_matrix_count() const {
  std::lock_guard lock(mutex_);
  return matrices_.size();
}

// ---------------------------------------------------------------- ISR

DevSplit make_dev_split(const RouteData& route, const FoldPlan& plan, int eval_fold) {
  if (eval_fold < 0 || eval_fold >= plan.k) throw Error(ErrorKind::Invalid, "evaluation fold out of range");
  DevSplit split;
  split.eval_fold = eval_fold;
  split.num_dev = plan.k - 1;
  for (const auto& s : route.sessions()) {
    const int f = plan.fold_of_participant(s.participant);
    split.dev_fold.push_back(f == eval_fold ? -1 : (f < eval_fold ? f : f - 1));
  }
  return split;
}

namespace {

DevSplit dev_split_for(const RouteData& route, const FoldPlan& plan, int eval_fold, int num_dev,
                       std::uint64_t seed) {
  auto split = make_dev_split(route, plan, eval_fold);
  if (num_dev == split.num_dev) return split;
  // Regroup the remaining participants into num_dev stratified folds.
  std::vector<Session> rest;
  for (std::size_t i = 0; i < route.sessions().size(); ++i) {
    if (split.dev_fold[i] < 0) continue;
    const auto& s = route.sessions()[i];
    rest.push_back(Session{s.id, s.participant, s.route_id, s.label, {}, {}});
  }
  const auto inner = make_fold_plan(rest, num_dev, derive_seed(seed, "dev_plan", eval_fold));
  for (std::size_t i = 0; i < route.sessions().size(); ++i) {
    if (split.dev_fold[i] >= 0) split.dev_fold[i] = inner.fold_of_participant(route.sessions()[i].participant);
  }
  split.num_dev = num_dev;
  return split;
}

std::vector<double> cost_row(const SimilarityMatrix& m, std::size_t query,
                             std::span<const std::size_t> rows) {
  std::vector<double> costs;
  costs.reserve(rows.size());
  for (auto r : rows) costs.push_back(m.at(query, r));
  return costs;
}

}  // namespace

TrainedModule train_section_module(const IsrContext& ctx, const Section& section,
                                   const ModuleSpec& spec, std::span<const std::size_t> train,
                                   std::span<const std::size_t> dev, int dev_fold) {
  const auto sessions = ctx.route.sessions();
  std::vector<ClassLabel> train_labels;
  for (auto i : train) train_labels.push_back(sessions[i].label);

  TrainedModule module;
  if (spec.kind == ClassifierKind::Plugin) {
    const auto& clips = ctx.route.clips(section).clips_10hz;
    std::vector<PluginClip> train_clips;
    std::vector<PluginClip> dev_clips;
    for (auto i : train) train_clips.push_back({sessions[i].id, sessions[i].label, &clips[i]});
    for (auto i : dev) dev_clips.push_back({sessions[i].id, sessions[i].label, &clips[i]});
    if (distinct_label_count(train_labels) < 2) {
      module.failed = true;
    } else {
      const auto key = ctx.route.lattice().route_id() + "/" + section.label() + "/e" +
                       std::to_string(ctx.split.eval_fold) + "/d" + std::to_string(dev_fold);
      const auto seed = derive_seed(ctx.seed, "plugin/" + section.label(),
                                    static_cast<std::uint64_t>(dev_fold));
      module = plugin_adapter(spec, ctx.plugin, key, seed, train_clips, dev_clips);
    }
  } else if (distinct_label_count(train_labels) < 2) {
    module.failed = true;
  } else {
    const auto& m = ctx.route.matrix(section, spec.similarity);
    if (spec.kind == ClassifierKind::Knn) {
      module = knn_train(train_labels, spec.k);
    } else {
      FeatureMatrix features(train.size(), train.size());
      for (std::size_t r = 0; r < train.size(); ++r) {
        for (std::size_t c = 0; c < train.size(); ++c) features(r, c) = m.at(train[r], train[c]);
      }
      try {
        module = logreg_train(features, train_labels, spec.logreg);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Data) throw;
        module = TrainedModule{};
        module.failed = true;
      }
    }
    if (!module.failed) {
      std::size_t correct = 0;
      for (auto i : dev) correct += module.predict(cost_row(m, i, train)) == sessions[i].label ? 1 : 0;
      module.dev_accuracy =
          dev.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(dev.size());
    }
  }

  module.spec = spec;
  module.section = section;
  if (module.failed) module.dev_accuracy = 0.0;
  module.training_ids.clear();
  module.development_ids.clear();
  module.training_rows.assign(train.begin(), train.end());
  for (auto i : train) module.training_ids.push_back(sessions[i].id);
  for (auto i : dev) module.development_ids.push_back(sessions[i].id);
  return module;
}

std::vector<TrainedModule> isr(const IsrContext& ctx, const Section& section, int depth,
                               int max_depth, double thresh, Paradigm paradigm,
                               const ModuleSpec& spec) {
  if (depth < 0) throw Error(ErrorKind::Invalid, "negative depth");
  const auto& split = ctx.split;
  if (split.num_dev < 2) throw Error(ErrorKind::Invalid, "num_dev must be >= 2");

  IsrVisit visit{section, {}, 0, false};
  std::vector<TrainedModule> kept;
  double sum = 0.0;
  std::size_t counted = 0;
  for (int d = 0; d < split.num_dev; ++d) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> dev;
    for (std::size_t i = 0; i < split.dev_fold.size(); ++i) {
      if (split.dev_fold[i] < 0) continue;
      (split.dev_fold[i] == d ? dev : train).push_back(i);
    }
    auto module = train_section_module(ctx, section, spec, train, dev, d);
    visit.dev_accuracies.push_back(module.dev_accuracy);
    if (ctx.stats) {
      ++ctx.stats->candidates;
      ctx.stats->failed += module.failed ? 1 : 0;
    }
    if (paradigm == Paradigm::Any) {
      if (module.failed || !(module.dev_accuracy > thresh)) continue;
      sum += module.dev_accuracy;
      ++counted;
      kept.push_back(std::move(module));
    } else {
      sum += module.dev_accuracy;
      ++counted;
      if (!module.failed) kept.push_back(std::move(module));
    }
  }

  visit.kept = kept.size();
  const double mean = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
  if (kept.empty() || mean < thresh) {
    visit.pruned = true;
    if (ctx.trace) ctx.trace->push_back(std::move(visit));
    return {};
  }
  if (ctx.trace) ctx.trace->push_back(std::move(visit));

  if (depth + 1 < max_depth && section.length_m() >= 2 * kWaypointSpacingM) {
    std::vector<TrainedModule> children;
    for (const auto& child : subdivide(section)) {
      auto sub = isr(ctx, child, depth + 1, max_depth, mean, paradigm, spec);
      for (auto& m : sub) children.push_back(std::move(m));
    }
    if (!children.empty()) return children;
  }
  return kept;
}

// ---------------------------------------------------------------- ensembles

bool Ensemble::leak_free() const {
  const std::unordered_set<std::string> held_out(evaluation_ids.begin(), evaluation_ids.end());
  for (const auto& m : modules) {
    for (const auto& id : m.training_ids) if (held_out.count(id)) return false;
    for (const auto& id : m.development_ids) if (held_out.count(id)) return false;
  }
  return true;
}

nlohmann::json Ensemble::to_json() const {
  auto mods = nlohmann::json::array();
  for (const auto& m : modules) mods.push_back(m.to_json());
  auto ranges = nlohmann::json::array();
  for (const auto& r : footprint.ranges()) ranges.push_back({r[0], r[1]});
  return {{"eval_fold", eval_fold},
          {"params", params.to_json()},
          {"fallback", std::string(to_string(fallback))},
          {"evaluation_ids", evaluation_ids},
          {"footprint", ranges},
          {"modules", mods}};
}

Ensemble build_ensemble(const RouteData& route, const FoldPlan& plan, int eval_fold,
                        const IsrParams& params, std::uint64_t seed,
                        std::shared_ptr<PluginClient> plugin) {
  params.validate();
  const auto split = dev_split_for(route, plan, eval_fold, params.num_dev, seed);

  Ensemble e;
  e.eval_fold = eval_fold;
  e.params = params;
  const IsrContext ctx{route, split, derive_seed(seed, "ensemble", static_cast<std::uint64_t>(eval_fold)),
                       std::move(plugin), nullptr, &e.stats};
  for (const auto& top : top_level_sections(route.lattice())) {
    for (auto& m : isr(ctx, top, 0, params.max_depth, params.threshold, params.paradigm, params.module)) {
      e.modules.push_back(std::move(m));
    }
  }

  e.footprint = WaypointSet(route.lattice().waypoint_count());
  for (const auto& m : e.modules) e.footprint |= waypoints_of(m.section, route.lattice());

  std::array<std::size_t, kClassCount> counts{};
  for (std::size_t i = 0; i < split.dev_fold.size(); ++i) {
    if (split.dev_fold[i] < 0) {
      e.evaluation_ids.push_back(route.sessions()[i].id);
    } else {
      ++counts[ordinal(route.sessions()[i].label)];
    }
  }
  e.fallback = plurality(counts);
  return e;
}

ClassLabel classify_session(const Ensemble& ensemble, const RouteData& route,
                            std::size_t session_index) {
  if (session_index >= route.sessions().size()) throw Error(ErrorKind::Invalid, "session index out of range");
  if (ensemble.modules.empty()) return ensemble.fallback;
  const auto& id = route.sessions()[session_index].id;
  std::array<std::size_t, kClassCount> votes{};
  for (const auto& m : ensemble.modules) {
    ClassLabel vote;
    if (m.spec.kind == ClassifierKind::Plugin) {
      const auto& clip = route.clips(m.section).clips_10hz[session_index];
      vote = m.predict(ModuleInput{id, {}, &clip});
    } else {
      const auto costs = cost_row(route.matrix(m.section, m.spec.similarity), session_index,
                                  m.training_rows);
      vote = m.predict(ModuleInput{id, costs, nullptr});
    }
    ++votes[ordinal(vote)];
  }
  return plurality(votes);
}

EvaluationReport evaluate_route(const RouteData& route, const IsrParams& params,
                                std::uint64_t seed, const EvaluationOptions& options) {
  params.validate();
  const auto plan = make_fold_plan(route.sessions(), kEvaluationFolds, derive_seed(seed, "folds"));

  EvaluationReport report;
  report.route_id = route.lattice().route_id();
  report.params = params;
  report.seed = seed;
  IsrStats stats;
  for (int f = 0; f < plan.k; ++f) {
    auto e = build_ensemble(route, plan, f, params, seed, options.plugin);
    if (!e.leak_free()) throw Error(ErrorKind::Invalid, "evaluation fold leaked into an ensemble");
    stats.candidates += e.stats.candidates;
    stats.failed += e.stats.failed;

    std::vector<ClassLabel> truth;
    std::vector<ClassLabel> predicted;
    for (std::size_t i = 0; i < route.sessions().size(); ++i) {
      if (plan.fold_of_participant(route.sessions()[i].participant) != f) continue;
      truth.push_back(route.sessions()[i].label);
      predicted.push_back(classify_session(e, route, i));
    }
    report.fold_accuracy.push_back(accuracy(truth, predicted));
    report.footprints.push_back(e.footprint);
    report.module_count += e.modules.size();
    report.empty_ensembles += e.modules.empty() ? 1 : 0;
    if (options.ensembles) options.ensembles->push_back(std::move(e));
  }
  if (params.module.kind == ClassifierKind::Plugin && stats.candidates > 0 &&
      stats.failed == stats.candidates) {
    throw Error(ErrorKind::Plugin, "every plugin module failed");
  }

  double sum = 0.0;
  for (double a : report.fold_accuracy) sum += a;
  report.acc = sum / static_cast<double>(report.fold_accuracy.size());

  const FootprintSet fs{report.footprints, route.lattice().waypoint_count(),
                        route.lattice().event_waypoints()};
  report.puor = puor(fs);
  report.pior = pior(fs);
  report.jiwu = jiwu(fs);
  report.jiwe = jiwe(fs);
  return report;
}

// ---------------------------------------------------------------- grid

GridSize parse_grid_size(std::string_view text) {
  if (text == "full") return GridSize::Full;
  if (text == "small") return GridSize::Small;
  throw Error(ErrorKind::Config, "grid must be 'full' or 'small'");
}

GridUniverse grid_universe(GridSize size) {
  GridUniverse u;
  u.classifiers = {ClassifierKind::Knn, ClassifierKind::LogReg};
  u.paradigms = {Paradigm::Any, Paradigm::All};
  if (size == GridSize::Full) {
    u.similarities = all_similarity_specs();
    u.depths.assign(kDepthGrid.begin(), kDepthGrid.end());
    u.thresholds.assign(kThresholdGrid.begin(), kThresholdGrid.end());
  } else {
    u.similarities = {SimilaritySpec{SimilarityKind::Dtw, 0},
                      SimilaritySpec{SimilarityKind::FastDtw, 1}};
    u.depths = {1, 3};
    u.thresholds = {0.0, 0.30};
  }
  return u;
}

std::vector<GridConfig> enumerate_similarity_grid(const GridUniverse& u) {
  std::vector<GridConfig> out;
  for (const auto& sim : u.similarities) {
    for (auto kind : u.classifiers) {
      for (int depth : u.depths) {
        for (double t : u.thresholds) {
          for (auto paradigm : u.paradigms) {
            IsrParams p;
            p.max_depth = depth;
            p.threshold = t;
            p.paradigm = paradigm;
            p.module.kind = kind;
            p.module.similarity = sim;
            out.push_back({out.size(), p});
          }
        }
      }
    }
  }
  return out;
}

std::vector<GridConfig> enumerate_plugin_grid(const GridUniverse& u, std::size_t first_index) {
  std::vector<GridConfig> out;
  for (int depth : u.depths) {
    for (double t : u.thresholds) {
      for (auto paradigm : u.paradigms) {
        IsrParams p;
        p.max_depth = depth;
        p.threshold = t;
        p.paradigm = paradigm;
        p.module.kind = ClassifierKind::Plugin;
        out.push_back({first_index + out.size(), p});
      }
    }
  }
  return out;
}

std::vector<EvaluationReport> grid_search(const RouteData& route,
                                          std::span<const GridConfig> configs, std::uint64_t seed,
                                          std::shared_ptr<PluginClient> plugin,
                                          std::vector<Ensemble>* ensembles) {
  // Matrices first (each build is itself parallel), then configs in parallel.
  std::map<SimilaritySpec, int> deepest;
  for (const auto& c : configs) {
    if (c.params.module.kind == ClassifierKind::Plugin) continue;
    auto& d = deepest[c.params.module.similarity];
    d = std::max(d, c.params.max_depth);
  }
  for (const auto& [spec, depth] : deepest) {
    for (const auto& section : route.sections_up_to(depth)) route.matrix(section, spec);
  }

  std::vector<EvaluationReport> reports(configs.size());
  std::vector<std::vector<Ensemble>> kept(configs.size());
  parallel_for(configs.size(), route.jobs(), [&](std::size_t i) {
    EvaluationOptions options{plugin, ensembles ? &kept[i] : nullptr};
    reports[i] = evaluate_route(route, configs[i].params, seed, options);
    reports[i].grid_index = configs[i].index;
  });
  if (ensembles) {
    for (auto& v : kept) for (auto& e : v) ensembles->push_back(std::move(e));
  }

  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    if (a.acc != b.acc) return a.acc > b.acc;
    if (a.module_count != b.module_count) return a.module_count < b.module_count;
    return a.grid_index < b.grid_index;
  });
  return reports;
}

// ---------------------------------------------------------------- reports

std::vector<std::string> report_columns() {
  return {"route", "similarity", "module", "paradigm", "max_depth", "threshold", "acc",
          "puor",  "pior",       "jiwu",   "jiwe",     "seed",      "grid_index", "modules"};
}

void write_report_header(std::ostream& out) {
  const auto cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_report_row(std::ostream& out, const EvaluationReport& r) {
  const auto& m = r.params.module;
  out << r.route_id << ','
      << (m.kind == ClassifierKind::Plugin ? std::string("-") : m.similarity.name()) << ','
      << m.classifier_name() << ',' << to_string(r.params.paradigm) << ',' << r.params.max_depth
      << ',' << format_fixed(r.params.threshold, 2) << ',' << format_fixed(r.acc, 4) << ','
      << r.puor.render() << ',' << r.pior.render() << ',' << r.jiwu.render() << ','
      << r.jiwe.render() << ',' << r.seed << ','
      << (r.grid_index ? std::to_string(*r.grid_index) : std::string()) << ',' << r.module_count
      << '\n';
}

nlohmann::json footprints_to_json(const EvaluationReport& report) {
  auto folds = nlohmann::json::array();
  for (const auto& s : report.footprints) {
    auto ranges = nlohmann::json::array();
    for (const auto& r : s.ranges()) ranges.push_back({r[0], r[1]});
    folds.push_back(ranges);
  }
  nlohmann::json j = {{"route", report.route_id},
                      {"lattice_size", report.footprints.empty() ? 0 : report.footprints.front().universe()},
                      {"params", report.params.to_json()},
                      {"folds", folds}};
  if (report.grid_index) j["grid_index"] = *report.grid_index;
  return j;
}

}  // namespace isr
