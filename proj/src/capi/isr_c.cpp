#include "isr/isr.h"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include "isr/bench.hpp"
#include "isr/cohort_io.hpp"
#include "isr/engine.hpp"
#include "isr/error.hpp"
#include "isr/plugin.hpp"
#include "isr/synth.hpp"
#include "isr/text.hpp"

namespace fs = std::filesystem;

struct isr_cohort {
  isr::Cohort cohort;
  int jobs = 1;
  std::mutex mutex;
  std::map<std::string, std::unique_ptr<isr::RouteData>> routes;

  isr::RouteData& route(const std::string& id) {
    std::lock_guard lock(mutex);
    auto& slot = routes[id];
    if (!slot) slot = std::make_unique<isr::RouteData>(cohort.route(id), cohort.sessions_for(id), jobs);
    return *slot;
  }
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
isr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ISR_OK;
  } catch (const isr::Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
      case isr::ErrorKind::Config: return ISR_ERR_CONFIG;
      case isr::ErrorKind::Data: return ISR_ERR_DATA;
      case isr::ErrorKind::Plugin: return ISR_ERR_PLUGIN;
      case isr::ErrorKind::Invalid: return ISR_ERR_INVALID;
    }
    return ISR_ERR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ISR_ERR_INVALID;
  } catch (...) {
    g_last_error = "unknown failure";
    return ISR_ERR_INVALID;
  }
}

std::string need(const char* s, const char* what) {
  if (s == nullptr) throw isr::Error(isr::ErrorKind::Invalid, std::string(what) + " is required");
  return s;
}

nlohmann::json parse_json_text(const std::string& text, isr::ErrorKind kind) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw isr::Error(kind, std::string("malformed JSON: ") + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw isr::Error(isr::ErrorKind::Data, "cannot write " + path.string());
  return out;
}

void write_reports(const std::vector<isr::EvaluationReport>& reports, const char* out_csv,
                   const char* footprints_json) {
  {
    auto out = open_out(need(out_csv, "output path"));
    isr::write_report_header(out);
    for (const auto& r : reports) isr::write_report_row(out, r);
    if (!out) throw isr::Error(isr::ErrorKind::Data, "write failed");
  }
  if (footprints_json) {
    auto j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(isr::footprints_to_json(r));
    auto out = open_out(footprints_json);
    out << j.dump() << '\n';
  }
}

std::shared_ptr<isr::PluginClient> maybe_plugin(const char* plugin_cmd) {
  const auto cmd = isr::plugin_command(plugin_cmd ? plugin_cmd : "");
  if (cmd.empty()) return nullptr;
  return std::make_shared<isr::PluginClient>(isr::PluginOptions{cmd});
}

std::string file_spec_name(const isr::SimilaritySpec& spec) {
  auto n = spec.name();
  for (auto& c : n) if (c == ':') c = '-';
  return n;
}

std::vector<isr::GridConfig> grid_configs(const char* grid, bool include_plugin) {
  const auto size = isr::parse_grid_size(need(grid, "grid"));
  const auto universe = isr::grid_universe(size);
  auto configs = isr::enumerate_similarity_grid(universe);
  if (include_plugin) {
    const auto plugin = isr::enumerate_plugin_grid(universe, configs.size());
    configs.insert(configs.end(), plugin.begin(), plugin.end());
  }
  return configs;
}

}  // namespace

extern "C" {

const char* isr_version(void) { return "1.0.0"; }

const char* isr_last_error(void) { return g_last_error.c_str(); }

isr_status isr_synth(const char* config_json, const char* out_dir, int jobs) {
  return guarded([&] {
    const auto config = config_json ? isr::CohortConfig::from_json(parse_json_text(config_json, isr::ErrorKind::Config))
                                    : isr::CohortConfig::default_fixture();
    isr::write_synthetic_cohort(config, need(out_dir, "output directory"), jobs);
  });
}

isr_status isr_cohort_open(const char* path, int jobs, isr_cohort** out) {
  return guarded([&] {
    if (!out) throw isr::Error(isr::ErrorKind::Invalid, "out is required");
    auto c = std::make_unique<isr_cohort>();
    c->cohort = isr::load_cohort(need(path, "cohort path"));
    c->jobs = jobs < 1 ? 1 : jobs;
    *out = c.release();
  });
}

void isr_cohort_close(isr_cohort* cohort) { delete cohort; }

isr_status isr_cohort_session_count(const isr_cohort* cohort, size_t* out) {
  return guarded([&] {
    if (!cohort || !out) throw isr::Error(isr::ErrorKind::Invalid, "null argument");
    *out = cohort->cohort.sessions.size();
  });
}

isr_status isr_cohort_route_count(const isr_cohort* cohort, size_t* out) {
  return guarded([&] {
    if (!cohort || !out) throw isr::Error(isr::ErrorKind::Invalid, "null argument");
    *out = cohort->cohort.routes.size();
  });
}

isr_status isr_cohort_route_id(const isr_cohort* cohort, size_t index, const char** out) {
  return guarded([&] {
    if (!cohort || !out) throw isr::Error(isr::ErrorKind::Invalid, "null argument");
    if (index >= cohort->cohort.routes.size()) throw isr::Error(isr::ErrorKind::Invalid, "route index out of range");
    *out = cohort->cohort.routes[index].route_id().c_str();
  });
}

isr_status isr_simmat(isr_cohort* cohort, const char* route_id, int depth, const char* spec_text,
                      const char* out_dir) {
  return guarded([&] {
    if (!cohort) throw isr::Error(isr::ErrorKind::Invalid, "null cohort");
    if (depth < 0 || depth > 3) throw isr::Error(isr::ErrorKind::Config, "section depth must be in 0..3");
    const auto spec = isr::SimilaritySpec::parse(need(spec_text, "spec"));
    const fs::path dir = need(out_dir, "output directory");
    std::vector<std::string> ids;
    if (route_id) {
      ids.push_back(route_id);
    } else {
      for (const auto& r : cohort->cohort.routes) ids.push_back(r.route_id());
    }
    std::ofstream log = open_out(dir / "compare_log.csv");
    isr::write_compare_log_header(log);
    for (const auto& id : ids) {
      const auto& route = cohort->route(id);
      for (const auto& section : route.sections_up_to(depth + 1)) {
        if (section.depth != depth) continue;
        const auto& clips = route.clips(section).clips_1hz;
        std::vector<isr::CompareRecord> records;
        const auto m = isr::build_similarity_matrix(clips, route.session_ids(), spec, section,
                                                    cohort->jobs, &records);
        auto out = open_out(dir / (id + "_" + section.label() + "_" + file_spec_name(spec) + ".csv"));
        isr::write_matrix_csv(out, m);
        isr::append_compare_log(log, records);
      }
    }
  });
}

isr_status isr_evaluate(isr_cohort* cohort, const char* route_id, const char* params_json,
                        uint64_t seed, const char* plugin_cmd, const char* out_csv,
                        const char* footprints_json) {
  return guarded([&] {
    if (!cohort) throw isr::Error(isr::ErrorKind::Invalid, "null cohort");
    const auto params = isr::IsrParams::from_json(parse_json_text(need(params_json, "params"), isr::ErrorKind::Config));
    const auto& route = cohort->route(need(route_id, "route"));
    isr::EvaluationOptions options;
    if (params.module.kind == isr::ClassifierKind::Plugin) {
      options.plugin = maybe_plugin(plugin_cmd);
      if (!options.plugin) throw isr::Error(isr::ErrorKind::Plugin, "no plugin command configured");
    }
    const auto report = isr::evaluate_route(route, params, seed, options);
    write_reports(std::vector<isr::EvaluationReport>{report}, out_csv, footprints_json);
  });
}

isr_status isr_grid_size(const char* grid, int include_plugin, size_t* out) {
  return guarded([&] {
    if (!out) throw isr::Error(isr::ErrorKind::Invalid, "null argument");
    *out = grid_configs(grid, include_plugin != 0).size();
  });
}

isr_status isr_grid_list(const char* grid, int include_plugin, const char* out_csv) {
  return guarded([&] {
    auto out = open_out(need(out_csv, "output path"));
    out << "grid_index,similarity,module,paradigm,max_depth,threshold\n";
    for (const auto& c : grid_configs(grid, include_plugin != 0)) {
      const auto& m = c.params.module;
      out << c.index << ',' << (m.kind == isr::ClassifierKind::Plugin ? std::string("-") : m.similarity.name())
          << ',' << m.classifier_name() << ',' << isr::to_string(c.params.paradigm) << ','
          << c.params.max_depth << ',' << isr::format_fixed(c.params.threshold, 2) << '\n';
    }
  });
}

isr_status isr_grid(isr_cohort* cohort, const char* route_id, const char* grid, uint64_t seed,
                    const char* plugin_cmd, const char* out_csv, const char* footprints_json) {
  return guarded([&] {
    if (!cohort) throw isr::Error(isr::ErrorKind::Invalid, "null cohort");
    auto plugin = maybe_plugin(plugin_cmd);
    const auto configs = grid_configs(grid, plugin != nullptr);
    const auto& route = cohort->route(need(route_id, "route"));
    const auto reports = isr::grid_search(route, configs, seed, plugin);
    write_reports(reports, out_csv, footprints_json);
  });
}

isr_status isr_bench(const char* options_json, const char* out_dir) {
  return guarded([&] {
    isr::BenchCorpusOptions corpus;
    isr::BenchOptions run;
    if (options_json) {
      const auto j = parse_json_text(options_json, isr::ErrorKind::Config);
      try {
        corpus.seed = j.value("seed", corpus.seed);
        corpus.min_length = j.value("min_length", corpus.min_length);
        corpus.max_length = j.value("max_length", corpus.max_length);
        corpus.warp_strength = j.value("warp_strength", corpus.warp_strength);
        corpus.noise_sd = j.value("noise_sd", corpus.noise_sd);
        if (j.contains("pairs_per_bucket")) {
          corpus.pairs_per_bucket = j.at("pairs_per_bucket").get<std::vector<std::size_t>>();
        }
        const double scale = j.value("scale", 1.0);
        if (!(scale > 0.0)) throw isr::Error(isr::ErrorKind::Config, "scale must be positive");
        for (auto& n : corpus.pairs_per_bucket) {
          n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
        }
        run.repeats = j.value("repeats", run.repeats);
        run.warmup = j.value("warmup", run.warmup);
        run.min_sample_seconds = j.value("min_sample_us", run.min_sample_seconds * 1e6) * 1e-6;
      } catch (const nlohmann::json::exception& e) {
        throw isr::Error(isr::ErrorKind::Config, std::string("bad bench options: ") + e.what());
      }
    }
    const fs::path dir = need(out_dir, "output directory");
    const auto pairs = isr::make_bench_corpus(corpus);
    const auto specs = isr::all_similarity_specs();
    const auto records = isr::run_benchmark(pairs, specs, run);
    const auto tables = isr::aggregate(records);
    {
      auto out = open_out(dir / "bench_ttc.csv");
      isr::write_bucket_csv(out, tables.ttc);
    }
    {
      auto out = open_out(dir / "bench_error.csv");
      isr::write_bucket_csv(out, tables.error);
    }
    {
      auto out = open_out(dir / "compare_log.csv");
      isr::write_compare_log_header(out);
      isr::append_compare_log(out, records);
    }
    nlohmann::json summary = {{"pairs", pairs.size()}, {"records", records.size()}};
    auto slopes = nlohmann::json::object();
    auto errors = nlohmann::json::object();
    for (const auto& s : specs) {
      try {
        slopes[s.name()] = isr::fit_loglog(tables.ttc, s, 128, 2048).slope;
      } catch (const isr::Error&) {
      }
      if (s.kind != isr::SimilarityKind::Dtw) errors[s.name()] = isr::mean_error(records, s);
    }
    summary["ttc_slope"] = slopes;
    summary["mean_error"] = errors;
    auto out = open_out(dir / "bench_summary.json");
    out << summary.dump(2) << '\n';
  });
}

isr_status isr_recover(const char* results_csv, const char* footprints_json, const char* truth_json,
                       const char* out_csv) {
  return guarded([&] {
    const fs::path truth_path = need(truth_json, "truth");
    const auto manifest = isr::read_json_file(fs::is_directory(truth_path) ? truth_path / "cohort.json" : truth_path);
    if (!manifest.contains("config") || manifest["config"].is_null()) {
      throw isr::Error(isr::ErrorKind::Data, "cohort manifest has no generator config");
    }
    const auto config = isr::CohortConfig::from_json(manifest["config"]);
    const auto footprints = isr::read_json_file(need(footprints_json, "footprints"));

    std::ifstream in(need(results_csv, "results"));
    if (!in) throw isr::Error(isr::ErrorKind::Data, std::string("cannot open ") + results_csv);
    std::string line;
    std::getline(in, line);
    const auto header = isr::split_csv(line);
    const auto cols = isr::report_columns();
    if (header.size() != cols.size()) throw isr::Error(isr::ErrorKind::Data, "results file has unexpected columns");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> row;
      for (auto cell : isr::split_csv(line)) row.emplace_back(cell);
      if (row.size() != cols.size()) throw isr::Error(isr::ErrorKind::Data, "results row has wrong width");
      rows.push_back(std::move(row));
    }
    if (!footprints.is_array() || footprints.size() != rows.size()) {
      throw isr::Error(isr::ErrorKind::Data, "footprints do not match results rows");
    }

    auto out = open_out(need(out_csv, "output path"));
    out << "route,grid_index,acc,truth,unanimous,hit,precision,recall,jiwe\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      const auto& fp = footprints[i];
      try {
        if (fp.at("route").get<std::string>() != row[0]) {
          throw isr::Error(isr::ErrorKind::Data, "footprint route mismatch at row " + std::to_string(i + 1));
        }
        const auto truth = isr::ground_truth_waypoints(config, row[0]);
        const auto n = fp.at("lattice_size").get<std::size_t>();
        if (n != truth.universe()) throw isr::Error(isr::ErrorKind::Data, "lattice size mismatch");
        isr::FootprintSet set;
        set.lattice_size = n;
        set.events = truth;
        for (const auto& fold : fp.at("folds")) {
          isr::WaypointSet s(n);
          for (const auto& r : fold) s.insert_range(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
          set.folds.push_back(std::move(s));
        }
        auto hit = set.intersection_all();
        const auto unanimous = hit.count();
        hit &= truth;
        const isr::Ratio precision{hit.count(), unanimous};
        const isr::Ratio recall{hit.count(), truth.count()};
        out << row[0] << ',' << row[12] << ',' << row[6] << ',' << truth.count() << ',' << unanimous << ','
            << hit.count() << ',' << precision.render() << ',' << recall.render() << ','
            << isr::jiwe(set).render() << '\n';
      } catch (const nlohmann::json::exception& e) {
        throw isr::Error(isr::ErrorKind::Data, std::string("bad footprints JSON: ") + e.what());
      }
    }
  });
}

isr_status isr_distance(const double* a, size_t a_frames, const double* b, size_t b_frames,
                        const char* spec_text, double* out) {
  return guarded([&] {
    if (!a || !b || !out) throw isr::Error(isr::ErrorKind::Invalid, "null argument");
    const auto spec = isr::SimilaritySpec::parse(need(spec_text, "spec"));
    auto to_series = [](const double* p, size_t n) {
      std::vector<isr::Frame> frames(n);
      for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < isr::kChannelCount; ++c) frames[i][c] = p[i * isr::kChannelCount + c];
      }
      return isr::MultiChannelSeries(1.0, std::move(frames));
    };
    *out = isr::similarity(to_series(a, a_frames), to_series(b, b_frames), spec);
  });
}

}  // extern "C"
