// isr: command-line front end over libisr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isr/isr.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int report(isr_status status) {
  if (status == ISR_OK) return 0;
  std::fprintf(stderr, "isr: %s\n", isr_last_error());
  return static_cast<int>(status);
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sibling_footprints(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? csv.substr(0, dot) : csv) + ".footprints.json";
}

struct Cohort {
  isr_cohort* handle = nullptr;
  ~Cohort() { isr_cohort_close(handle); }
};

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative section reduction over route-aligned driving telemetry"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs,-j", jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  std::string synth_config, synth_out;
  synth->add_option("--config", synth_config, "Cohort config JSON (default fixture when omitted)");
  synth->add_option("--out", synth_out, "Output directory")->required();

  auto* simmat = app.add_subcommand("simmat", "Per-section similarity matrices and compare log");
  std::string sm_cohort, sm_route, sm_spec, sm_out;
  int sm_depth = 0;
  simmat->add_option("--cohort", sm_cohort)->required();
  simmat->add_option("--route", sm_route, "Route id (all routes when omitted)");
  simmat->add_option("--section-depth", sm_depth)->required();
  simmat->add_option("--spec", sm_spec, "DTW, SC_DTW:R or FAST_DTW:R")->required();
  simmat->add_option("--out", sm_out)->required();

  auto* evaluate = app.add_subcommand("evaluate", "k-fold evaluation of one configuration");
  std::string ev_cohort, ev_route, ev_params, ev_out, ev_footprints, ev_plugin;
  std::uint64_t ev_seed = 0;
  evaluate->add_option("--cohort", ev_cohort)->required();
  evaluate->add_option("--route", ev_route)->required();
  evaluate->add_option("--params", ev_params, "ISR params JSON")->required();
  evaluate->add_option("--seed", ev_seed)->required();
  evaluate->add_option("--out", ev_out)->required();
  evaluate->add_option("--footprints", ev_footprints, "Footprint JSON (default: next to --out)");
  evaluate->add_option("--plugin-cmd", ev_plugin, "Plugin launch command");

  auto* grid = app.add_subcommand("grid", "Ranked grid search");
  std::string gr_cohort, gr_route, gr_grid = "full", gr_out, gr_footprints, gr_plugin;
  std::uint64_t gr_seed = 0;
  bool gr_list = false;
  grid->add_option("--cohort", gr_cohort);
  grid->add_option("--route", gr_route);
  grid->add_option("--grid", gr_grid)->check(CLI::IsMember({"full", "small"}));
  grid->add_option("--seed", gr_seed);
  grid->add_option("--out", gr_out);
  grid->add_option("--footprints", gr_footprints);
  grid->add_option("--plugin-cmd", gr_plugin);
  grid->add_flag("--list", gr_list, "Enumerate configurations without evaluating");

  auto* bench = app.add_subcommand("bench", "Similarity TTC and error benchmark");
  std::string bn_corpus = "auto", bn_out, bn_options;
  double bn_scale = 1.0;
  bench->add_option("--corpus", bn_corpus)->check(CLI::IsMember({"auto"}));
  bench->add_option("--out", bn_out)->required();
  bench->add_option("--options", bn_options, "Bench options JSON");
  bench->add_option("--scale", bn_scale, "Multiplier on pairs per bucket")->check(CLI::PositiveNumber);

  auto* recover = app.add_subcommand("recover", "Score footprints against planted events");
  std::string rc_results, rc_truth, rc_footprints, rc_out = "/dev/stdout";
  recover->add_option("--results", rc_results)->required();
  recover->add_option("--truth", rc_truth, "cohort.json")->required();
  recover->add_option("--footprints", rc_footprints, "Footprint JSON (default: next to --results)");
  recover->add_option("--out", rc_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (synth->parsed()) {
    std::optional<std::string> text;
    if (!synth_config.empty()) {
      text = slurp(synth_config);
      if (!text) {
        std::fprintf(stderr, "isr: cannot read %s\n", synth_config.c_str());
        return kExitConfig;
      }
    }
    return report(isr_synth(text ? text->c_str() : nullptr, synth_out.c_str(), jobs));
  }

  if (simmat->parsed()) {
    Cohort c;
    if (int rc = report(isr_cohort_open(sm_cohort.c_str(), jobs, &c.handle))) return rc;
    return report(isr_simmat(c.handle, or_null(sm_route), sm_depth, sm_spec.c_str(), sm_out.c_str()));
  }

  if (evaluate->parsed()) {
    const auto params = slurp(ev_params);
    if (!params) {
      std::fprintf(stderr, "isr: cannot read %s\n", ev_params.c_str());
      return kExitConfig;
    }
    Cohort c;
    if (int rc = report(isr_cohort_open(ev_cohort.c_str(), jobs, &c.handle))) return rc;
    const auto fp = ev_footprints.empty() ? sibling_footprints(ev_out) : ev_footprints;
    return report(isr_evaluate(c.handle, ev_route.c_str(), params->c_str(), ev_seed,
                               or_null(ev_plugin), ev_out.c_str(), fp.c_str()));
  }

  if (grid->parsed()) {
    if (gr_list) {
      std::size_t sim = 0, all = 0;
      if (int rc = report(isr_grid_size(gr_grid.c_str(), 0, &sim))) return rc;
      if (int rc = report(isr_grid_size(gr_grid.c_str(), 1, &all))) return rc;
      std::printf("similarity configurations: %zu\nplugin configurations: %zu\n", sim, all - sim);
      if (!gr_out.empty()) return report(isr_grid_list(gr_grid.c_str(), 1, gr_out.c_str()));
      return 0;
    }
    if (gr_cohort.empty() || gr_route.empty() || gr_out.empty()) {
      std::fprintf(stderr, "isr: grid needs --cohort, --route and --out (or --list)\n");
      return kExitConfig;
    }
    Cohort c;
    if (int rc = report(isr_cohort_open(gr_cohort.c_str(), jobs, &c.handle))) return rc;
    const auto fp = gr_footprints.empty() ? sibling_footprints(gr_out) : gr_footprints;
    return report(isr_grid(c.handle, gr_route.c_str(), gr_grid.c_str(), gr_seed, or_null(gr_plugin),
                           gr_out.c_str(), fp.c_str()));
  }

  if (bench->parsed()) {
    std::string options = "{}";
    if (!bn_options.empty()) {
      const auto text = slurp(bn_options);
      if (!text) {
        std::fprintf(stderr, "isr: cannot read %s\n", bn_options.c_str());
        return kExitConfig;
      }
      options = *text;
    }
    if (bn_scale != 1.0) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(options);
      } catch (const nlohmann::json::exception&) {
        std::fprintf(stderr, "isr: bench options are not valid JSON\n");
        return kExitConfig;
      }
      if (!j.is_object()) {
        std::fprintf(stderr, "isr: bench options must be a JSON object\n");
        return kExitConfig;
      }
      j["scale"] = bn_scale;
      options = j.dump();
    }
    if (int rc = report(isr_bench(options.c_str(), bn_out.c_str()))) return rc;
    if (const auto summary = slurp(bn_out + "/bench_summary.json")) std::fputs(summary->c_str(), stdout);
    return 0;
  }

  if (recover->parsed()) {
    const auto fp = rc_footprints.empty() ? sibling_footprints(rc_results) : rc_footprints;
    return report(isr_recover(rc_results.c_str(), fp.c_str(), rc_truth.c_str(), rc_out.c_str()));
  }
  return kExitData;
}
