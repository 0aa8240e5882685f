#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "isr/route.hpp"
#include "isr/session.hpp"

namespace isr {

inline constexpr double kIngestRateHz = 10.0;

/// Routes and 10 Hz sessions, as loaded from disk or produced by the generator.
struct Cohort {
  nlohmann::json config;  // generator config that produced it, or null
  std::vector<RouteLattice> routes;
  std::vector<Session> sessions;

  const RouteLattice& route(const std::string& route_id) const;  // throws Error(Data)
  std::vector<Session> sessions_for(const std::string& route_id) const;
};

/// Block-averages a session down to 10 Hz (series and dist_m). The rate must
/// be an integer multiple of 10 Hz.
Session ingest_session(Session raw);

// Session CSV: t,dist_m,<7 channels>, one row per frame.
void write_session_csv(std::ostream& out, const Session& session);
/// Reads rows as-is; metadata fields other than the series come from `meta`.
Session read_session_csv(std::istream& in, Session meta, double rate_hz);

nlohmann::json route_to_json(const RouteLattice& route);
RouteLattice route_from_json(const nlohmann::json& j);  // throws Error(Data)

/// DIR/cohort.json manifest, DIR/routes/<id>.json, DIR/sessions/<id>.csv.
/// `route_extras` (optional, same order as routes) is merged into each route
/// JSON.
void write_cohort(const Cohort& cohort, const std::filesystem::path& dir,
                  const std::vector<nlohmann::json>& route_extras = {});

/// Accepts the directory or its cohort.json. Sessions are ingested to 10 Hz.
Cohort load_cohort(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);  // throws Error(Data)

}  // namespace isr
