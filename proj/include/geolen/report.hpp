#pragma once

// Suite orchestration and report persistence (JSON, CSV table, SVG plots).

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "geolen/config.hpp"

namespace geolen {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kTableSchemaVersion = 1;

struct CheckRecord {
  std::string suite;
  std::string geodesic;  // empty for checks not tied to a geodesic
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double budget = 0.0;
  bool pass = false;
};

struct GeodesicRecord {
  std::string word;
  double length_classical = 0.0;
  double length = 0.0;
  std::size_t samples = 0;
  std::vector<double> dl_re, dl_im;        // first variation per direction
  std::vector<double> h_re, h_im;          // row-major
  std::vector<double> hlog_re, hlog_im;    // row-major
  std::vector<double> sup_norms;
  double budget = 0.0;
  std::vector<double> profile_t;           // convention arclength
  std::vector<double> phi_profile;         // Re phi along the geodesic
  std::vector<double> a_profile;           // |a(t)|
};

struct GardinerRecord {
  std::string direction;
  std::string word;
  double formula = 0.0;
  double fd = 0.0;
  double order_estimate = 0.0;  // NaN serialized as null
  double rel_error = 0.0;
  bool pass = false;
};

struct RunReport {
  int schema_version = kReportSchemaVersion;
  nlohmann::json config;  // echo of the effective configuration
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;
  std::vector<GeodesicRecord> geodesics;
  std::vector<GardinerRecord> gardiner;
  std::vector<std::string> errors;
  std::map<std::string, double> timings;  // seconds per suite
  bool pass = false;

  std::size_t failures() const;
};

nlohmann::json config_to_json(const RunConfig& c);

/// Runs the enabled suites. Failures inside a suite are recorded as failing
/// checks and do not stop the remaining suites.
RunReport run_suite(const RunConfig& config);

nlohmann::json to_json(const RunReport& r, bool with_timings = true);
RunReport report_from_json(const nlohmann::json& j);

/// Table rows: one per (geodesic, check) plus one per global check.
std::string report_table(const RunReport& r);

struct OutputFiles {
  std::filesystem::path report;
  std::filesystem::path table;
  std::vector<std::filesystem::path> plots;
};

/// Writes report.json, checks.csv and the SVG plots into `dir` (temp file +
/// rename for each). IoError on failure.
OutputFiles emit_outputs(const RunReport& r, const std::filesystem::path& dir);

/// Writes `content` to `path` through a temporary file in the same directory.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace geolen
