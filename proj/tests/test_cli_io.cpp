#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "geolen/report.hpp"

using namespace geolen;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("geolen_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

RunConfig operators_only() {
  RunConfig c;
  c.suites = {"operators"};
  return c;
}

}  // namespace

TEST(Config, MinimalFileFillsDefaults) {
  const auto c = parse_config("seed: 7\n");
  const RunConfig d;
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.preset, d.preset);
  EXPECT_EQ(c.geodesics, d.geodesics);
  EXPECT_EQ(c.mesh_cells, d.mesh_cells);
  EXPECT_EQ(c.convention, NormConvention::Hermitian);
  EXPECT_EQ(c.tol.calibration, d.tol.calibration);
  EXPECT_EQ(c.suites, d.suites);
}

TEST(Config, NestedSections) {
  const auto c = parse_config(
      "surface:\n  preset: fn\n  length: 2.5\n  twist: 0.25\nmesh:\n  cells: 108\n"
      "convention: riemannian\ngeodesics: [A, AB]\nsuites: [operators, gardiner]\n");
  EXPECT_EQ(c.preset, "fn");
  EXPECT_EQ(c.fn_length, 2.5);
  EXPECT_EQ(c.fn_twist, 0.25);
  EXPECT_EQ(c.mesh_cells, 108);
  EXPECT_EQ(c.convention, NormConvention::Riemannian);
  EXPECT_EQ(c.geodesics, (std::vector<std::string>{"A", "AB"}));
  EXPECT_TRUE(c.suite_enabled("gardiner"));
  EXPECT_FALSE(c.suite_enabled("resolvent"));
  EXPECT_EQ(parse_config("suites: all\n").suites, known_suites());
}

TEST(Config, ValidationNamesKey) {
  try {
    parse_config("surface:\n  length: -1.0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("surface.length"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_config("geodesics: [Ac]\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("geodesics: [Aa]\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("suites: [nope]\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("line:\n  samples: 100\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("truncation:\n  kernel_cutoff: 2.0\n"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse_config("convention: kahler\n"); }), ErrorCode::ValidationError);
}

TEST(Config, UnknownKeySuggestion) {
  EXPECT_EQ(suggest_key("mesh.cellz"), "mesh.cells");
  EXPECT_EQ(suggest_key("completely.unrelated.key"), "");
  try {
    parse_config("mesh:\n  cellz: 48\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("mesh.cellz"), std::string::npos) << msg;
    EXPECT_NE(msg.find("mesh.cells"), std::string::npos) << msg;
  }
}

TEST(Config, ParseErrorAndFiles) {
  EXPECT_EQ(code_of([] { parse_config("mesh: [unclosed\n"); }), ErrorCode::ParseError);
  const auto dir = scratch_dir("config");
  const auto path = dir / "run.yaml";
  std::ofstream(path) << "seed: 11\nmesh:\n  cells: 192\n";
  const auto c = load_config(path);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.mesh_cells, 192);
  EXPECT_EQ(code_of([&] { load_config(dir / "missing.yaml"); }), ErrorCode::IoError);
}

TEST(Report, EmptyReportTable) {
  const RunReport r;
  const auto t = report_table(r);
  EXPECT_EQ(count_lines(t), 1u);
  EXPECT_EQ(t.rfind("schema_version,suite,word,", 0), 0u);
}

TEST(Report, OneRowPerGeodesicCheck) {
  RunReport r;
  for (const auto* w : {"A", "B"}) {
    GeodesicRecord g;
    g.word = w;
    g.length = 1.0;
    g.dl_re = {0.1};
    g.dl_im = {0.0};
    g.h_re = {0.2};
    g.h_im = {0.0};
    g.hlog_re = {0.3};
    g.hlog_im = {0.0};
    r.geodesics.push_back(g);
    for (int k = 0; k < 6; ++k) r.checks.push_back({"variation", w, "check" + std::to_string(k), 1.0, 2.0, 1.0, 0.0, true});
  }
  const auto t = report_table(r);
  EXPECT_EQ(count_lines(t), 13u);
}

TEST(Report, JsonRoundTripAndPrecision) {
  RunReport r;
  r.seed = 99;
  r.config = config_to_json(RunConfig{});
  r.checks.push_back({"geometry", "", "area", 0.1 + 0.2, 1.0 / 3.0, -1e-300, 0.0, false});
  r.gardiner.push_back({"twist", "A", 0.0, 1e-12, std::nan(""), 0.0, true});
  r.errors.push_back("resolvent: something");
  r.timings["geometry"] = 1.5;
  const auto j = to_json(r);
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.seed, 99u);
  ASSERT_EQ(back.checks.size(), 1u);
  EXPECT_EQ(back.checks[0].value, 0.1 + 0.2);
  EXPECT_EQ(back.checks[0].bound, 1.0 / 3.0);
  EXPECT_EQ(back.checks[0].margin, -1e-300);
  EXPECT_TRUE(std::isnan(back.gardiner.at(0).order_estimate));
  EXPECT_EQ(back.errors, r.errors);
  EXPECT_EQ(back.timings.at("geometry"), 1.5);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_FALSE(to_json(r, false).contains("timings"));

  RunReport row;
  row.checks.push_back({"s", "", "c", 0.1 + 0.2, 0.0, 0.0, 0.0, true});
  EXPECT_NE(report_table(row).find("0.30000000000000004"), std::string::npos);
}

TEST(Report, RejectsUnknownSchema) {
  auto j = to_json(RunReport{});
  j["schema_version"] = 99;
  EXPECT_EQ(code_of([&] { report_from_json(j); }), ErrorCode::ParseError);
}

TEST(Report, AtomicWriteOverwrites) {
  const auto dir = scratch_dir("atomic");
  const auto path = dir / "out.txt";
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_EQ(code_of([&] { write_atomic(dir / "no_such_dir" / "x.txt", "y"); }), ErrorCode::IoError);
}

TEST(Suite, FilteringAndDeterminism) {
  const auto r1 = run_suite(operators_only());
  const auto r2 = run_suite(operators_only());
  EXPECT_TRUE(r1.timings.contains("operators"));
  EXPECT_FALSE(r1.timings.contains("resolvent"));
  EXPECT_FALSE(r1.checks.empty());
  for (const auto& c : r1.checks) EXPECT_EQ(c.suite, "operators");
  EXPECT_EQ(to_json(r1, false).dump(), to_json(r2, false).dump());

  auto other = operators_only();
  other.seed += 1;
  EXPECT_NE(to_json(run_suite(other), false).dump(), to_json(r1, false).dump());
}

TEST(Suite, EmitOutputs) {
  const auto dir = scratch_dir("emit");
  const auto r = run_suite(operators_only());
  const auto files = emit_outputs(r, dir);
  EXPECT_TRUE(fs::exists(files.report));
  EXPECT_TRUE(fs::exists(files.table));
  for (const auto& p : files.plots) EXPECT_TRUE(fs::exists(p));
  const auto back = report_from_json(nlohmann::json::parse(slurp(files.report)));
  EXPECT_EQ(to_json(back, false).dump(), to_json(r, false).dump());
  EXPECT_EQ(count_lines(slurp(files.table)), r.checks.size() + 1);
}
