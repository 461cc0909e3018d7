#include "geolen/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "geolen/error.hpp"

namespace geolen {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::vector<double> read_numbers(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(read_number(v));
  return out;
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string fmt17(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

// ---------------------------------------------------------------- svg

struct Series {
  std::string label;
  std::vector<double> x, y;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool scatter, bool diagonal) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (diagonal) x0 = y0 = std::min(x0, y0), x1 = y1 = std::max(x1, y1);
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y1))) y0 -= 0.5 * std::max(1e-12, std::abs(y0)), y1 += 0.5 * std::max(1e-12, std::abs(y1));
  const double padx = 0.04 * (x1 - x0), pady = 0.06 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  if (diagonal) {
    o << "<line x1=\"" << px(x0) << "\" y1=\"" << py(x0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(x1)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 6];
    const auto& sr = series[s];
    if (scatter) {
      for (std::size_t k = 0; k < sr.x.size(); ++k) {
        if (!std::isfinite(sr.x[k]) || !std::isfinite(sr.y[k])) continue;
        o << "<circle cx=\"" << px(sr.x[k]) << "\" cy=\"" << py(sr.y[k]) << "\" r=\"3.5\" fill=\"" << color
          << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < sr.x.size(); ++k) o << px(sr.x[k]) << ',' << py(sr.y[k]) << ' ';
      o << "\"/>\n";
    }
    o << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 15 * s << "\" text-anchor=\"end\" fill=\"" << color
      << "\">" << sr.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& c) {
  const auto& t = c.tol;
  return json{{"surface", {{"preset", c.preset}, {"length", c.fn_length}, {"twist", c.fn_twist}}},
              {"geodesics", c.geodesics},
              {"truncation",
               {{"max_word_len", c.max_word_len},
                {"coset_radius", c.coset_radius},
                {"kernel_cutoff", c.kernel_cutoff},
                {"y_max", c.y_max}}},
              {"mesh", {{"cells", c.mesh_cells}, {"field_cells", c.field_cells}}},
              {"line", {{"samples", c.line_samples}}},
              {"convention", std::string(to_string(c.convention))},
              {"tolerances",
               {{"length_quadrature", t.length_quadrature},
                {"area", t.area},
                {"operator_identity", t.operator_identity},
                {"m_form", t.m_form},
                {"calibration", t.calibration},
                {"pde_mean", t.pde_mean},
                {"wp_relative", t.wp_relative},
                {"max_principle", t.max_principle},
                {"gardiner_relative", t.gardiner_relative},
                {"gardiner_absolute", t.gardiner_absolute},
                {"injection", t.injection}}},
              {"output", {{"dir", c.output_dir.string()}}},
              {"suites", c.suites},
              {"seed", c.seed},
              {"sampling",
               {{"random_elements", c.random_elements},
                {"random_samples", c.random_samples},
                {"operator_inputs", c.operator_inputs},
                {"m_form_inputs", c.m_form_inputs},
                {"probes", c.probes}}}};
}

nlohmann::json to_json(const RunReport& r, bool with_timings) {
  json j;
  j["schema_version"] = r.schema_version;
  j["table_schema_version"] = kTableSchemaVersion;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["pass"] = r.pass;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"suite", c.suite},
                           {"geodesic", c.geodesic},
                           {"name", c.name},
                           {"value", number(c.value)},
                           {"bound", number(c.bound)},
                           {"margin", number(c.margin)},
                           {"budget", number(c.budget)},
                           {"pass", c.pass}});
  }
  j["geodesics"] = json::array();
  for (const auto& g : r.geodesics) {
    j["geodesics"].push_back({{"word", g.word},
                              {"length_classical", g.length_classical},
                              {"length", g.length},
                              {"samples", g.samples},
                              {"dl_re", numbers(g.dl_re)},
                              {"dl_im", numbers(g.dl_im)},
                              {"h_re", numbers(g.h_re)},
                              {"h_im", numbers(g.h_im)},
                              {"hlog_re", numbers(g.hlog_re)},
                              {"hlog_im", numbers(g.hlog_im)},
                              {"sup_norms", numbers(g.sup_norms)},
                              {"budget", number(g.budget)},
                              {"profile_t", numbers(g.profile_t)},
                              {"phi_profile", numbers(g.phi_profile)},
                              {"a_profile", numbers(g.a_profile)}});
  }
  j["gardiner"] = json::array();
  for (const auto& g : r.gardiner) {
    j["gardiner"].push_back({{"direction", g.direction},
                             {"word", g.word},
                             {"formula", number(g.formula)},
                             {"fd", number(g.fd)},
                             {"order_estimate", number(g.order_estimate)},
                             {"rel_error", number(g.rel_error)},
                             {"pass", g.pass}});
  }
  j["errors"] = r.errors;
  if (with_timings) j["timings"] = r.timings;
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw Error(ErrorCode::ParseError, "unsupported report schema " + std::to_string(r.schema_version));
    }
    r.config = j.at("config");
    r.seed = j.at("seed").get<std::uint64_t>();
    r.pass = j.at("pass").get<bool>();
    for (const auto& c : j.at("checks")) {
      r.checks.push_back({c.at("suite").get<std::string>(), c.at("geodesic").get<std::string>(),
                          c.at("name").get<std::string>(), read_number(c.at("value")), read_number(c.at("bound")),
                          read_number(c.at("margin")), read_number(c.at("budget")), c.at("pass").get<bool>()});
    }
    for (const auto& g : j.at("geodesics")) {
      GeodesicRecord rec;
      rec.word = g.at("word").get<std::string>();
      rec.length_classical = g.at("length_classical").get<double>();
      rec.length = g.at("length").get<double>();
      rec.samples = g.at("samples").get<std::size_t>();
      rec.dl_re = read_numbers(g.at("dl_re"));
      rec.dl_im = read_numbers(g.at("dl_im"));
      rec.h_re = read_numbers(g.at("h_re"));
      rec.h_im = read_numbers(g.at("h_im"));
      rec.hlog_re = read_numbers(g.at("hlog_re"));
      rec.hlog_im = read_numbers(g.at("hlog_im"));
      rec.sup_norms = read_numbers(g.at("sup_norms"));
      rec.budget = read_number(g.at("budget"));
      rec.profile_t = read_numbers(g.at("profile_t"));
      rec.phi_profile = read_numbers(g.at("phi_profile"));
      rec.a_profile = read_numbers(g.at("a_profile"));
      r.geodesics.push_back(std::move(rec));
    }
    for (const auto& g : j.at("gardiner")) {
      r.gardiner.push_back({g.at("direction").get<std::string>(), g.at("word").get<std::string>(),
                            read_number(g.at("formula")), read_number(g.at("fd")),
                            read_number(g.at("order_estimate")), read_number(g.at("rel_error")),
                            g.at("pass").get<bool>()});
    }
    r.errors = j.at("errors").get<std::vector<std::string>>();
    if (j.contains("timings")) r.timings = j.at("timings").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
}

std::string report_table(const RunReport& r) {
  std::ostringstream o;
  o << "schema_version,suite,word,length_classical,length_convention,first_variation_re,first_variation_im,"
       "h_re,h_im,hlog_re,hlog_im,check,value,bound,margin,budget,pass\n";
  auto find_geodesic = [&](const std::string& w) -> const GeodesicRecord* {
    for (const auto& g : r.geodesics) {
      if (g.word == w) return &g;
    }
    return nullptr;
  };
  for (const auto& c : r.checks) {
    o << kTableSchemaVersion << ',' << csv_field(c.suite) << ',' << csv_field(c.geodesic) << ',';
    if (const auto* g = find_geodesic(c.geodesic); g != nullptr && !g->dl_re.empty()) {
      o << fmt17(g->length_classical) << ',' << fmt17(g->length) << ',' << fmt17(g->dl_re[0]) << ','
        << fmt17(g->dl_im[0]) << ',' << fmt17(g->h_re[0]) << ',' << fmt17(g->h_im[0]) << ','
        << fmt17(g->hlog_re[0]) << ',' << fmt17(g->hlog_im[0]) << ',';
    } else {
      o << ",,,,,,,,";
    }
    o << csv_field(c.name) << ',' << fmt17(c.value) << ',' << fmt17(c.bound) << ',' << fmt17(c.margin) << ','
      << fmt17(c.budget) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return o.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

OutputFiles emit_outputs(const RunReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  OutputFiles out{dir / "report.json", dir / "checks.csv", {}};
  write_atomic(out.report, to_json(r).dump(2) + "\n");
  write_atomic(out.table, report_table(r));

  std::vector<Series> phi, amp;
  for (const auto& g : r.geodesics) {
    phi.push_back({g.word, g.profile_t, g.phi_profile});
    amp.push_back({g.word, g.profile_t, g.a_profile});
  }
  std::vector<Series> scatter;
  for (const auto* dir_name : {"twist", "length"}) {
    Series s{dir_name, {}, {}};
    for (const auto& g : r.gardiner) {
      if (g.direction != dir_name) continue;
      s.x.push_back(g.fd);
      s.y.push_back(g.formula);
    }
    if (!s.x.empty()) scatter.push_back(std::move(s));
  }
  const std::pair<std::string, std::string> plots[] = {
      {"phi_profile.svg", svg_plot("phi along the geodesic", "arclength t", "Re phi(t)", phi, false, false)},
      {"a_profile.svg", svg_plot("|a(t)| along the geodesic", "arclength t", "|a(t)|", amp, false, false)},
      {"gardiner_scatter.svg",
       svg_plot("first variation vs finite differences", "finite difference", "2 Re(first variation)", scatter,
                true, true)}};
  for (const auto& [name, content] : plots) {
    write_atomic(dir / name, content);
    out.plots.push_back(dir / name);
  }
  return out;
}

}  // namespace geolen
