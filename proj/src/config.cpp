#include "geolen/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "geolen/error.hpp"
#include "geolen/surface.hpp"

namespace geolen {

namespace {

struct Violation {
  std::string key;
  std::string message;
};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::optional<Violation> find_violation(const RunConfig& c) {
  auto bad = [](std::string key, std::string msg) { return std::optional<Violation>(Violation{key, msg}); };
  if (c.preset != "modular" && c.preset != "fn") return bad("surface.preset", "expected 'modular' or 'fn'");
  if (!(c.fn_length >= 1e-6 && c.fn_length <= 20.0)) return bad("surface.length", "must lie in [1e-6, 20]");
  if (!std::isfinite(c.fn_twist) || std::abs(c.fn_twist) > 100.0) return bad("surface.twist", "must lie in [-100, 100]");
  if (c.geodesics.empty()) return bad("geodesics", "at least one word is required");
  for (const auto& w : c.geodesics) {
    try {
      if (Word::parse(w).empty()) return bad("geodesics", "word '" + w + "' reduces to the identity");
    } catch (const Error&) {
      return bad("geodesics", "word '" + w + "' uses letters other than A, B, a, b");
    }
  }
  if (c.max_word_len < 1 || c.max_word_len > 14) return bad("truncation.max_word_len", "must lie in [1, 14]");
  if (!(c.coset_radius >= 2.0 && c.coset_radius <= 16.0)) return bad("truncation.coset_radius", "must lie in [2, 16]");
  if (!(c.kernel_cutoff > 2.5 && c.kernel_cutoff <= 30.0)) {
    return bad("truncation.kernel_cutoff", "must lie in (2.5, 30]");
  }
  if (!(c.y_max >= 10.0 && c.y_max <= 1e12)) return bad("truncation.y_max", "must lie in [10, 1e12]");
  if (c.mesh_cells < 12 || c.mesh_cells > 4800) return bad("mesh.cells", "must lie in [12, 4800]");
  if (c.field_cells < 12 || c.field_cells > 4800) return bad("mesh.field_cells", "must lie in [12, 4800]");
  if (c.line_samples != 0 && (!is_power_of_two(c.line_samples) || c.line_samples < 64 || c.line_samples > 65536)) {
    return bad("line.samples", "must be 0 or a power of two in [64, 65536]");
  }
  const std::pair<const char*, double> tols[] = {
      {"length_quadrature", c.tol.length_quadrature}, {"area", c.tol.area},
      {"operator_identity", c.tol.operator_identity}, {"m_form", c.tol.m_form},
      {"calibration", c.tol.calibration},             {"pde_mean", c.tol.pde_mean},
      {"wp_relative", c.tol.wp_relative},             {"max_principle", c.tol.max_principle},
      {"gardiner_relative", c.tol.gardiner_relative}, {"gardiner_absolute", c.tol.gardiner_absolute},
      {"injection", c.tol.injection}};
  for (const auto& [name, v] : tols) {
    if (!(v > 0.0 && v < 1.0)) return bad(std::string("tolerances.") + name, "must lie in (0, 1)");
  }
  if (c.output_dir.empty()) return bad("output.dir", "must not be empty");
  for (const auto& s : c.suites) {
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end()) {
      return bad("suites", "unknown suite '" + s + "'");
    }
  }
  const std::pair<const char*, int> counts[] = {{"random_elements", c.random_elements},
                                                {"random_samples", c.random_samples},
                                                {"operator_inputs", c.operator_inputs},
                                                {"m_form_inputs", c.m_form_inputs},
                                                {"probes", c.probes}};
  for (const auto& [name, v] : counts) {
    if (v < 1 || v > 1'000'000) return bad(std::string("sampling.") + name, "must lie in [1, 1000000]");
  }
  return std::nullopt;
}

class Reader {
 public:
  Reader(std::string origin, RunConfig& cfg) : origin_(std::move(origin)), cfg_(cfg) {}

  void walk(const YAML::Node& node, const std::string& prefix) {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      const std::string path = prefix.empty() ? key : prefix + "." + key;
      const int line = kv.first.Mark().line + 1;
      lines_[path] = line;
      if (is_section(path)) {
        if (!kv.second.IsMap()) fail(path, line, "expected a section");
        walk(kv.second, path);
      } else if (std::find(config_keys().begin(), config_keys().end(), path) != config_keys().end()) {
        assign(path, kv.second, line);
      } else {
        std::string msg = "unknown key";
        if (const auto s = suggest_key(path); !s.empty()) msg += "; did you mean '" + s + "'?";
        fail(path, line, msg);
      }
    }
  }

  int line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  [[noreturn]] void fail(const std::string& key, int line, const std::string& msg) const {
    throw Error(ErrorCode::ValidationError, origin_ + ":" + std::to_string(line) + ": '" + key + "': " + msg);
  }

 private:
  static bool is_section(const std::string& p) {
    static const std::vector<std::string> sections{"surface", "truncation", "mesh",  "line",
                                                   "tolerances", "output",   "sampling"};
    return std::find(sections.begin(), sections.end(), p) != sections.end();
  }

  template <class T>
  T as(const std::string& key, const YAML::Node& n, int line) const {
    if (!n.IsScalar()) fail(key, line, "expected a scalar value");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(key, line, "cannot read '" + n.Scalar() + "' as a value of the expected type");
    }
  }

  std::vector<std::string> list(const std::string& key, const YAML::Node& n, int line) const {
    if (n.IsScalar()) return {n.as<std::string>()};
    if (!n.IsSequence()) fail(key, line, "expected a list");
    std::vector<std::string> out;
    for (const auto& e : n) out.push_back(as<std::string>(key, e, line));
    return out;
  }

  void assign(const std::string& k, const YAML::Node& v, int line) {
    auto& c = cfg_;
    auto& t = c.tol;
    const std::map<std::string, double*> reals{
        {"surface.length", &c.fn_length},
        {"surface.twist", &c.fn_twist},
        {"truncation.coset_radius", &c.coset_radius},
        {"truncation.kernel_cutoff", &c.kernel_cutoff},
        {"truncation.y_max", &c.y_max},
        {"tolerances.length_quadrature", &t.length_quadrature},
        {"tolerances.area", &t.area},
        {"tolerances.operator_identity", &t.operator_identity},
        {"tolerances.m_form", &t.m_form},
        {"tolerances.calibration", &t.calibration},
        {"tolerances.pde_mean", &t.pde_mean},
        {"tolerances.wp_relative", &t.wp_relative},
        {"tolerances.max_principle", &t.max_principle},
        {"tolerances.gardiner_relative", &t.gardiner_relative},
        {"tolerances.gardiner_absolute", &t.gardiner_absolute},
        {"tolerances.injection", &t.injection}};
    const std::map<std::string, int*> ints{{"truncation.max_word_len", &c.max_word_len},
                                           {"mesh.cells", &c.mesh_cells},
                                           {"mesh.field_cells", &c.field_cells},
                                           {"sampling.random_elements", &c.random_elements},
                                           {"sampling.random_samples", &c.random_samples},
                                           {"sampling.operator_inputs", &c.operator_inputs},
                                           {"sampling.m_form_inputs", &c.m_form_inputs},
                                           {"sampling.probes", &c.probes}};
    if (auto it = reals.find(k); it != reals.end()) {
      *it->second = as<double>(k, v, line);
    } else if (auto jt = ints.find(k); jt != ints.end()) {
      *jt->second = as<int>(k, v, line);
    } else if (k == "surface.preset") {
      c.preset = as<std::string>(k, v, line);
    } else if (k == "geodesics") {
      c.geodesics = list(k, v, line);
    } else if (k == "line.samples") {
      const auto n = as<long long>(k, v, line);
      if (n < 0) fail(k, line, "must be 0 or a power of two in [64, 65536]");
      c.line_samples = static_cast<std::size_t>(n);
    } else if (k == "convention") {
      try {
        c.convention = parse_convention(as<std::string>(k, v, line));
      } catch (const Error&) {
        fail(k, line, "expected 'hermitian' or 'riemannian'");
      }
    } else if (k == "output.dir") {
      c.output_dir = as<std::string>(k, v, line);
    } else if (k == "suites") {
      c.suites = list(k, v, line);
      if (c.suites.size() == 1 && c.suites[0] == "all") c.suites = known_suites();
    } else if (k == "seed") {
      c.seed = as<std::uint64_t>(k, v, line);
    }
  }

  std::string origin_;
  RunConfig& cfg_;
  std::map<std::string, int> lines_;
};

}  // namespace

bool RunConfig::suite_enabled(const std::string& name) const {
  return std::find(suites.begin(), suites.end(), name) != suites.end();
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{"geometry", "operators", "resolvent", "gardiner", "variation"};
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "surface.preset",
      "surface.length",
      "surface.twist",
      "geodesics",
      "truncation.max_word_len",
      "truncation.coset_radius",
      "truncation.kernel_cutoff",
      "truncation.y_max",
      "mesh.cells",
      "mesh.field_cells",
      "line.samples",
      "convention",
      "tolerances.length_quadrature",
      "tolerances.area",
      "tolerances.operator_identity",
      "tolerances.m_form",
      "tolerances.calibration",
      "tolerances.pde_mean",
      "tolerances.wp_relative",
      "tolerances.max_principle",
      "tolerances.gardiner_relative",
      "tolerances.gardiner_absolute",
      "tolerances.injection",
      "output.dir",
      "suites",
      "seed",
      "sampling.random_elements",
      "sampling.random_samples",
      "sampling.operator_inputs",
      "sampling.m_form_inputs",
      "sampling.probes"};
  return keys;
}

std::string suggest_key(const std::string& key) {
  std::string best;
  std::size_t best_d = std::max<std::size_t>(2, key.size() / 3) + 1;
  for (const auto& k : config_keys()) {
    const auto d = edit_distance(key, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::string_view to_string(NormConvention c) { return c == NormConvention::Hermitian ? "hermitian" : "riemannian"; }

NormConvention parse_convention(const std::string& s) {
  if (s == "hermitian") return NormConvention::Hermitian;
  if (s == "riemannian") return NormConvention::Riemannian;
  throw Error(ErrorCode::ValidationError, "convention must be 'hermitian' or 'riemannian', got '" + s + "'");
}

void validate(const RunConfig& c) {
  if (const auto v = find_violation(c)) throw Error(ErrorCode::ValidationError, "'" + v->key + "': " + v->message);
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  Reader reader(origin, cfg);
  if (!root.IsMap()) reader.fail("<root>", root.Mark().line + 1, "expected a mapping of sections");
  reader.walk(root, "");
  if (const auto v = find_violation(cfg)) reader.fail(v->key, reader.line_of(v->key), v->message);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace geolen
