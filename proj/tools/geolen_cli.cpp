// geolen: lengths, length variations and plurisubharmonicity checks on
// punctured-torus surfaces.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geolen/report.hpp"
#include "geolen/surface.hpp"

namespace {

using namespace geolen;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string convention;
  std::optional<int> max_word_len;
  std::optional<int> cells;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "YAML run configuration")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--convention", c.convention, "hermitian or riemannian")
      ->check(CLI::IsMember({"hermitian", "riemannian"}));
  app->add_option("--max-word-len", c.max_word_len, "word length cap for the group enumeration");
  app->add_option("--cells", c.cells, "target cell count of the data mesh");
}

RunConfig effective_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.convention.empty()) cfg.convention = parse_convention(c.convention);
  if (c.max_word_len) cfg.max_word_len = *c.max_word_len;
  if (c.cells) cfg.mesh_cells = *c.cells;
  validate(cfg);
  return cfg;
}

std::shared_ptr<const FuchsianSurface> surface_for(const RunConfig& cfg) {
  SurfaceOptions o;
  o.max_word_len = cfg.max_word_len;
  if (cfg.preset == "modular") return std::make_shared<const FuchsianSurface>(FuchsianSurface::modular(o));
  return std::make_shared<const FuchsianSurface>(punctured_torus_from_fn(cfg.fn_length, cfg.fn_twist, o));
}

void print_checks(const RunReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%-4s %-10s %-8s %-26s value=% .6e bound=% .6e margin=% .3e budget=%.3e\n", c.pass ? "ok" : "FAIL",
                c.suite.c_str(), c.geodesic.c_str(), c.name.c_str(), c.value, c.bound, c.margin, c.budget);
  }
  for (const auto& e : r.errors) std::printf("error: %s\n", e.c_str());
}

int run_and_emit(RunConfig cfg, const std::vector<std::string>& suites, bool show_matrices) {
  if (!suites.empty()) cfg.suites = suites;
  const auto report = run_suite(cfg);
  print_checks(report);
  if (show_matrices) {
    for (const auto& g : report.geodesics) {
      std::printf("%-8s l=%.12f dl=%.12f%+.12fi H=%.12f%+.12fi Hlog=%.12f%+.12fi\n", g.word.c_str(), g.length,
                  g.dl_re.at(0), g.dl_im.at(0), g.h_re.at(0), g.h_im.at(0), g.hlog_re.at(0), g.hlog_im.at(0));
    }
  }
  for (const auto& g : report.gardiner) {
    std::printf("%-7s %-8s formula=%.12f fd=%.12f rel=%.2e\n", g.direction.c_str(), g.word.c_str(), g.formula, g.fd,
                g.rel_error);
  }
  const auto files = emit_outputs(report, cfg.output_dir);
  std::printf("%zu checks, %zu failed; report written to %s\n", report.checks.size(), report.failures(),
              files.report.string().c_str());
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic length functions on punctured tori: variations and plurisubharmonicity checks"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> words;
  auto* length = app.add_subcommand("length", "print geodesic lengths");
  add_common(length, common);
  length->add_option("--word", words, "words in A, B, a, b (default: configured geodesics)");

  auto* first = app.add_subcommand("first-variation", "first variation against finite differences");
  auto* second = app.add_subcommand("second-variation", "second variation by both routes");
  auto* psh = app.add_subcommand("psh-check", "plurisubharmonicity bounds");
  auto* ops = app.add_subcommand("operator-test", "line operator identities");
  auto* suite = app.add_subcommand("suite", "run the configured suites");
  for (auto* sub : {first, second, psh, ops, suite}) add_common(sub, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = effective_config(common);
    if (length->parsed()) {
      const auto s = surface_for(cfg);
      for (const auto& w : words.empty() ? cfg.geodesics : words) {
        const auto g = geodesic_representative(*s, Word::parse(w));
        std::printf("%-12s classical=%.15f %s=%.15f\n", w.c_str(), g.classical_length,
                    std::string(to_string(cfg.convention)).c_str(), g.length(cfg.convention));
      }
      return 0;
    }
    if (first->parsed()) return run_and_emit(cfg, {"gardiner"}, false);
    if (second->parsed()) return run_and_emit(cfg, {"variation"}, true);
    if (psh->parsed()) return run_and_emit(cfg, {"variation"}, true);
    if (ops->parsed()) return run_and_emit(cfg, {"operators"}, false);
    return run_and_emit(cfg, {}, true);
  } catch (const Error& e) {
    std::fprintf(stderr, "geolen: %s\n", e.what());
    return 2;
  }
}
