#pragma once

// Run configuration: YAML file with nested sections, strict key checking.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geolen/hyperbolic.hpp"

namespace geolen {

struct Tolerances {
  double length_quadrature = 1e-9;
  double area = 1e-3;
  double operator_identity = 1e-12;
  double m_form = 1e-10;
  double calibration = 1e-3;
  double pde_mean = 1e-2;
  double wp_relative = 5e-3;
  double max_principle = 1e-3;
  double gardiner_relative = 1e-3;
  double gardiner_absolute = 1e-6;
  double injection = 1e-10;
};

struct RunConfig {
  std::string preset = "modular";  // modular | fn
  double fn_length = 1.9248473002384139;
  double fn_twist = 0.0;
  std::vector<std::string> geodesics{"A", "B", "AB", "Ab"};

  int max_word_len = 6;
  double coset_radius = 10.0;
  double kernel_cutoff = 10.0;
  double y_max = 1e7;

  int mesh_cells = 48;        // data mesh for pairings and Gram matrices
  int field_cells = 12;       // mesh on which phi is tabulated
  std::size_t line_samples = 0;  // 0 = automatic

  NormConvention convention = NormConvention::Hermitian;
  Tolerances tol;
  std::filesystem::path output_dir = "geolen-out";
  std::vector<std::string> suites{"geometry", "operators", "resolvent", "gardiner", "variation"};
  std::uint64_t seed = 20240607;

  int random_elements = 10;
  int random_samples = 1000;
  int operator_inputs = 50;
  int m_form_inputs = 100;
  int probes = 50;

  bool suite_enabled(const std::string& name) const;
};

/// Names accepted in the suite list.
const std::vector<std::string>& known_suites();

/// Every accepted key in dotted form ("mesh.cells").
const std::vector<std::string>& config_keys();

/// Closest accepted key by edit distance, empty when nothing is close.
std::string suggest_key(const std::string& key);

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
/// ParseError on malformed YAML, ValidationError naming key and line otherwise.
RunConfig load_config(const std::filesystem::path& path);

/// Range checks shared by file loading and command-line overrides.
void validate(const RunConfig& c);

std::string_view to_string(NormConvention c);
NormConvention parse_convention(const std::string& s);

}  // namespace geolen
