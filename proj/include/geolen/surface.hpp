#pragma once

// Once-punctured torus groups <A, B>: words, breadth-first enumeration with an
// optional binary cache, the cusp frame with Ford reduction, the Dirichlet
// domain, the quadrature mesh and closed-geodesic representatives.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geolen/hyperbolic.hpp"

namespace geolen {

/// Freely reduced word in A, B and their inverses. Letters: 0 = A, 1 = B,
/// 2 = A^-1, 3 = B^-1 (inverse of letter k is k ^ 2). Text form uses
/// upper case for generators and lower case for inverses ("BAb" = B A B^-1).
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint8_t> letters);

  static Word parse(const std::string& text);
  static constexpr std::uint8_t inverse_letter(std::uint8_t l) { return l ^ 2u; }

  std::string str() const;
  const std::vector<std::uint8_t>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word operator*(const Word& o) const;  // concatenation followed by free reduction
  /// Canonical conjugacy-class representative: cyclically reduced, then the
  /// lexicographically smallest rotation.
  Word cyclic_normal_form() const;
  bool is_cyclically_reduced() const;

  bool operator==(const Word& o) const = default;

 private:
  std::vector<std::uint8_t> letters_;
};

/// Breadth-first table of all freely reduced words up to a length bound.
/// Index layout is arithmetic: level n starts at offset 1 + 4 (3^{n-1} - 1)/2.
class GroupTable {
 public:
  struct Entry {
    std::uint32_t parent;
    std::uint8_t letter;
    std::uint8_t length;
    MobiusTransform element;
  };

  GroupTable() = default;
  static GroupTable enumerate(const MobiusTransform& a, const MobiusTransform& b, int max_word_len,
                              std::size_t element_budget = 4'000'000);

  int max_word_len() const { return max_len_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const { return entries_; }

  Word word(std::size_t index) const;
  std::optional<std::size_t> index_of(const Word& w) const;

  static std::uint64_t generator_hash(const MobiusTransform& a, const MobiusTransform& b);
  std::uint64_t hash() const { return hash_; }

  /// Versioned binary cache: header + fixed-width records.
  void save(const std::filesystem::path& path) const;
  /// Returns nullopt on any mismatch or read failure.
  static std::optional<GroupTable> load(const std::filesystem::path& path, std::uint64_t hash, int max_word_len);
  /// Loads the cache when it matches, otherwise enumerates and rewrites it.
  static GroupTable cached(const std::filesystem::path& path, const MobiusTransform& a,
                           const MobiusTransform& b, int max_word_len,
                           std::size_t element_budget = 4'000'000);

 private:
  std::vector<Entry> entries_;
  int max_len_ = 0;
  std::uint64_t hash_ = 0;
};

struct FordReduction {
  cplx point;               // reduced point G z
  MobiusTransform element;  // G
  int steps;
};

/// One of the six cusp pieces covering the fundamental ideal quadrilateral:
/// piece = map(P), P = {0 <= x <= 1, y >= max(sqrt(1-x^2), sqrt(1-(1-x)^2))}.
struct CuspPiece {
  MobiusTransform map;
};

struct QuadratureNode {
  HPoint point;
  double weight;  // hyperbolic area weight dx dy / y^2
  int piece;
  double local_height;  // height in the piece chart
};

struct QuadratureMesh {
  std::vector<QuadratureNode> nodes;
  double y_max;
  int cells;
  int order;

  double total_weight() const;
};

struct DirichletSide {
  std::size_t table_index;  // pairing element, index into the surface table
  MobiusTransform element;  // side lies on the bisector of (center, element(center))
  cplx start;               // endpoints in H; ideal endpoints have Im = 0
  cplx end;
  bool start_ideal;
  bool end_ideal;
};

struct DirichletDomain {
  HPoint center;
  std::vector<DirichletSide> sides;
};

struct PointReduction {
  HPoint point;  // reduced point z0
  Word word;     // z = word(z0)
  int steps;
};

struct SurfaceOptions {
  int max_word_len = 6;
  std::size_t element_budget = 4'000'000;
  std::optional<std::filesystem::path> cache_path;
};

class FuchsianSurface;

struct ClosedGeodesic {
  Word word;
  MobiusTransform element;
  GeodesicAxis axis;
  double classical_length;
  int samples;

  double length(NormConvention c) const { return classical_length * convention_factor(c); }
};

class FuchsianSurface {
 public:
  /// Conjugates the generators so the cusp of the commutator sits at infinity.
  static FuchsianSurface from_generators(const MobiusTransform& a, const MobiusTransform& b,
                                         const SurfaceOptions& opts = {});
  /// A = [[1,1],[1,2]], B = [[1,-1],[-1,2]] (commutator subgroup of the modular group).
  static FuchsianSurface modular(const SurfaceOptions& opts = {});

  const MobiusTransform& A() const { return a_; }
  const MobiusTransform& B() const { return b_; }
  MobiusTransform commutator() const;  // A B A^-1 B^-1

  const GroupTable& table() const { return table_; }
  MobiusTransform element(const Word& w) const;

  double cusp_width() const { return cusp_width_; }
  /// Vertices of the ideal quadrilateral (infinity, p1, p2, p3), p1 < p2 < p3.
  const std::array<double, 3>& quad_vertices() const { return vertices_; }
  const std::array<CuspPiece, 6>& pieces() const { return pieces_; }
  const HPoint& center() const { return center_; }

  /// Maximizes Im(Gz) over the group; the result lies in the Ford domain.
  FordReduction ford_reduce(cplx z) const;
  /// Lower edge height of the Ford domain.
  double ford_min_height() const { return ford_min_height_; }
  const std::vector<MobiusTransform>& ford_elements() const { return ford_elements_; }

  const DirichletDomain& dirichlet() const { return dirichlet_; }
  PointReduction reduce_point(const HPoint& z, int max_steps = 1000) const;

  double min_center_displacement() const;

 private:
  FuchsianSurface() = default;
  void build(const SurfaceOptions& opts);

  MobiusTransform a_ = MobiusTransform::identity();
  MobiusTransform b_ = MobiusTransform::identity();
  GroupTable table_;
  double cusp_width_ = 0.0;
  double strip_left_ = 0.0;
  std::array<double, 3> vertices_{};
  std::array<CuspPiece, 6> pieces_{CuspPiece{MobiusTransform::identity()}, CuspPiece{MobiusTransform::identity()},
                                   CuspPiece{MobiusTransform::identity()}, CuspPiece{MobiusTransform::identity()},
                                   CuspPiece{MobiusTransform::identity()}, CuspPiece{MobiusTransform::identity()}};
  std::vector<MobiusTransform> ford_elements_;
  double ford_min_height_ = 0.0;
  HPoint center_{0.0, 1.0};
  DirichletDomain dirichlet_{HPoint{0.0, 1.0}, {}};
};

struct GeneratorPair {
  MobiusTransform a;
  MobiusTransform b;
};

/// Raw Fenchel-Nielsen generators (see punctured_torus_from_fn).
GeneratorPair fn_generators(double length, double twist);

/// Fenchel-Nielsen construction: A = diag(e^{l/2}, e^{-l/2}); B is the
/// time-symmetric partner for tau = 0, twisted as T_{tau/2} B T_{tau/2}.
FuchsianSurface punctured_torus_from_fn(double length, double twist, const SurfaceOptions& opts = {});

/// Inverse of the construction above computed from traces (conjugation invariant).
struct FnCoordinates {
  double length;
  double twist;
};
FnCoordinates fn_coordinates(const MobiusTransform& a, const MobiusTransform& b);

GroupTable enumerate_group(const FuchsianSurface& s, int max_word_len, std::size_t element_budget = 4'000'000);

/// Representatives of <g0>\Gamma whose axis translate h^{-1}(axis) passes within
/// `radius` of the domain center; each is normalized so that the standardized
/// image of h(center) lies in the annulus 1 <= |w| < e^L.
std::vector<MobiusTransform> coset_reps(const FuchsianSurface& s, const ClosedGeodesic& g, double radius);

DirichletDomain dirichlet_domain(const FuchsianSurface& s, const HPoint& center);

/// Gauss-Legendre product rule on the six cusp pieces, in the flat chart
/// (x, u = 1/y) where the hyperbolic measure is dx du. `graded` splits the
/// panel next to the truncation height geometrically, for integrands that grow
/// in the cusps.
QuadratureMesh build_mesh(const FuchsianSurface& s, int target_cells, double y_max = 1e7, int order = 6,
                          bool graded = false);

ClosedGeodesic geodesic_representative(const FuchsianSurface& s, const Word& w, int samples = 256);

}  // namespace geolen
