#include "geolen/surface.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geolen/numerics.hpp"

namespace geolen {

// ---------------------------------------------------------------- words

Word::Word(std::vector<std::uint8_t> letters) {
  for (auto l : letters) {
    if (l > 3) throw Error(ErrorCode::ValidationError, "word letter out of range");
    if (!letters_.empty() && letters_.back() == inverse_letter(l)) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

Word Word::parse(const std::string& text) {
  std::vector<std::uint8_t> letters;
  for (char ch : text) {
    switch (ch) {
      case 'A': letters.push_back(0); break;
      case 'B': letters.push_back(1); break;
      case 'a': letters.push_back(2); break;
      case 'b': letters.push_back(3); break;
      case ' ': break;
      default: throw Error(ErrorCode::ParseError, "unexpected letter '" + std::string(1, ch) + "' in word");
    }
  }
  return Word(std::move(letters));
}

std::string Word::str() const {
  static constexpr char kNames[] = {'A', 'B', 'a', 'b'};
  std::string s;
  for (auto l : letters_) s.push_back(kNames[l]);
  return s.empty() ? "1" : s;
}

Word Word::inverse() const {
  std::vector<std::uint8_t> inv(letters_.rbegin(), letters_.rend());
  for (auto& l : inv) l = inverse_letter(l);
  return Word(std::move(inv));
}

Word Word::operator*(const Word& o) const {
  auto all = letters_;
  all.insert(all.end(), o.letters_.begin(), o.letters_.end());
  return Word(std::move(all));
}

bool Word::is_cyclically_reduced() const {
  return letters_.size() < 2 || letters_.front() != inverse_letter(letters_.back());
}

Word Word::cyclic_normal_form() const {
  std::deque<std::uint8_t> d(letters_.begin(), letters_.end());
  while (d.size() >= 2 && d.front() == inverse_letter(d.back())) {
    d.pop_front();
    d.pop_back();
  }
  std::vector<std::uint8_t> v(d.begin(), d.end());
  auto best = v;
  for (std::size_t r = 1; r < v.size(); ++r) {
    std::rotate(v.begin(), v.begin() + 1, v.end());
    if (v < best) best = v;
  }
  Word w;
  w.letters_ = std::move(best);
  return w;
}

// ---------------------------------------------------------------- table

namespace {

std::size_t level_offset(int n) {
  if (n == 0) return 0;
  std::size_t p = 1;
  for (int i = 1; i < n; ++i) p *= 3;
  return 1 + 2 * (p - 1);
}

MobiusTransform generator(const MobiusTransform& a, const MobiusTransform& b, std::uint8_t l) {
  switch (l) {
    case 0: return a;
    case 1: return b;
    case 2: return a.inverse();
    default: return b.inverse();
  }
}

constexpr char kCacheMagic[8] = {'G', 'E', 'O', 'L', 'E', 'N', 'G', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

struct CacheRecord {
  std::uint32_t parent;
  std::uint8_t letter;
  std::uint8_t length;
  std::uint16_t pad;
  double m[4];
};
static_assert(sizeof(CacheRecord) == 40);

}  // namespace

GroupTable GroupTable::enumerate(const MobiusTransform& a, const MobiusTransform& b, int max_word_len,
                                 std::size_t element_budget) {
  if (max_word_len < 1) throw Error(ErrorCode::ValidationError, "max_word_len must be >= 1");
  const std::size_t total = level_offset(max_word_len + 1);
  if (total > element_budget) {
    throw Error(ErrorCode::CacheOverflow, "enumeration of " + std::to_string(total) +
                                              " elements exceeds the budget of " + std::to_string(element_budget));
  }
  GroupTable t;
  t.max_len_ = max_word_len;
  t.hash_ = generator_hash(a, b);
  t.entries_.reserve(total);
  t.entries_.push_back({0, 0, 0, MobiusTransform::identity()});
  const std::array<MobiusTransform, 4> gens{generator(a, b, 0), generator(a, b, 1), generator(a, b, 2),
                                            generator(a, b, 3)};
  for (int n = 0; n < max_word_len; ++n) {
    const std::size_t begin = level_offset(n);
    const std::size_t end = level_offset(n + 1);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::uint8_t l = 0; l < 4; ++l) {
        if (n > 0 && l == Word::inverse_letter(t.entries_[i].letter)) continue;
        t.entries_.push_back({static_cast<std::uint32_t>(i), l, static_cast<std::uint8_t>(n + 1),
                              t.entries_[i].element * gens[l]});
      }
    }
  }
  return t;
}

Word GroupTable::word(std::size_t index) const {
  std::vector<std::uint8_t> rev;
  while (index != 0) {
    rev.push_back(entries_[index].letter);
    index = entries_[index].parent;
  }
  return Word(std::vector<std::uint8_t>(rev.rbegin(), rev.rend()));
}

std::optional<std::size_t> GroupTable::index_of(const Word& w) const {
  if (static_cast<int>(w.size()) > max_len_) return std::nullopt;
  std::size_t idx = 0;
  int n = 0;
  std::uint8_t last = 0;
  for (auto l : w.letters()) {
    if (n == 0) {
      idx = 1 + l;
    } else {
      const std::size_t rank = idx - level_offset(n);
      const std::uint8_t forbidden = Word::inverse_letter(last);
      const std::size_t j = l - (l > forbidden ? 1 : 0);
      idx = level_offset(n + 1) + 3 * rank + j;
    }
    last = l;
    ++n;
  }
  return idx;
}

std::uint64_t GroupTable::generator_hash(const MobiusTransform& a, const MobiusTransform& b) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (auto c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (double v : a.entries()) mix(v);
  for (double v : b.entries()) mix(v);
  return h;
}

void GroupTable::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    const std::uint64_t count = entries_.size();
    const std::uint32_t len = static_cast<std::uint32_t>(max_len_);
    out.write(kCacheMagic, sizeof(kCacheMagic));
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof(kCacheVersion));
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(reinterpret_cast<const char*>(&hash_), sizeof(hash_));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& e : entries_) {
      CacheRecord r{e.parent, e.letter, e.length, 0, {e.element.a(), e.element.b(), e.element.c(), e.element.d()}};
      out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    }
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<GroupTable> GroupTable::load(const std::filesystem::path& path, std::uint64_t hash, int max_word_len) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0, len = 0;
  std::uint64_t file_hash = 0, count = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  in.read(reinterpret_cast<char*>(&file_hash), sizeof(file_hash));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0 || version != kCacheVersion ||
      file_hash != hash || static_cast<int>(len) != max_word_len || count != level_offset(max_word_len + 1)) {
    return std::nullopt;
  }
  GroupTable t;
  t.max_len_ = max_word_len;
  t.hash_ = hash;
  t.entries_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    CacheRecord r{};
    in.read(reinterpret_cast<char*>(&r), sizeof(r));
    if (!in) return std::nullopt;
    t.entries_.push_back({r.parent, r.letter, r.length, MobiusTransform::unchecked(r.m[0], r.m[1], r.m[2], r.m[3])});
  }
  return t;
}

GroupTable GroupTable::cached(const std::filesystem::path& path, const MobiusTransform& a, const MobiusTransform& b,
                              int max_word_len, std::size_t element_budget) {
  if (auto t = load(path, generator_hash(a, b), max_word_len)) return std::move(*t);
  auto t = enumerate(a, b, max_word_len, element_budget);
  try {
    t.save(path);
  } catch (const std::exception&) {
    // An unwritable cache only costs a rebuild next time.
  }
  return t;
}

GroupTable enumerate_group(const FuchsianSurface& s, int max_word_len, std::size_t element_budget) {
  return GroupTable::enumerate(s.A(), s.B(), max_word_len, element_budget);
}

// ---------------------------------------------------------------- surface

namespace {

MobiusTransform conjugate(const MobiusTransform& m, const MobiusTransform& by) {
  return by * m * by.inverse();
}

// Geodesic midpoint of z and w.
cplx geodesic_midpoint(cplx z, cplx w) {
  const cplx p = (w - z) / (w - std::conj(z));
  const double r = std::abs(p);
  if (r < 1e-15) return z;
  const double dist = 2.0 * std::atanh(r);
  const cplx m = p / r * std::tanh(0.25 * dist);
  return (z - m * std::conj(z)) / (1.0 - m);
}

}  // namespace

double QuadratureMesh::total_weight() const {
  std::vector<double> w;
  w.reserve(nodes.size());
  for (const auto& n : nodes) w.push_back(n.weight);
  return pairwise_sum(w);
}

MobiusTransform FuchsianSurface::commutator() const { return a_ * b_ * a_.inverse() * b_.inverse(); }

MobiusTransform FuchsianSurface::element(const Word& w) const {
  MobiusTransform m = MobiusTransform::identity();
  for (auto l : w.letters()) m = m * generator(a_, b_, l);
  return m;
}

FuchsianSurface FuchsianSurface::from_generators(const MobiusTransform& a, const MobiusTransform& b,
                                                 const SurfaceOptions& opts) {
  const auto comm = a * b * a.inverse() * b.inverse();
  if (std::abs(comm.trace() + 2.0) > 1e-8) {
    throw Error(ErrorCode::ValidationError,
                "commutator trace " + std::to_string(comm.trace()) + " != -2; not a once-punctured torus group");
  }
  // Cusp: fixed point of the parabolic A^-1 B^-1 A B.
  const auto p = a.inverse() * b.inverse() * a * b;
  FuchsianSurface s;
  if (std::abs(p.c()) < 1e-13) {
    s.a_ = a;
    s.b_ = b;
  } else {
    const double v = (p.a() - p.d()) / (2.0 * p.c());
    const auto m = MobiusTransform::unchecked(0.0, -1.0, 1.0, -v);
    s.a_ = conjugate(a, m);
    s.b_ = conjugate(b, m);
  }
  s.build(opts);
  return s;
}

FuchsianSurface FuchsianSurface::modular(const SurfaceOptions& opts) {
  return from_generators(MobiusTransform(1, 1, 1, 2), MobiusTransform(1, -1, -1, 2), opts);
}

void FuchsianSurface::build(const SurfaceOptions& opts) {
  const int len = std::max(opts.max_word_len, 6);
  table_ = opts.cache_path ? GroupTable::cached(*opts.cache_path, a_, b_, len, opts.element_budget)
                           : GroupTable::enumerate(a_, b_, len, opts.element_budget);

  const auto p = a_.inverse() * b_.inverse() * a_ * b_;
  cusp_width_ = std::abs(p.b() / p.d());
  const auto shift = MobiusTransform::unchecked(1.0, cusp_width_, 0.0, 1.0);

  const double va = a_.a() / a_.c();
  const double vb = b_.a() / b_.c();
  const auto ab = a_ * b_;
  const double vab = ab.a() / ab.c();
  if (!((va < vab && vab < vb) || (vb < vab && vab < va))) {
    throw Error(ErrorCode::ValidationError, "generator pair does not bound an ideal quadrilateral");
  }
  vertices_ = {std::min(va, vb), vab, std::max(va, vb)};
  strip_left_ = vertices_[0];

  const auto rot = MobiusTransform::unchecked(0.0, 1.0, -1.0, 1.0);
  for (int t = 0; t < 2; ++t) {
    const double lo = vertices_[t], hi = vertices_[t + 1];
    const auto aff = MobiusTransform::normalized(hi - lo, lo, 0.0, 1.0);
    auto r = MobiusTransform::identity();
    for (int j = 0; j < 3; ++j) {
      pieces_[3 * t + j] = CuspPiece{aff * r};
      r = r * rot;
    }
  }

  // Ford domain: upper envelope of isometric circles over one period.
  std::vector<MobiusTransform> candidates;
  const auto shift_inv = shift.inverse();
  for (const auto& e : table_.entries()) {
    if (e.length == 0 || e.length > 4) continue;
    auto g = e.element;
    if (std::abs(g.c()) < 1e-12) continue;
    candidates.push_back(g);
    auto gp = g, gm = g;
    for (int k = 1; k <= 2; ++k) {
      gp = gp * shift;
      gm = gm * shift_inv;
      candidates.push_back(gp);
      candidates.push_back(gm);
    }
  }
  constexpr int kSamples = 6000;
  std::vector<char> used(candidates.size(), 0);
  ford_min_height_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double x = strip_left_ + cusp_width_ * i / kSamples;
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const auto& g = candidates[k];
      const double r = 1.0 / std::abs(g.c());
      const double dx = x + g.d() / g.c();
      const double h2 = r * r - dx * dx;
      if (h2 > best) {
        best = h2;
        arg = k;
      }
    }
    used[arg] = 1;
    ford_min_height_ = std::min(ford_min_height_, std::sqrt(best));
  }
  ford_elements_.clear();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (used[k]) ford_elements_.push_back(candidates[k]);
  }

  const cplx rho(0.5, std::sqrt(3.0) / 2.0);
  const cplx c1 = pieces_[0].map.apply(rho);
  const cplx c2 = pieces_[3].map.apply(rho);
  center_ = HPoint(geodesic_midpoint(c1, c2));
  dirichlet_ = dirichlet_domain(*this, center_);
}

FordReduction FuchsianSurface::ford_reduce(cplx z) const {
  auto g = MobiusTransform::identity();
  int steps = 0;
  for (;; ++steps) {
    if (steps > 100000) throw Error(ErrorCode::NonConvergence, "Ford reduction did not terminate");
    const double k = std::floor((z.real() - strip_left_) / cusp_width_);
    if (k != 0.0) {
      z -= k * cusp_width_;
      g = MobiusTransform::unchecked(1.0, -k * cusp_width_, 0.0, 1.0) * g;
    }
    double best = 1.0 - 1e-13;
    const MobiusTransform* pick = nullptr;
    for (const auto& e : ford_elements_) {
      const double den = std::abs(e.c() * z + e.d());
      if (den < best) {
        best = den;
        pick = &e;
      }
    }
    if (pick == nullptr) break;
    const cplx den = pick->c() * z + pick->d();
    const cplx nz = pick->apply(z);
    z = cplx(nz.real(), z.imag() / std::norm(den));
    g = *pick * g;
  }
  return {z, g, steps};
}

double FuchsianSurface::min_center_displacement() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < table_.size(); ++i) {
    best = std::min(best, hyp_distance(center_, mobius_apply(table_[i].element, center_)));
  }
  return best;
}

PointReduction FuchsianSurface::reduce_point(const HPoint& z0, int max_steps) const {
  cplx z = z0.z();
  Word acc;
  const cplx c = center_.z();
  int steps = 0;
  for (;; ++steps) {
    double cur = cosh_distance(z, c);
    const DirichletSide* pick = nullptr;
    for (const auto& side : dirichlet_.sides) {
      const cplx w = side.element.apply(z);
      const double cd = cosh_distance(cplx(w.real(), z.imag() / std::norm(side.element.c() * z + side.element.d())), c);
      if (cd < cur * (1.0 - 1e-13)) {
        cur = cd;
        pick = &side;
      }
    }
    if (pick == nullptr) break;
    if (steps >= max_steps) throw Error(ErrorCode::NonConvergence, "reduce_point exceeded its step cap");
    const double y = z.imag() / std::norm(pick->element.c() * z + pick->element.d());
    z = cplx(pick->element.apply(z).real(), y);
    acc = table_.word(pick->table_index) * acc;
  }
  return {HPoint(z), acc.inverse(), steps};
}

// ---------------------------------------------------------------- Dirichlet domain

namespace {

struct KleinEdge {
  std::array<double, 2> p;  // start vertex
  long tag;                 // table index of the bisector this edge lies on, -1 for the box
};

}  // namespace

DirichletDomain dirichlet_domain(const FuchsianSurface& s, const HPoint& center) {
  const cplx c = center.z();
  auto to_disk = [&](cplx z) { return (z - c) / (z - std::conj(c)); };
  auto from_disk = [&](cplx p) { return (c - p * std::conj(c)) / (1.0 - p); };

  std::vector<KleinEdge> poly{{{-2.0, -2.0}, -1}, {{2.0, -2.0}, -1}, {{2.0, 2.0}, -1}, {{-2.0, 2.0}, -1}};
  const auto& table = s.table();
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& g = table[i].element;
    const cplx gc = g.apply(c);
    const double d = std::acosh(cosh_distance(c, cplx(gc.real(), center.y() / std::norm(g.c() * c + g.d()))));
    if (!(d > 1e-9)) throw Error(ErrorCode::ValidationError, "Dirichlet center is fixed by a group element");
    const cplx q = to_disk(gc);
    const std::array<double, 2> n{q.real() / std::abs(q), q.imag() / std::abs(q)};
    const double off = std::tanh(0.5 * d);
    auto side = [&](const std::array<double, 2>& p) { return p[0] * n[0] + p[1] * n[1] - off; };
    std::vector<KleinEdge> out;
    const std::size_t m = poly.size();
    for (std::size_t k = 0; k < m; ++k) {
      const auto& cur = poly[k];
      const auto& nxt = poly[(k + 1) % m];
      const double sc = side(cur.p), sn = side(nxt.p);
      if (sc <= 0) out.push_back(cur);
      if ((sc < 0) != (sn < 0) && sc != 0 && sn != 0) {
        const double t = sc / (sc - sn);
        const std::array<double, 2> x{cur.p[0] + t * (nxt.p[0] - cur.p[0]), cur.p[1] + t * (nxt.p[1] - cur.p[1])};
        if (sc <= 0) {
          out.push_back({x, static_cast<long>(i)});  // edge from x onward lies on the new bisector
        } else {
          out.push_back({x, cur.tag});
        }
      }
    }
    poly = std::move(out);
  }

  DirichletDomain dom{center, {}};
  const std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    if (poly[k].tag < 0) continue;
    const auto& p0 = poly[k].p;
    const auto& p1 = poly[(k + 1) % m].p;
    if (std::hypot(p1[0] - p0[0], p1[1] - p0[1]) < 1e-6) continue;
    auto convert = [&](const std::array<double, 2>& kp, bool& ideal) {
      const double r2 = kp[0] * kp[0] + kp[1] * kp[1];
      ideal = r2 >= 1.0 - 1e-7;
      cplx pd;
      if (ideal) {
        pd = cplx(kp[0], kp[1]) / std::sqrt(r2);
      } else {
        pd = cplx(kp[0], kp[1]) / (1.0 + std::sqrt(1.0 - r2));
      }
      if (std::abs(1.0 - pd) < 1e-12) return cplx(std::numeric_limits<double>::infinity(), 0.0);
      cplx z = from_disk(pd);
      if (ideal) z = cplx(z.real(), 0.0);
      return z;
    };
    DirichletSide side{static_cast<std::size_t>(poly[k].tag), table[poly[k].tag].element, {}, {}, false, false};
    side.start = convert(p0, side.start_ideal);
    side.end = convert(p1, side.end_ideal);
    dom.sides.push_back(side);
  }
  return dom;
}

// ---------------------------------------------------------------- mesh

QuadratureMesh build_mesh(const FuchsianSurface& s, int target_cells, double y_max, int order, bool graded) {
  if (target_cells < 12) throw Error(ErrorCode::ValidationError, "mesh needs at least 12 cells");
  const int m = std::max(1, static_cast<int>(std::lround(std::sqrt(target_cells / 12.0))));
  QuadratureMesh mesh{{}, y_max, 12 * m * m, order};
  const auto unit = gauss_legendre(order, 0.0, 1.0);
  const double u_lo = 1.0 / y_max;
  for (int piece = 0; piece < 6; ++piece) {
    const auto& map = s.pieces()[piece].map;
    for (int half = 0; half < 2; ++half) {
      for (int px = 0; px < m; ++px) {
        const double x0 = 0.5 * half + 0.5 * px / m;
        const double hx = 0.5 / m;
        for (int ix = 0; ix < order; ++ix) {
          const double x = x0 + hx * unit.nodes[ix];
          const double wx = hx * unit.weights[ix];
          const double h = half == 0 ? std::sqrt(1.0 - x * x) : std::sqrt(1.0 - (1.0 - x) * (1.0 - x));
          const double u_hi = 1.0 / h;
          const double hu = (u_hi - u_lo) / m;
          std::vector<std::pair<double, double>> panels;  // (start, width)
          for (int pu = 0; pu < m; ++pu) panels.emplace_back(u_lo + hu * pu, hu);
          if (graded) {
            // Geometric panels of ratio 4 from u_lo up to the end of the first uniform panel.
            panels.erase(panels.begin());
            std::vector<double> cuts{u_lo + hu};
            while (cuts.back() / 4.0 > u_lo) cuts.push_back(cuts.back() / 4.0);
            cuts.push_back(u_lo);
            for (std::size_t k = cuts.size() - 1; k > 0; --k) panels.emplace_back(cuts[k], cuts[k - 1] - cuts[k]);
          }
          for (const auto& [u0, du] : panels) {
            for (int iu = 0; iu < order; ++iu) {
              const double u = u0 + du * unit.nodes[iu];
              const double w = wx * du * unit.weights[iu];
              const cplx local(x, 1.0 / u);
              const cplx z = map.apply(local);
              const double y = (1.0 / u) / std::norm(map.c() * local + map.d());
              mesh.nodes.push_back({HPoint(z.real(), y), w, piece, 1.0 / u});
            }
          }
        }
      }
    }
  }
  return mesh;
}

// ---------------------------------------------------------------- geodesics

ClosedGeodesic geodesic_representative(const FuchsianSurface& s, const Word& w, int samples) {
  if (w.empty()) throw Error(ErrorCode::IdentityElement, "empty word");
  const auto m = s.element(w);
  const auto cls = classify_and_length(m);
  if (cls.kind != ElementKind::Hyperbolic) {
    throw Error(ErrorCode::NotHyperbolic, "word " + w.str() + " is not hyperbolic (|tr| = " +
                                              std::to_string(std::abs(m.trace())) + ")");
  }
  return ClosedGeodesic{w, m, axis_standardize(m), cls.classical_length, samples};
}

std::vector<MobiusTransform> coset_reps(const FuchsianSurface& s, const ClosedGeodesic& g, double radius) {
  const auto& S = g.axis.standardize;
  const auto Sinv = S.inverse();
  const double L = g.classical_length;
  const cplx c = s.center().z();
  const std::array<MobiusTransform, 4> gens{s.A(), s.B(), s.A().inverse(), s.B().inverse()};
  double slack = 0.0;
  for (const auto& x : gens) slack = std::max(slack, hyp_distance(s.center(), mobius_apply(x, s.center())));
  slack *= 2.0;

  // Normalize h modulo <g0> on the left: standardized image of h(c) into 1 <= |w| < e^L.
  struct Normalized {
    MobiusTransform h;
    cplx w;
    double axis_distance;
  };
  auto normalize = [&](const MobiusTransform& h) {
    const auto sh = Sinv * h;
    const cplx w = sh.apply(c);
    const double k = std::floor(std::log(std::abs(w)) / L);
    const auto shifted = MobiusTransform::dilation(-k * L) * sh;
    const cplx wn = w * std::exp(-k * L);
    // cosh(distance to the imaginary axis) = |w| / Im w.
    const double dist = std::acosh(std::max(1.0, std::abs(wn) / wn.imag()));
    return Normalized{S * shifted, wn, dist};
  };

  constexpr double kCell = 1e-7;
  std::unordered_map<std::int64_t, std::vector<cplx>> seen;
  auto key_of = [&](cplx w, int dx, int dy) {
    const auto kx = static_cast<std::int64_t>(std::floor(std::log(std::abs(w)) / kCell)) + dx;
    const auto ky = static_cast<std::int64_t>(std::floor(std::arg(w) / kCell)) + dy;
    return kx * 1000003ll + ky;
  };
  auto visited_one = [&](cplx w) {
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        auto it = seen.find(key_of(w, dx, dy));
        if (it == seen.end()) continue;
        for (const auto& v : it->second) {
          if (std::abs(std::log(std::abs(v)) - std::log(std::abs(w))) < 1e-9 * (1 + L) &&
              std::abs(std::arg(v) - std::arg(w)) < 1e-9) {
            return true;
          }
        }
      }
    }
    return false;
  };
  // Points near the seam |w| = e^L may be normalized to either side.
  auto visited = [&](cplx w) {
    return visited_one(w) || visited_one(w * std::exp(L)) || visited_one(w * std::exp(-L));
  };

  std::vector<MobiusTransform> reps;
  std::deque<Normalized> queue;
  auto start = normalize(MobiusTransform::identity());
  seen[key_of(start.w, 0, 0)].push_back(start.w);
  queue.push_back(start);
  reps.push_back(start.h);
  while (!queue.empty()) {
    const auto cur = queue.front();
    queue.pop_front();
    if (cur.axis_distance > radius + slack) continue;
    for (const auto& x : gens) {
      auto nxt = normalize(cur.h * x);
      if (visited(nxt.w)) continue;
      seen[key_of(nxt.w, 0, 0)].push_back(nxt.w);
      if (nxt.axis_distance <= radius) reps.push_back(nxt.h);
      queue.push_back(nxt);
    }
  }
  return reps;
}

// ---------------------------------------------------------------- Fenchel-Nielsen

GeneratorPair fn_generators(double length, double twist) {
  if (!(length >= 1e-6)) throw Error(ErrorCode::DegenerateLength, "FN length below 1e-6");
  const double lam = std::exp(0.5 * length);
  const double sh = std::sinh(0.5 * length);
  const double coth = std::cosh(0.5 * length) / sh;
  const double e = std::exp(0.5 * twist);
  const auto a = MobiusTransform::unchecked(lam, 0.0, 0.0, 1.0 / lam);
  // T_{tau/2} B0 T_{tau/2} with B0 = [[coth, csch], [csch, coth]].
  const auto b = MobiusTransform::normalized(coth * e, 1.0 / sh, 1.0 / sh, coth / e);
  return {a, b};
}

FuchsianSurface punctured_torus_from_fn(double length, double twist, const SurfaceOptions& opts) {
  const auto g = fn_generators(length, twist);
  return FuchsianSurface::from_generators(g.a, g.b, opts);
}

FnCoordinates fn_coordinates(const MobiusTransform& a, const MobiusTransform& b) {
  const double x = std::abs(a.trace());
  const double y = std::abs(b.trace());
  const double z = std::abs((a * b).trace());
  if (!(x > 2.0)) throw Error(ErrorCode::NotHyperbolic, "first generator is not hyperbolic");
  const double length = 2.0 * std::acosh(0.5 * x);
  const double lam = std::exp(0.5 * length);
  const double coth = std::cosh(0.5 * length) / std::sinh(0.5 * length);
  const double e = (z - y / lam) / (coth * (lam - 1.0 / lam));
  return {length, 2.0 * std::log(e)};
}

}  // namespace geolen
