#pragma once

/**
 * @file algebra.hpp
 * @brief Finite-dimensional associative unital algebras over GF(p) given by
 *        structure constants, their modules, subalgebras and quotients.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "blockfusion/gfp.hpp"
#include "blockfusion/poly.hpp"

namespace blockfusion {

/// Structure constants kept sparse: the product e_i e_j is a short list of
/// (basis index, coefficient) pairs. Group algebras have one term per product.
class Algebra {
public:
  struct Term {
    std::uint32_t index;
    Residue coeff;
  };

  Algebra() = default;

  /// products[i * dim + j] holds e_i e_j in basis coordinates.
  Algebra(Field f, std::size_t dim, const std::vector<Vec>& products, Vec unit, bool verify = true)
      : field_(std::move(f)), dim_(dim), unit_(std::move(unit)) {
    if (products.size() != dim * dim) throw Error("structure constant table has wrong size");
    if (unit_.size() != dim) throw Error("unit has wrong length");
    offsets_.reserve(dim * dim + 1);
    offsets_.push_back(0);
    for (const auto& v : products) {
      if (v.size() != dim) throw Error("product vector has wrong length");
      for (std::size_t k = 0; k < dim; ++k)
        if (v[k] % field_.p()) terms_.push_back({static_cast<std::uint32_t>(k), v[k] % field_.p()});
      offsets_.push_back(terms_.size());
    }
    if (verify) check_axioms();
    compute_generators();
  }

  /// Sparse constructor for algebras whose products are single basis elements
  /// (group algebras): e_i e_j = e_{table[i*dim+j]}.
  static Algebra from_monomial_table(Field f, std::size_t dim, const std::vector<std::size_t>& table, std::size_t one) {
    Algebra a;
    a.field_ = std::move(f);
    a.dim_ = dim;
    a.unit_ = unit_vec(dim, one);
    a.offsets_.reserve(dim * dim + 1);
    a.offsets_.push_back(0);
    for (std::size_t k = 0; k < dim * dim; ++k) {
      a.terms_.push_back({static_cast<std::uint32_t>(table[k]), 1});
      a.offsets_.push_back(a.terms_.size());
    }
    a.compute_generators();
    return a;
  }

  const Field& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  const Vec& unit() const { return unit_; }
  Vec zero() const { return Vec(dim_, 0); }
  Vec basis(std::size_t k) const { return unit_vec(dim_, k); }

  /// Basis indices generating the algebra (with the unit).
  const std::vector<std::size_t>& generators() const { return gens_; }

  std::span<const Term> product_terms(std::size_t i, std::size_t j) const {
    const std::size_t k = i * dim_ + j;
    return {terms_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }

  Vec mul(std::span<const Residue> x, std::span<const Residue> y) const {
    const auto p = field_.p();
    std::vector<std::uint64_t> acc(dim_, 0);
    std::vector<std::size_t> ys;
    for (std::size_t j = 0; j < dim_; ++j)
      if (y[j]) ys.push_back(j);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!x[i]) continue;
      for (auto j : ys) {
        const std::uint64_t c = static_cast<std::uint64_t>(x[i]) * y[j] % p;
        for (const auto& t : product_terms(i, j)) acc[t.index] += c * t.coeff;
      }
    }
    Vec r(dim_);
    for (std::size_t k = 0; k < dim_; ++k) r[k] = static_cast<Residue>(acc[k] % p);
    return r;
  }

  Vec mul3(const Vec& x, const Vec& y, const Vec& z) const { return mul(mul(x, y), z); }

  Vec pow(Vec x, std::uint64_t e) const {
    Vec r = unit_;
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  /// Matrix of y -> x y (columns indexed by basis).
  Mat left_matrix(std::span<const Residue> x) const {
    Mat m(field_, dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!x[i]) continue;
      for (std::size_t j = 0; j < dim_; ++j)
        for (const auto& t : product_terms(i, j)) m(t.index, j) = field_.add(m(t.index, j), field_.mul(x[i], t.coeff));
    }
    return m;
  }

  /// Matrix of y -> y x.
  Mat right_matrix(std::span<const Residue> x) const {
    Mat m(field_, dim_, dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      if (!x[j]) continue;
      for (std::size_t i = 0; i < dim_; ++i)
        for (const auto& t : product_terms(i, j)) m(t.index, i) = field_.add(m(t.index, i), field_.mul(x[j], t.coeff));
    }
    return m;
  }

  bool is_commutative() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (mul(basis(i), basis(j)) != mul(basis(j), basis(i))) return false;
    return true;
  }

  std::optional<Vec> inverse(const Vec& x) const {
    auto s = solve(left_matrix(x), Mat::from_columns(field_, dim_, {unit_}));
    if (!s) return std::nullopt;
    return s->col(0);
  }

  bool is_unit(const Vec& x) const { return rank(left_matrix(x)) == dim_; }

  bool is_idempotent(const Vec& x) const { return mul(x, x) == x; }

  /// Check associativity on all basis triples and two-sidedness of the unit.
  void check_axioms() const {
    for (std::size_t i = 0; i < dim_; ++i) {
      const Vec ei = basis(i);
      if (mul(unit_, ei) != ei || mul(ei, unit_) != ei) throw Error("unit is not a two-sided identity");
      for (std::size_t j = 0; j < dim_; ++j) {
        const Vec eij = mul(ei, basis(j));
        for (std::size_t k = 0; k < dim_; ++k)
          if (mul(eij, basis(k)) != mul(ei, mul(basis(j), basis(k))))
            throw Error("structure constants are not associative");
      }
    }
  }

private:
  void compute_generators() {
    gens_.clear();
    EchelonBuilder span(field_, dim_);
    std::vector<Vec> found;
    auto close = [&] {
      span = EchelonBuilder(field_, dim_);
      found.clear();
      span.insert(unit_);
      found.push_back(unit_);
      for (std::size_t k = 0; k < found.size(); ++k)
        for (auto g : gens_) {
          Vec y = mul(found[k], basis(g));
          if (span.insert(y)) found.push_back(std::move(y));
        }
    };
    close();
    for (std::size_t i = 0; i < dim_ && span.dim() < dim_; ++i) {
      if (span.in_span(basis(i))) continue;
      gens_.push_back(i);
      close();
    }
  }

  Field field_;
  std::size_t dim_ = 0;
  Vec unit_;
  std::vector<std::size_t> offsets_;
  std::vector<Term> terms_;
  std::vector<std::size_t> gens_;
};

/// A left module: one action matrix per basis element of the algebra, and
/// the indices of those basis elements that generate the algebra.
struct Module {
  Field field;
  std::size_t dim = 0;
  std::vector<Mat> action;
  std::vector<std::size_t> gens;

  Mat act(std::span<const Residue> x) const {
    Mat m(field, dim, dim);
    for (std::size_t i = 0; i < action.size(); ++i)
      if (x[i]) axpy(field, x[i], action[i].data, m.data);
    return m;
  }

  /// Generating actions only: enough for spinning and intertwining.
  std::vector<Mat> generator_actions() const {
    std::vector<Mat> out;
    for (auto g : gens) out.push_back(action[g]);
    return out;
  }
};

/// Kernel of the representation A -> End(M), in A coordinates.
inline Subspace annihilator(const Module& m) {
  const std::size_t n = m.action.size();
  std::vector<Vec> rows;
  for (std::size_t r = 0; r < m.dim * m.dim; ++r) {
    Vec row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = m.action[i].data[r];
    rows.push_back(std::move(row));
  }
  return Subspace(m.field, n, nullspace(Mat::from_row_vectors(m.field, n, rows)).columns());
}

inline Module regular_module(const Algebra& a) {
  Module m{a.field(), a.dim(), {}, a.generators()};
  for (std::size_t i = 0; i < a.dim(); ++i) m.action.push_back(a.left_matrix(a.basis(i)));
  return m;
}

/// Check that the action matrices respect the structure constants.
inline bool is_module(const Algebra& a, const Module& m) {
  if (m.action.size() != a.dim()) return false;
  if (!(m.act(a.unit()) == Mat::identity(m.field, m.dim))) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (!(m.action[i] * m.action[j] == m.act(a.mul(a.basis(i), a.basis(j))))) return false;
  return true;
}

/// Left module obtained by restricting along the subspace S (which must be
/// invariant). Coordinates are those of S's echelon basis.
inline Module restrict_to(const Module& m, const Subspace& s) {
  Module r{m.field, s.dim(), {}, m.gens};
  for (const auto& a : m.action) {
    Mat x(m.field, s.dim(), s.dim());
    for (std::size_t c = 0; c < s.dim(); ++c) {
      auto img = s.coords(mat_vec(a, s.basis_vector(c)));
      if (!img) throw Error("restrict_to: subspace is not invariant");
      for (std::size_t r2 = 0; r2 < s.dim(); ++r2) x(r2, c) = (*img)[r2];
    }
    r.action.push_back(std::move(x));
  }
  return r;
}

/// Non-pivot coordinates of s, a basis of a complement to s.
inline std::vector<std::size_t> complement_coords(const Subspace& s) {
  std::vector<bool> piv(s.ambient_dim(), false);
  for (auto c : s.pivots()) piv[c] = true;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < s.ambient_dim(); ++k)
    if (!piv[k]) out.push_back(k);
  return out;
}

/// Reduce v modulo s and read off its complement coordinates.
inline Vec reduce_mod(const Subspace& s, Vec v, const std::vector<std::size_t>& comp) {
  const auto& f = s.field();
  for (std::size_t k = 0; k < s.dim(); ++k) {
    const Residue c = v[s.pivots()[k]];
    if (c) axpy(f, f.neg(c), s.basis_vector(k), v);
  }
  Vec out(comp.size());
  for (std::size_t k = 0; k < comp.size(); ++k) out[k] = v[comp[k]];
  return out;
}

inline Module quotient_module(const Module& m, const Subspace& s) {
  const auto comp = complement_coords(s);
  Module r{m.field, comp.size(), {}, m.gens};
  for (const auto& a : m.action) {
    Mat x(m.field, comp.size(), comp.size());
    for (std::size_t c = 0; c < comp.size(); ++c) {
      Vec img = reduce_mod(s, a.col(comp[c]), comp);
      for (std::size_t r2 = 0; r2 < comp.size(); ++r2) x(r2, c) = img[r2];
    }
    r.action.push_back(std::move(x));
  }
  return r;
}

/// Transposed actions: a right module turned into a left module of the
/// opposite algebra. Only meaningful for spinning in the meataxe.
inline std::vector<Mat> transposed(const std::vector<Mat>& ms) {
  std::vector<Mat> out;
  for (const auto& m : ms) out.push_back(transpose(m));
  return out;
}

/// Smallest subspace containing `seeds` and invariant under `mats`.
inline Subspace spin(const Field& f, std::size_t n, const std::vector<Vec>& seeds, const std::vector<Mat>& mats) {
  EchelonBuilder b(f, n);
  std::vector<Vec> queue;
  for (const auto& v : seeds)
    if (b.insert(v)) queue.push_back(v);
  for (std::size_t k = 0; k < queue.size() && b.dim() < n; ++k)
    for (const auto& m : mats) {
      Vec w = mat_vec(m, queue[k]);
      if (b.insert(w)) queue.push_back(std::move(w));
    }
  return b.subspace();
}

/// A subalgebra (or corner eAe, whose unit is e) of an ambient algebra, with
/// its own structure constants in the coordinates of an echelon basis.
struct Subalgebra {
  Algebra alg;
  Subspace span;

  Vec to_ambient(std::span<const Residue> c) const { return span.combine(c); }
  std::optional<Vec> from_ambient(std::span<const Residue> x) const { return span.coords(x); }
  Vec coords(std::span<const Residue> x) const {
    auto c = span.coords(x);
    if (!c) throw Error("element is not in the subalgebra");
    return *c;
  }
};

/// Build the subalgebra spanned by `spanning`; `unit` is its identity (1 for a
/// genuine subalgebra, e for a corner). Closure under products is checked.
inline Subalgebra make_subalgebra(const Algebra& amb, const std::vector<Vec>& spanning, const Vec& unit) {
  Subspace s(amb.field(), amb.dim(), spanning);
  const std::size_t d = s.dim();
  const auto basis = s.basis();
  std::vector<Vec> prods;
  prods.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto c = s.coords(amb.mul(basis[i], basis[j]));
      if (!c) throw Error("subspace is not closed under multiplication");
      prods.push_back(std::move(*c));
    }
  auto u = s.coords(unit);
  if (!u) throw Error("subalgebra does not contain its unit");
  return {Algebra(amb.field(), d, prods, *u, false), std::move(s)};
}

/// Corner algebra e A e for an idempotent e.
inline Subalgebra corner(const Algebra& a, const Vec& e) {
  std::vector<Vec> span;
  for (std::size_t k = 0; k < a.dim(); ++k) span.push_back(a.mul(a.mul(e, a.basis(k)), e));
  return make_subalgebra(a, span, e);
}

/// Quotient algebra A / I by a two-sided ideal, in complement coordinates.
struct QuotientAlgebra {
  Algebra alg;
  Subspace ideal;
  std::vector<std::size_t> comp;

  Vec project(const Vec& x) const { return reduce_mod(ideal, x, comp); }
  Vec lift(std::span<const Residue> xbar) const {
    Vec x(ideal.ambient_dim(), 0);
    for (std::size_t k = 0; k < comp.size(); ++k) x[comp[k]] = xbar[k];
    return x;
  }
};

inline QuotientAlgebra quotient_algebra(const Algebra& a, const Subspace& ideal) {
  auto comp = complement_coords(ideal);
  const std::size_t d = comp.size();
  std::vector<Vec> prods;
  prods.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) prods.push_back(reduce_mod(ideal, a.mul(a.basis(comp[i]), a.basis(comp[j])), comp));
  Vec unit = reduce_mod(ideal, a.unit(), comp);
  return {Algebra(a.field(), d, prods, unit, false), ideal, std::move(comp)};
}

/// Two-sided ideal generated by the given elements.
inline Subspace two_sided_ideal(const Algebra& a, const std::vector<Vec>& gens) {
  std::vector<Mat> mats;
  for (auto g : a.generators()) {
    mats.push_back(a.left_matrix(a.basis(g)));
    mats.push_back(a.right_matrix(a.basis(g)));
  }
  return spin(a.field(), a.dim(), gens, mats);
}

/// Centre of an algebra, as a subspace.
inline Subspace centre(const Algebra& a) {
  std::vector<Mat> blocks;
  for (auto g : a.generators()) blocks.push_back(a.left_matrix(a.basis(g)) - a.right_matrix(a.basis(g)));
  if (blocks.empty()) return Subspace(a.field(), a.dim(), {a.unit()});
  Mat ns = nullspace(vstack(blocks));
  return Subspace(a.field(), a.dim(), ns.columns());
}

/// Product of subspaces U V (span of all products).
inline Subspace product_space(const Algebra& a, const Subspace& u, const Subspace& v) {
  std::vector<Vec> span;
  for (const auto& x : u.basis())
    for (const auto& y : v.basis()) span.push_back(a.mul(x, y));
  return Subspace(a.field(), a.dim(), span);
}

// ---------------------------------------------------------------------------
// Standard constructions

/// Full matrix algebra M_n(GF(p)) on the matrix units E_rc (index r*n + c).
inline Algebra matrix_algebra(const Field& f, std::size_t n) {
  const std::size_t d = n * n;
  std::vector<Vec> prods(d * d, Vec(d, 0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      if (a % n == b / n) prods[a * d + b][(a / n) * n + b % n] = 1;
  Vec unit(d, 0);
  for (std::size_t k = 0; k < n; ++k) unit[k * n + k] = 1;
  return Algebra(f, d, prods, unit);
}

/// GF(p)[x]/(m) for monic m, on the basis 1, x, ..., x^(deg m - 1).
inline Algebra polynomial_quotient_algebra(const Field& f, const Poly& m) {
  if (m.empty() || m.back() != 1) throw Error("modulus must be monic");
  const std::size_t d = static_cast<std::size_t>(poly::degree(m));
  std::vector<Vec> prods;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Poly r = poly::mod(f, poly::x_power(a + b), m);
      r.resize(d, 0);
      prods.push_back(r);
    }
  return Algebra(f, d, prods, unit_vec(d, 0));
}

/// A x B with A's basis first.
inline Algebra direct_product(const Algebra& a, const Algebra& b) {
  const std::size_t d = a.dim() + b.dim();
  std::vector<Vec> prods(d * d, Vec(d, 0));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (const auto& t : a.product_terms(i, j)) prods[i * d + j][t.index] = t.coeff;
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      for (const auto& t : b.product_terms(i, j))
        prods[(a.dim() + i) * d + a.dim() + j][a.dim() + t.index] = t.coeff;
  Vec unit = a.unit();
  unit.insert(unit.end(), b.unit().begin(), b.unit().end());
  return Algebra(a.field(), d, prods, unit, false);
}

/// A (x) B on the basis e_i (x) f_j, index i * dim B + j.
inline Algebra tensor_product(const Algebra& a, const Algebra& b) {
  const std::size_t d = a.dim() * b.dim();
  const auto& f = a.field();
  std::vector<Vec> prods(d * d, Vec(d, 0));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      for (std::size_t k = 0; k < a.dim(); ++k)
        for (std::size_t l = 0; l < b.dim(); ++l) {
          auto& out = prods[(i * b.dim() + j) * d + k * b.dim() + l];
          for (const auto& s : a.product_terms(i, k))
            for (const auto& t : b.product_terms(j, l)) {
              auto& x = out[s.index * b.dim() + t.index];
              x = f.add(x, f.mul(s.coeff, t.coeff));
            }
        }
  Vec unit(d, 0);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) unit[i * b.dim() + j] = f.mul(a.unit()[i], b.unit()[j]);
  return Algebra(f, d, prods, unit, false);
}

inline Vec tensor_vec(const Field& f, const Vec& x, const Vec& y) {
  Vec r(x.size() * y.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i])
      for (std::size_t j = 0; j < y.size(); ++j) r[i * y.size() + j] = f.mul(x[i], y[j]);
  return r;
}

inline Algebra opposite(const Algebra& a) {
  std::vector<Vec> prods;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) prods.push_back(a.mul(a.basis(j), a.basis(i)));
  return Algebra(a.field(), a.dim(), prods, a.unit(), false);
}

}  // namespace blockfusion
