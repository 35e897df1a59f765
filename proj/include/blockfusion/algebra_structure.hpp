#pragma once

/**
 * @file algebra_structure.hpp
 * @brief Radical, simple components and primitive idempotents of a
 *        finite-dimensional algebra; idempotent splitting in commutative
 *        algebras and lifting modulo nilpotent ideals.
 */

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "blockfusion/algebra.hpp"
#include "blockfusion/meataxe.hpp"

namespace blockfusion {

/// Kernel of x -> x^(p^m) with p^m >= dim: the nilradical of a commutative algebra.
inline Subspace nilradical_commutative(const Algebra& z) {
  if (!z.is_commutative()) throw Error("nilradical_commutative: algebra is not commutative");
  std::uint64_t q = 1;
  while (q < z.dim()) q *= z.field().p();
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < z.dim(); ++k) cols.push_back(z.pow(z.basis(k), q));
  return Subspace(z.field(), z.dim(), nullspace(Mat::from_columns(z.field(), z.dim(), cols)).columns());
}

/// Stabilised value of f -> f^p, an idempotent congruent to f modulo any
/// nilpotent ideal containing f^2 - f.
inline Vec lift_idempotent(const Algebra& a, Vec f) {
  const std::uint32_t p = a.field().p();
  for (std::size_t step = 0; step <= a.dim() + 1; ++step) {
    Vec g = a.pow(f, p);
    if (g == f) {
      if (!a.is_idempotent(f)) throw Error("lift_idempotent: fixed point is not idempotent");
      return f;
    }
    f = std::move(g);
  }
  throw Error("lift_idempotent: iteration did not stabilise (ideal not nilpotent?)");
}

/// Minimal polynomial of x inside the corner with local unit `one`.
inline Poly element_minimal_polynomial(const Algebra& a, const Vec& x, const Vec& one) {
  const auto& f = a.field();
  EchelonBuilder span(f, a.dim());
  std::vector<Vec> powers{one};
  span.insert(one);
  for (;;) {
    Vec next = a.mul(powers.back(), x);
    if (!span.insert(next)) {
      auto c = solve(Mat::from_columns(f, a.dim(), powers), Mat::from_columns(f, a.dim(), {next}));
      Poly m(powers.size() + 1, 0);
      m.back() = 1;
      for (std::size_t k = 0; k < powers.size(); ++k) m[k] = f.neg((*c)(k, 0));
      return m;
    }
    powers.push_back(std::move(next));
  }
}

/// Primitive idempotents of a commutative semisimple algebra: orthogonal,
/// summing to 1. The Frobenius-fixed space {x : x^p = x} is spanned by them;
/// its basis elements are split along the roots of their minimal polynomials.
inline std::vector<Vec> split_commutative_semisimple(const Algebra& z) {
  if (!z.is_commutative()) throw Error("split_commutative_semisimple: algebra is not commutative");
  const auto& f = z.field();
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < z.dim(); ++k) cols.push_back(vsub(f, z.pow(z.basis(k), f.p()), z.basis(k)));
  const Mat fixed = nullspace(Mat::from_columns(f, z.dim(), cols));
  std::vector<Vec> idems{z.unit()};
  for (std::size_t c = 0; c < fixed.cols && idems.size() < fixed.cols; ++c) {
    const Vec y = fixed.col(c);
    std::vector<Vec> next;
    for (const auto& e : idems) {
      const Vec ye = z.mul(y, e);
      const Poly m = element_minimal_polynomial(z, ye, e);
      std::vector<Residue> roots;
      for (Residue r = 0; r < f.p(); ++r)
        if (poly::eval(f, m, r) == 0) roots.push_back(r);
      if (roots.size() != static_cast<std::size_t>(poly::degree(m)))
        throw Error("split_commutative_semisimple: algebra is not semisimple");
      for (auto c1 : roots) {
        Vec part = e;
        for (auto c2 : roots)
          if (c2 != c1) part = vscale(f, f.inv(f.sub(c1, c2)), z.mul(part, vsub(f, ye, vscale(f, c2, e))));
        next.push_back(std::move(part));
      }
    }
    idems = std::move(next);
  }
  if (idems.size() != fixed.cols) throw Error("split_commutative_semisimple: idempotent count mismatch");
  std::sort(idems.begin(), idems.end());
  return idems;
}

struct SimpleModuleData {
  Module module;
  std::vector<Mat> endo;        ///< basis of End_A(S)
  std::size_t end_degree = 1;   ///< dim End_A(S) over GF(p)
  std::size_t matrix_size = 1;  ///< dim S / end_degree
  std::size_t multiplicity = 0; ///< in the regular module
};

struct SimpleComponentData {
  Vec central_idempotent;  ///< idempotent of A lifting the central idempotent of A/J
  std::size_t component_dim = 0;
  std::size_t end_field_degree = 1;
};

struct IdempotentData {
  Vec element;
  std::size_t component_index = 0;
};

/// Semisimple picture of an algebra: J(A) and one simple module per simple
/// component of A/J, components sorted canonically by their central idempotent
/// in A/J.
struct AlgebraStructure {
  Subspace radical;
  std::vector<SimpleModuleData> simples;
  std::vector<SimpleComponentData> components;
  Mat surjection;  ///< A -> direct sum of End(S_c), rows are vec(rho_c) entries

  std::size_t count() const { return components.size(); }

  /// Image of x in End(S_c).
  Mat rho(std::size_t c, std::span<const Residue> x) const { return simples[c].module.act(x); }
};

namespace detail {

inline bool simples_isomorphic(const Module& a, const Module& b) {
  return a.dim == b.dim && !hom_space(a, b).empty();
}

/// Projections onto the lines of a D-basis of image(t), D = End(S) acting on S.
/// Lines of ker(t) complete the basis; only the image lines are returned.
inline std::vector<Mat> line_projections(const SimpleModuleData& s, const Mat& t) {
  const auto& f = s.module.field;
  const std::size_t n = s.module.dim;
  EchelonBuilder span(f, n);
  std::vector<std::vector<Vec>> lines;
  std::size_t image_lines = 0;
  const Mat comp = Mat::identity(f, n) - t;
  for (const Mat* src : {&t, &comp}) {
    for (std::size_t c = 0; c < n; ++c) {
      Vec v = src->col(c);
      if (span.in_span(v)) continue;
      std::vector<Vec> line;
      for (const auto& d : s.endo) {
        Vec w = mat_vec(d, v);
        span.insert(w);
        line.push_back(std::move(w));
      }
      lines.push_back(std::move(line));
    }
    if (src == &t) image_lines = lines.size();
  }
  std::vector<Vec> cols;
  for (const auto& l : lines)
    for (const auto& v : l) cols.push_back(v);
  const Mat basis = Mat::from_columns(f, n, cols);
  const auto binv = inverse(basis);
  if (!binv) throw Error("line_projections: lines do not form a basis");
  std::vector<Mat> out;
  for (std::size_t j = 0; j < image_lines; ++j) {
    Mat sel(f, n, n);
    for (std::size_t k = j * s.end_degree; k < (j + 1) * s.end_degree; ++k) sel(k, k) = 1;
    out.push_back(basis * sel * *binv);
  }
  return out;
}

}  // namespace detail

inline AlgebraStructure analyze(const Algebra& a, const MeataxeOptions& opt = {}) {
  const auto& f = a.field();
  AlgebraStructure st;
  const auto factors = composition_factors(regular_module(a), opt);
  std::vector<SimpleModuleData> classes;
  for (const auto& m : factors) {
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const SimpleModuleData& s) { return detail::simples_isomorphic(s.module, m); });
    if (it != classes.end()) {
      ++it->multiplicity;
      continue;
    }
    SimpleModuleData s{m, hom_space(m, m), 0, 0, 1};
    s.end_degree = s.endo.size();
    s.matrix_size = m.dim / s.end_degree;
    classes.push_back(std::move(s));
  }

  std::vector<Vec> rows;
  for (const auto& s : classes)
    for (std::size_t r = 0; r < s.module.dim * s.module.dim; ++r) {
      Vec row(a.dim());
      for (std::size_t i = 0; i < a.dim(); ++i) row[i] = s.module.action[i].data[r];
      rows.push_back(std::move(row));
    }
  const Mat phi = Mat::from_row_vectors(f, a.dim(), rows);
  st.radical = Subspace(f, a.dim(), nullspace(phi).columns());

  // central idempotents of A/J from its centre
  const auto q = quotient_algebra(a, st.radical);
  const auto zq = make_subalgebra(q.alg, centre(q.alg).basis(), q.alg.unit());
  std::vector<Vec> central;
  for (const auto& e : split_commutative_semisimple(zq.alg)) central.push_back(zq.to_ambient(e));
  std::sort(central.begin(), central.end());
  if (central.size() != classes.size()) throw Error("analyze: centre of A/J disagrees with simple module count");

  for (const auto& ebar : central) {
    const Vec e = lift_idempotent(a, q.lift(ebar));
    std::optional<std::size_t> match;
    for (std::size_t c = 0; c < classes.size(); ++c)
      if (!classes[c].module.act(e).is_zero()) {
        if (match) throw Error("analyze: central idempotent meets two simple modules");
        match = c;
      }
    if (!match) throw Error("analyze: central idempotent meets no simple module");
    const auto& s = classes[*match];
    st.components.push_back({e, s.matrix_size * s.matrix_size * s.end_degree, s.end_degree});
    st.simples.push_back(s);
  }

  rows.clear();
  for (const auto& s : st.simples)
    for (std::size_t r = 0; r < s.module.dim * s.module.dim; ++r) {
      Vec row(a.dim());
      for (std::size_t i = 0; i < a.dim(); ++i) row[i] = s.module.action[i].data[r];
      rows.push_back(std::move(row));
    }
  st.surjection = Mat::from_row_vectors(f, a.dim(), rows);
  return st;
}

inline Subspace radical(const Algebra& a, const MeataxeOptions& opt = {}) { return analyze(a, opt).radical; }

inline std::vector<SimpleComponentData> simple_components(const Algebra& a, const MeataxeOptions& opt = {}) {
  return analyze(a, opt).components;
}

namespace detail {

/// Some x in A whose image in End(S_c) is `target` and which acts as zero on
/// every other simple module.
inline Vec preimage(const Algebra& a, const AlgebraStructure& st, std::size_t c, const Mat& target) {
  const auto& f = a.field();
  Mat rhs(f, st.surjection.rows, 1);
  std::size_t off = 0;
  for (std::size_t k = 0; k < st.simples.size(); ++k) {
    const std::size_t sz = st.simples[k].module.dim * st.simples[k].module.dim;
    if (k == c)
      for (std::size_t r = 0; r < sz; ++r) rhs(off + r, 0) = target.data[r];
    off += sz;
  }
  auto x = solve(st.surjection, rhs);
  if (!x) throw Error("preimage: target is not in the image of the algebra");
  return x->col(0);
}

}  // namespace detail

/// Split an idempotent e into orthogonal primitive idempotents summing to e.
/// Lines of each component are lifted one at a time inside the shrinking corner.
inline std::vector<IdempotentData> decompose_idempotent(const Algebra& a, const AlgebraStructure& st, const Vec& e) {
  const auto& f = a.field();
  std::vector<std::pair<std::size_t, Vec>> targets;
  for (std::size_t c = 0; c < st.count(); ++c)
    for (const auto& pi : detail::line_projections(st.simples[c], st.rho(c, e)))
      targets.emplace_back(c, detail::preimage(a, st, c, pi));
  std::vector<IdempotentData> out;
  Vec rest = e;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    Vec piece;
    if (k + 1 == targets.size()) {
      piece = rest;
    } else {
      piece = lift_idempotent(a, a.mul3(rest, targets[k].second, rest));
    }
    rest = vsub(f, rest, piece);
    out.push_back({std::move(piece), targets[k].first});
  }
  if (!is_zero(rest)) throw Error("decompose_idempotent: pieces do not sum to e");
  return out;
}

/// A primitive idempotent of A lying in component c.
inline IdempotentData primitive_idempotent_in(const Algebra& a, const AlgebraStructure& st, std::size_t c) {
  const auto lines = detail::line_projections(st.simples[c], Mat::identity(a.field(), st.simples[c].module.dim));
  return {lift_idempotent(a, detail::preimage(a, st, c, lines.front())), c};
}

/// Component of a primitive idempotent, or nothing when e is not primitive.
inline std::optional<std::size_t> component_of(const AlgebraStructure& st, std::span<const Residue> e) {
  std::optional<std::size_t> found;
  for (std::size_t c = 0; c < st.count(); ++c) {
    const std::size_t r = rank(st.rho(c, e));
    if (r == 0) continue;
    if (found || r != st.simples[c].end_degree) return std::nullopt;
    found = c;
  }
  return found;
}

/// Whether primitive idempotents e and f are conjugate in A.
inline bool same_point(const AlgebraStructure& st, std::span<const Residue> e, std::span<const Residue> f) {
  auto ce = component_of(st, e), cf = component_of(st, f);
  if (!ce || !cf) throw Error("same_point: idempotent is not primitive");
  return *ce == *cf;
}

/// Nilpotency index of a subspace N of A (smallest k with N^k = 0), or
/// nothing when N is not nilpotent.
inline std::optional<std::size_t> nilpotency_index(const Algebra& a, const Subspace& n) {
  Subspace pw = n;
  for (std::size_t k = 1; k <= a.dim() + 1; ++k) {
    if (pw.dim() == 0) return k;
    pw = product_space(a, pw, n);
  }
  return std::nullopt;
}

}  // namespace blockfusion
