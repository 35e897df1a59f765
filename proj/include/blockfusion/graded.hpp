#pragma once

/**
 * @file graded.hpp
 * @brief Group-graded algebras with homogeneous bases, crossed products,
 *        factor sets, graded radical quotients and graded bimodules.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blockfusion/algebra_structure.hpp"
#include "blockfusion/finite_group.hpp"

namespace blockfusion {

/// An algebra graded by a finite group, given on a basis of homogeneous
/// elements: basis vector k has degree degree[k].
struct GradedAlgebra {
  Algebra alg;
  FiniteGroup group;
  std::vector<std::size_t> degree;

  std::vector<std::size_t> component(std::size_t d) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < degree.size(); ++k)
      if (degree[k] == d) out.push_back(k);
    return out;
  }

  std::size_t component_dim(std::size_t d) const { return component(d).size(); }

  std::vector<std::size_t> component_dims() const {
    std::vector<std::size_t> out(group.order(), 0);
    for (auto d : degree) ++out[d];
    return out;
  }

  /// Degree of a nonzero homogeneous element.
  std::optional<std::size_t> degree_of(std::span<const Residue> x) const {
    std::optional<std::size_t> d;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!x[k]) continue;
      if (d && *d != degree[k]) return std::nullopt;
      d = degree[k];
    }
    return d;
  }

  /// The identity component as a unital subalgebra.
  Subalgebra one() const {
    std::vector<Vec> span;
    for (auto k : component(0)) span.push_back(alg.basis(k));
    return make_subalgebra(alg, span, alg.unit());
  }
};

inline void check_grading(const GradedAlgebra& a) {
  if (a.degree.size() != a.alg.dim()) throw Error("grading: degree list has wrong length");
  for (auto d : a.degree)
    if (d >= a.group.order()) throw Error("grading: degree out of range");
  for (std::size_t i = 0; i < a.alg.dim(); ++i)
    for (std::size_t j = 0; j < a.alg.dim(); ++j) {
      const std::size_t d = a.group.mul(a.degree[i], a.degree[j]);
      for (const auto& t : a.alg.product_terms(i, j))
        if (a.degree[t.index] != d) throw Error("grading: product leaves the expected component");
    }
  for (std::size_t k = 0; k < a.alg.dim(); ++k)
    if (a.alg.unit()[k] && a.degree[k] != 0) throw Error("grading: unit is not in degree 1");
}

inline GradedAlgebra make_graded(Algebra alg, FiniteGroup group, std::vector<std::size_t> degree) {
  GradedAlgebra a{std::move(alg), std::move(group), std::move(degree)};
  check_grading(a);
  return a;
}

inline GradedAlgebra trivially_graded(Algebra alg) {
  std::vector<std::size_t> deg(alg.dim(), 0);
  return {std::move(alg), FiniteGroup::trivial(), std::move(deg)};
}

namespace detail {

/// Matrix of y -> x y from component `from` to component deg(x)*from, in the
/// coordinates given by the component index lists.
inline Mat left_mult_between(const GradedAlgebra& a, const Vec& x, std::size_t xdeg, std::size_t from) {
  const auto src = a.component(from);
  const auto dst = a.component(a.group.mul(xdeg, from));
  std::vector<std::size_t> pos(a.alg.dim(), 0);
  for (std::size_t k = 0; k < dst.size(); ++k) pos[dst[k]] = k;
  Mat m(a.alg.field(), dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    const Vec y = a.alg.mul(x, a.alg.basis(src[c]));
    for (auto k : dst) m(pos[k], c) = y[k];
  }
  return m;
}

}  // namespace detail

struct HomogeneousUnit {
  Vec element;
  std::size_t degree = 0;
};

struct UnitSearch {
  SearchStatus status = SearchStatus::Absent;
  std::optional<HomogeneousUnit> unit;
};

/// Inverse of a homogeneous unit (it lives in the inverse degree).
inline std::optional<Vec> homogeneous_inverse(const GradedAlgebra& a, const Vec& x, std::size_t d) {
  const std::size_t dinv = a.group.inv(d);
  const Mat m = detail::left_mult_between(a, x, d, dinv);
  if (m.rows != m.cols || rank(m) != m.rows) return std::nullopt;
  const auto one_idx = a.component(0);
  Mat rhs(a.alg.field(), one_idx.size(), 1);
  for (std::size_t k = 0; k < one_idx.size(); ++k) rhs(k, 0) = a.alg.unit()[one_idx[k]];
  auto sol = solve(m, rhs);
  if (!sol) return std::nullopt;
  Vec y(a.alg.dim(), 0);
  const auto src = a.component(dinv);
  for (std::size_t k = 0; k < src.size(); ++k) y[src[k]] = (*sol)(k, 0);
  return y;
}

inline bool is_homogeneous_unit(const GradedAlgebra& a, const Vec& x, std::size_t d) {
  const auto src = a.component(a.group.inv(d));
  const auto dst = a.component(0);
  if (src.size() != dst.size()) return false;
  const Mat m = detail::left_mult_between(a, x, d, a.group.inv(d));
  return rank(m) == m.rows;
}

inline constexpr std::uint64_t kUnitExhaustiveCap = 1u << 16;

struct SpanSearch {
  SearchStatus status = SearchStatus::Absent;
  std::optional<Vec> element;
};

/// An element of span(basis) satisfying `ok`: basis vectors, then pairs, then
/// seeded random combinations, then every combination when p^dim <= cap.
/// Absent is only reported after the exhaustive pass.
inline SpanSearch search_span(const Field& f, const std::vector<Vec>& basis, const std::function<bool(const Vec&)>& ok,
                              std::uint64_t seed = 1, std::uint64_t cap = kUnitExhaustiveCap) {
  if (basis.empty()) return {};
  const std::size_t n = basis.front().size();
  for (const auto& b : basis)
    if (ok(b)) return {SearchStatus::Found, b};
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      for (Residue c = 1; c < f.p(); ++c) {
        Vec x = basis[i];
        axpy(f, c, basis[j], x);
        if (ok(x)) return {SearchStatus::Found, std::move(x)};
      }
  Rng rng(seed);
  for (int t = 0; t < 64; ++t) {
    Vec x(n, 0);
    for (const auto& b : basis) axpy(f, rng.residue(f), b, x);
    if (ok(x)) return {SearchStatus::Found, std::move(x)};
  }
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < basis.size() && total <= cap; ++k) total *= f.p();
  if (total > cap) return {SearchStatus::Inconclusive, std::nullopt};
  std::vector<Residue> c(basis.size(), 0);
  for (std::uint64_t t = 1; t < total; ++t) {
    std::size_t k = 0;
    while (++c[k] == f.p()) c[k++] = 0;
    Vec x(n, 0);
    for (std::size_t j = 0; j < basis.size(); ++j) axpy(f, c[j], basis[j], x);
    if (ok(x)) return {SearchStatus::Found, std::move(x)};
  }
  return {};
}

/// A unit in component d: the supplied candidates first, then a search over
/// the component.
inline UnitSearch homogeneous_unit(const GradedAlgebra& a, std::size_t d, const std::vector<Vec>& candidates = {},
                                   std::uint64_t seed = 1) {
  if (d == 0) return {SearchStatus::Found, HomogeneousUnit{a.alg.unit(), 0}};
  const auto idx = a.component(d);
  if (idx.size() != a.component_dim(a.group.inv(d)) || idx.size() != a.component_dim(0) || idx.empty())
    return {SearchStatus::Absent, std::nullopt};
  auto ok = [&](const Vec& x) { return is_homogeneous_unit(a, x, d); };
  for (const auto& c : candidates)
    if (a.degree_of(c) == d && ok(c)) return {SearchStatus::Found, HomogeneousUnit{c, d}};
  std::vector<Vec> basis;
  for (auto k : idx) basis.push_back(a.alg.basis(k));
  auto r = search_span(a.alg.field(), basis, ok, seed);
  if (!r.element) return {r.status, std::nullopt};
  return {SearchStatus::Found, HomogeneousUnit{std::move(*r.element), d}};
}

/// Every component holds a unit (searching with the supplied candidates).
inline bool is_crossed_product(const GradedAlgebra& a, const std::vector<Vec>& candidates = {}) {
  for (std::size_t d = 0; d < a.group.order(); ++d)
    if (homogeneous_unit(a, d, candidates).status != SearchStatus::Found) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Crossed products B *_{sigma, c} E

/// Data for a crossed product: sigma[g] is an automorphism of B (columns are
/// images of basis vectors) and cocycle[g * |E| + h] a unit of B, subject to
/// sigma_g sigma_h (x) c(g,h) = c(g,h) sigma_gh(x) and the twisted cocycle law.
struct CrossedProductData {
  Algebra base;
  FiniteGroup group;
  std::vector<Mat> sigma;
  std::vector<Vec> cocycle;
};

inline void check_crossed_product_data(const CrossedProductData& d) {
  const auto& b = d.base;
  const auto& f = b.field();
  const std::size_t n = d.group.order(), m = b.dim();
  if (d.sigma.size() != n || d.cocycle.size() != n * n) throw Error("crossed product: wrong data sizes");
  if (!(d.sigma[0] == Mat::identity(f, m))) throw Error("crossed product: sigma of 1 is not the identity");
  auto sig = [&](std::size_t g, const Vec& x) { return mat_vec(d.sigma[g], x); };
  for (std::size_t g = 0; g < n; ++g) {
    if (rank(d.sigma[g]) != m) throw Error("crossed product: sigma is not bijective");
    if (sig(g, b.unit()) != b.unit()) throw Error("crossed product: sigma is not unital");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (sig(g, b.mul(b.basis(i), b.basis(j))) != b.mul(sig(g, b.basis(i)), sig(g, b.basis(j))))
          throw Error("crossed product: sigma is not multiplicative");
    if (d.cocycle[g] != b.unit() || d.cocycle[g * n] != b.unit()) throw Error("crossed product: cocycle is not normalized");
  }
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      const Vec& c = d.cocycle[g * n + h];
      if (!b.is_unit(c)) throw Error("crossed product: cocycle value is not a unit");
      const std::size_t gh = d.group.mul(g, h);
      for (std::size_t i = 0; i < m; ++i) {
        const Vec x = b.basis(i);
        if (b.mul(sig(g, sig(h, x)), c) != b.mul(c, sig(gh, x)))
          throw Error("crossed product: sigma is not multiplicative up to the cocycle");
      }
      for (std::size_t l = 0; l < n; ++l) {
        const Vec lhs = b.mul(c, d.cocycle[gh * n + l]);
        const Vec rhs = b.mul(sig(g, d.cocycle[h * n + l]), d.cocycle[g * n + d.group.mul(h, l)]);
        if (lhs != rhs) throw Error("crossed product: cocycle identity fails");
      }
    }
}

/// B * E on the basis b_k (x) g, index g * dim B + k, with
/// (a (x) g)(a' (x) h) = a sigma_g(a') c(g,h) (x) gh.
inline GradedAlgebra crossed_product(const CrossedProductData& d) {
  check_crossed_product_data(d);
  const auto& b = d.base;
  const auto& f = b.field();
  const std::size_t n = d.group.order(), m = b.dim(), dim = n * m;
  std::vector<Vec> prods(dim * dim, Vec(dim, 0));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t gh = d.group.mul(g, h);
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) {
          const Vec y = b.mul3(b.basis(k), mat_vec(d.sigma[g], b.basis(l)), d.cocycle[g * n + h]);
          auto& out = prods[(g * m + k) * dim + h * m + l];
          for (std::size_t t = 0; t < m; ++t) out[gh * m + t] = y[t];
        }
    }
  Vec unit(dim, 0);
  for (std::size_t k = 0; k < m; ++k) unit[k] = b.unit()[k];
  std::vector<std::size_t> deg(dim);
  for (std::size_t k = 0; k < dim; ++k) deg[k] = k / m;
  (void)f;
  return make_graded(Algebra(b.field(), dim, prods, unit, false), d.group, std::move(deg));
}

/// The element a (x) g of a crossed product built by crossed_product.
inline Vec crossed_element(const CrossedProductData& d, const Vec& a, std::size_t g) {
  const std::size_t m = d.base.dim();
  Vec x(d.group.order() * m, 0);
  for (std::size_t k = 0; k < m; ++k) x[g * m + k] = a[k];
  return x;
}

// ---------------------------------------------------------------------------
// Factor sets

/// Chosen units u_g (u_1 = 1) of a crossed product with
/// u_g u_h = alpha(g,h) u_gh and sigma_g(x) = u_g x u_g^-1 on the 1-component.
struct FactorSet {
  FiniteGroup group;
  Subalgebra one;
  std::vector<Vec> units;
  std::vector<Vec> inverses;
  std::vector<Vec> alpha;    ///< 1-component coordinates, index g * |E| + h
  std::vector<Mat> action;   ///< 1-component coordinates
};

inline void check_factor_set(const FactorSet& fs) {
  const auto& b = fs.one.alg;
  const std::size_t n = fs.group.order();
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t gh = fs.group.mul(g, h);
      for (std::size_t l = 0; l < n; ++l) {
        const Vec lhs = b.mul(fs.alpha[g * n + h], fs.alpha[gh * n + l]);
        const Vec rhs = b.mul(mat_vec(fs.action[g], fs.alpha[h * n + l]), fs.alpha[g * n + fs.group.mul(h, l)]);
        if (lhs != rhs) throw Error("factor set: cocycle identity fails");
      }
    }
}

/// Factor set of a crossed product. `preferred` may supply units per degree
/// (empty vectors are searched for).
inline FactorSet factor_set(const GradedAlgebra& a, const std::vector<Vec>& preferred = {},
                            const std::vector<Vec>& candidates = {}) {
  const auto& alg = a.alg;
  const std::size_t n = a.group.order();
  FactorSet fs{a.group, a.one(), {}, {}, {}, {}};
  for (std::size_t g = 0; g < n; ++g) {
    Vec u;
    if (g == 0) {
      u = alg.unit();
    } else if (g < preferred.size() && !preferred[g].empty()) {
      u = preferred[g];
      if (!is_homogeneous_unit(a, u, g)) throw Error("factor set: supplied element is not a homogeneous unit");
    } else {
      auto r = homogeneous_unit(a, g, candidates);
      if (!r.unit) throw Error("factor set: no homogeneous unit in some degree");
      u = r.unit->element;
    }
    auto inv = homogeneous_inverse(a, u, g);
    fs.units.push_back(std::move(u));
    fs.inverses.push_back(std::move(*inv));
  }
  const auto& one = fs.one;
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<Vec> cols;
    for (std::size_t k = 0; k < one.alg.dim(); ++k)
      cols.push_back(one.coords(alg.mul3(fs.units[g], one.to_ambient(one.alg.basis(k)), fs.inverses[g])));
    fs.action.push_back(Mat::from_columns(alg.field(), one.alg.dim(), cols));
  }
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h)
      fs.alpha.push_back(one.coords(alg.mul3(fs.units[g], fs.units[h], fs.inverses[a.group.mul(g, h)])));
  check_factor_set(fs);
  return fs;
}

struct FactorSetEquivalence {
  SearchStatus status = SearchStatus::Absent;
  std::optional<Mat> theta;       ///< 1-component iso, coordinates of f1 -> f2
  std::vector<Vec> cochain;       ///< c_g in f2's 1-component
};

inline constexpr std::uint64_t kCochainSearchCap = 10000000;

namespace detail {

inline std::vector<Vec> all_elements(const Algebra& a) {
  std::vector<Vec> out;
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    total *= a.field().p();
    if (total > kExhaustiveCap) throw Error("element enumeration exceeds cap");
  }
  Vec c(a.dim(), 0);
  for (std::uint64_t t = 0; t < total; ++t) {
    out.push_back(c);
    for (std::size_t k = 0; k < a.dim(); ++k) {
      if (++c[k] < a.field().p()) break;
      c[k] = 0;
    }
  }
  return out;
}

/// Algebra isomorphisms between two commutative algebras generated by one
/// element (fields in practice), as matrices.
inline std::optional<std::vector<Mat>> monogenic_isomorphisms(const Algebra& a, const Algebra& b) {
  if (a.dim() != b.dim()) return std::vector<Mat>{};
  const auto& f = a.field();
  const std::size_t d = a.dim();
  std::optional<Vec> z;
  for (const auto& x : all_elements(a))
    if (static_cast<std::size_t>(poly::degree(element_minimal_polynomial(a, x, a.unit()))) == d) {
      z = x;
      break;
    }
  if (!z) return std::nullopt;
  const Poly mz = element_minimal_polynomial(a, *z, a.unit());
  std::vector<Vec> zp{a.unit()};
  for (std::size_t k = 1; k < d; ++k) zp.push_back(a.mul(zp.back(), *z));
  const auto pinv = inverse(Mat::from_columns(f, d, zp));
  std::vector<Mat> out;
  for (const auto& y : all_elements(b)) {
    if (element_minimal_polynomial(b, y, b.unit()) != mz) continue;
    std::vector<Vec> yp{b.unit()};
    for (std::size_t k = 1; k < d; ++k) yp.push_back(b.mul(yp.back(), y));
    Mat theta = Mat::from_columns(f, d, yp) * *pinv;
    bool hom = true;
    for (std::size_t i = 0; i < d && hom; ++i)
      for (std::size_t j = 0; j < d && hom; ++j)
        hom = mat_vec(theta, a.mul(a.basis(i), a.basis(j))) == b.mul(theta.col(i), theta.col(j));
    if (hom) out.push_back(std::move(theta));
  }
  return out;
}

}  // namespace detail

/// Whether two factor sets over commutative 1-components define isomorphic
/// crossed products: an algebra iso theta of the 1-components and a cochain c
/// with theta sigma_g = sigma'_g theta and
/// theta(alpha(g,h)) = c_g sigma'_g(c_h) alpha'(g,h) c_gh^-1.
/// `gmap` identifies f1's grading group with f2's (identity when empty).
inline FactorSetEquivalence factor_sets_equivalent(const FactorSet& f1, const FactorSet& f2,
                                                   std::vector<std::size_t> gmap = {}) {
  const std::size_t n = f1.group.order();
  if (gmap.empty())
    for (std::size_t g = 0; g < n; ++g) gmap.push_back(g);
  if (f2.group.order() != n || !f1.group.is_isomorphism(gmap, f2.group)) throw Error("factor sets: grading groups not identified");
  const Algebra& a = f1.one.alg;
  const Algebra& b = f2.one.alg;
  if (a.dim() != b.dim()) return {SearchStatus::Absent, std::nullopt, {}};
  if (!a.is_commutative() || !b.is_commutative()) return {SearchStatus::Inconclusive, std::nullopt, {}};
  const auto thetas = detail::monogenic_isomorphisms(a, b);
  if (!thetas) return {SearchStatus::Inconclusive, std::nullopt, {}};

  std::vector<Vec> units;
  for (const auto& x : detail::all_elements(b))
    if (b.is_unit(x)) units.push_back(x);
  std::vector<Vec> unit_inv;
  for (const auto& u : units) unit_inv.push_back(*b.inverse(u));

  std::uint64_t nodes = 0;
  bool capped = false;
  for (const auto& theta : *thetas) {
    bool compatible = true;
    for (std::size_t g = 0; g < n && compatible; ++g) compatible = theta * f1.action[g] == f2.action[gmap[g]] * theta;
    if (!compatible) continue;
    std::vector<Vec> ta(n * n);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h) ta[g * n + h] = mat_vec(theta, f1.alpha[g * n + h]);
    std::vector<std::size_t> pick(n, 0);
    std::vector<bool> set(n, false);
    auto c = [&](std::size_t g) -> const Vec& { return units[pick[g]]; };
    auto consistent = [&](std::size_t g, std::size_t h) {
      const std::size_t gh = f1.group.mul(g, h);
      const std::size_t G = gmap[g], Hh = gmap[h];
      Vec rhs = b.mul(b.mul(c(g), mat_vec(f2.action[G], c(h))), f2.alpha[G * n + Hh]);
      rhs = b.mul(rhs, unit_inv[pick[gh]]);
      return rhs == ta[g * n + h];
    };
    std::function<bool(std::size_t)> rec = [&](std::size_t g) -> bool {
      if (g == n) return true;
      for (std::size_t k = 0; k < units.size(); ++k) {
        if (++nodes > kCochainSearchCap) {
          capped = true;
          return false;
        }
        if (g == 0 && units[k] != b.unit()) continue;
        pick[g] = k;
        set[g] = true;
        bool ok = true;
        for (std::size_t x = 0; x < n && ok; ++x)
          for (std::size_t y = 0; y < n && ok; ++y) {
            const std::size_t xy = f1.group.mul(x, y);
            if (!set[x] || !set[y] || !set[xy]) continue;
            if (x != g && y != g && xy != g) continue;
            ok = consistent(x, y);
          }
        if (ok && rec(g + 1)) return true;
        set[g] = false;
        if (capped) return false;
      }
      return false;
    };
    if (rec(0)) {
      std::vector<Vec> cochain;
      for (std::size_t g = 0; g < n; ++g) cochain.push_back(c(g));
      return {SearchStatus::Found, theta, std::move(cochain)};
    }
    if (capped) return {SearchStatus::Inconclusive, std::nullopt, {}};
  }
  return {SearchStatus::Absent, std::nullopt, {}};
}

/// Independent re-check of an equivalence witness.
inline bool check_equivalence_witness(const FactorSet& f1, const FactorSet& f2, const std::vector<std::size_t>& gmap,
                                      const Mat& theta, const std::vector<Vec>& c) {
  const Algebra& a = f1.one.alg;
  const Algebra& b = f2.one.alg;
  const std::size_t n = f1.group.order();
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (mat_vec(theta, a.mul(a.basis(i), a.basis(j))) != b.mul(theta.col(i), theta.col(j))) return false;
  if (rank(theta) != a.dim()) return false;
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t k = 0; k < a.dim(); ++k) {
      const Vec lhs = mat_vec(theta, mat_vec(f1.action[g], a.basis(k)));
      const Vec rhs = b.mul3(c[g], mat_vec(f2.action[gmap[g]], theta.col(k)), *b.inverse(c[g]));
      if (lhs != rhs) return false;
    }
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t gh = f1.group.mul(g, h);
      Vec rhs = b.mul(b.mul(c[g], mat_vec(f2.action[gmap[g]], c[h])), f2.alpha[gmap[g] * n + gmap[h]]);
      rhs = b.mul(rhs, *b.inverse(c[gh]));
      if (rhs != mat_vec(theta, f1.alpha[g * n + h])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Graded radical quotient and diagonal subalgebras

struct GradedQuotient {
  GradedAlgebra graded;
  QuotientAlgebra quotient;
};

/// A / J(A_1) A for a crossed product A, checked to equal A / A J(A_1) and to
/// be a crossed product with semisimple 1-component.
inline GradedQuotient graded_radical_quotient(const GradedAlgebra& a, const MeataxeOptions& opt = {},
                                              const std::vector<Vec>& candidates = {}) {
  if (!is_crossed_product(a, candidates)) throw Error("graded radical quotient: not a crossed product");
  const auto& alg = a.alg;
  const auto one = a.one();
  const auto j1 = radical(one.alg, opt);
  std::vector<Vec> left, right;
  for (const auto& jc : j1.basis()) {
    const Vec j = one.to_ambient(jc);
    for (std::size_t k = 0; k < alg.dim(); ++k) {
      left.push_back(alg.mul(j, alg.basis(k)));
      right.push_back(alg.mul(alg.basis(k), j));
    }
  }
  Subspace ja(alg.field(), alg.dim(), left), aj(alg.field(), alg.dim(), right);
  if (!(ja == aj)) throw Error("graded radical quotient: J(A_1)A differs from AJ(A_1)");
  auto q = quotient_algebra(alg, ja);
  std::vector<std::size_t> deg;
  for (auto k : q.comp) deg.push_back(a.degree[k]);
  GradedAlgebra g = make_graded(q.alg, a.group, std::move(deg));
  std::vector<Vec> projected;
  for (const auto& c : candidates) projected.push_back(q.project(c));
  if (!is_crossed_product(g, projected)) throw Error("graded radical quotient: quotient is not a crossed product");
  if (radical(g.one().alg, opt).dim() != 0) throw Error("graded radical quotient: 1-component is not semisimple");
  return {std::move(g), std::move(q)};
}

struct DiagonalAlgebra {
  GradedAlgebra graded;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< basis index -> (index in a, index in b)
};

/// The span of A_g (x) A'_g over all g inside A (x) A'.
inline DiagonalAlgebra diagonal_subalgebra(const GradedAlgebra& a, const GradedAlgebra& b) {
  if (a.group.table() != b.group.table())
    throw Error("diagonal subalgebra: grading groups differ");
  const auto& f = a.alg.field();
  DiagonalAlgebra out;
  std::vector<std::size_t> deg;
  std::vector<std::size_t> pos(a.alg.dim() * b.alg.dim(), SIZE_MAX);
  for (std::size_t i = 0; i < a.alg.dim(); ++i)
    for (std::size_t j = 0; j < b.alg.dim(); ++j)
      if (a.degree[i] == b.degree[j]) {
        pos[i * b.alg.dim() + j] = out.pairs.size();
        out.pairs.emplace_back(i, j);
        deg.push_back(a.degree[i]);
      }
  const std::size_t d = out.pairs.size();
  std::vector<Vec> prods(d * d, Vec(d, 0));
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) {
      auto& v = prods[x * d + y];
      for (const auto& s : a.alg.product_terms(out.pairs[x].first, out.pairs[y].first))
        for (const auto& t : b.alg.product_terms(out.pairs[x].second, out.pairs[y].second)) {
          const std::size_t p = pos[s.index * b.alg.dim() + t.index];
          if (p == SIZE_MAX) throw Error("diagonal subalgebra: product leaves the diagonal");
          v[p] = f.add(v[p], f.mul(s.coeff, t.coeff));
        }
    }
  Vec unit(d, 0);
  for (std::size_t x = 0; x < d; ++x)
    unit[x] = f.mul(a.alg.unit()[out.pairs[x].first], b.alg.unit()[out.pairs[x].second]);
  out.graded = make_graded(Algebra(f, d, prods, unit, false), a.group, std::move(deg));
  return out;
}

/// The sum of the components A_g, g in a subgroup K, graded by K. `sub`
/// lists the index in a.group of each element of k. Needs a homogeneous basis.
inline GradedAlgebra restrict_grading(const GradedAlgebra& a, const std::vector<std::size_t>& sub, const FiniteGroup& k) {
  if (sub.size() != k.order()) throw Error("restrict grading: bad subgroup data");
  for (std::size_t x = 0; x < k.order(); ++x)
    for (std::size_t y = 0; y < k.order(); ++y)
      if (a.group.mul(sub[x], sub[y]) != sub[k.mul(x, y)]) throw Error("restrict grading: not a subgroup embedding");
  std::vector<std::size_t> back(a.group.order(), SIZE_MAX);
  for (std::size_t x = 0; x < sub.size(); ++x) back[sub[x]] = x;
  std::vector<Vec> span;
  std::vector<std::size_t> deg;
  for (std::size_t j = 0; j < a.alg.dim(); ++j)
    if (back[a.degree[j]] != SIZE_MAX) {
      span.push_back(a.alg.basis(j));
      deg.push_back(back[a.degree[j]]);
    }
  // unit vectors in increasing order are already reduced, so coordinates follow `span`
  auto s = make_subalgebra(a.alg, span, a.alg.unit());
  return make_graded(std::move(s.alg), k, std::move(deg));
}

// ---------------------------------------------------------------------------
// Graded isomorphism search (small algebras)

struct GradedIsoResult {
  SearchStatus status = SearchStatus::Absent;
  std::optional<Mat> map;  ///< a -> b on basis coordinates
};

/// Whether a linear map is a degree-preserving unital algebra isomorphism.
inline bool is_graded_isomorphism(const GradedAlgebra& a, const GradedAlgebra& b, const Mat& m,
                                  const std::vector<std::size_t>& gmap) {
  if (m.rows != b.alg.dim() || m.cols != a.alg.dim() || rank(m) != a.alg.dim()) return false;
  if (mat_vec(m, a.alg.unit()) != b.alg.unit()) return false;
  for (std::size_t k = 0; k < a.alg.dim(); ++k)
    if (b.degree_of(m.col(k)) != gmap[a.degree[k]]) return false;
  for (std::size_t i = 0; i < a.alg.dim(); ++i)
    for (std::size_t j = 0; j < a.alg.dim(); ++j)
      if (mat_vec(m, a.alg.mul(a.alg.basis(i), a.alg.basis(j))) != b.alg.mul(m.col(i), m.col(j))) return false;
  return true;
}

/// Graded isomorphism between two crossed products whose 1-components are
/// commutative, built from an equivalence of their factor sets: u_g maps to
/// c_g u'_g and x u_g to theta(x) c_g u'_g.
inline GradedIsoResult crossed_product_isomorphism(const GradedAlgebra& a, const FactorSet& fa, const GradedAlgebra& b,
                                                   const FactorSet& fb, const std::vector<std::size_t>& gmap) {
  auto eq = factor_sets_equivalent(fa, fb, gmap);
  if (eq.status != SearchStatus::Found) return {eq.status, std::nullopt};
  const auto& f = a.alg.field();
  const std::size_t n = a.group.order();
  const std::size_t d1 = fa.one.alg.dim();
  // basis of a: x_k u_g for x_k a basis of A_1
  std::vector<Vec> src, dst;
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t k = 0; k < d1; ++k) {
      src.push_back(a.alg.mul(fa.one.to_ambient(fa.one.alg.basis(k)), fa.units[g]));
      const Vec img = fb.one.alg.mul(eq.theta->col(k), eq.cochain[g]);
      dst.push_back(b.alg.mul(fb.one.to_ambient(img), fb.units[gmap[g]]));
    }
  const Mat s = Mat::from_columns(f, a.alg.dim(), src);
  const auto sinv = inverse(s);
  if (!sinv) throw Error("crossed product iso: units do not give a basis");
  Mat m = Mat::from_columns(f, b.alg.dim(), dst) * *sinv;
  if (!is_graded_isomorphism(a, b, m, gmap)) throw Error("crossed product iso: witness fails verification");
  return {SearchStatus::Found, std::move(m)};
}

// ---------------------------------------------------------------------------
// Graded bimodules

/// A graded (A, A')-bimodule on a homogeneous basis. left[k] is the action of
/// the k-th basis element of A, right[k] the map m -> m a'_k.
struct GradedBimodule {
  FiniteGroup group;
  std::size_t dim = 0;
  std::vector<Mat> left;
  std::vector<std::size_t> left_degree;
  std::vector<Mat> right;
  std::vector<std::size_t> right_degree;
  std::vector<std::size_t> degree;
  std::vector<std::size_t> left_gens;
  std::vector<std::size_t> right_gens;

  std::vector<std::size_t> component(std::size_t d) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dim; ++k)
      if (degree[k] == d) out.push_back(k);
    return out;
  }
};

/// A_x M_y A'_z inside M_{xyz}, on basis elements.
inline void check_bimodule_grading(const GradedBimodule& m) {
  for (std::size_t a = 0; a < m.left.size(); ++a)
    for (std::size_t c = 0; c < m.dim; ++c) {
      const std::size_t d = m.group.mul(m.left_degree[a], m.degree[c]);
      for (std::size_t r = 0; r < m.dim; ++r)
        if (m.left[a](r, c) && m.degree[r] != d) throw Error("bimodule grading: left action leaves the component");
    }
  for (std::size_t a = 0; a < m.right.size(); ++a)
    for (std::size_t c = 0; c < m.dim; ++c) {
      const std::size_t d = m.group.mul(m.degree[c], m.right_degree[a]);
      for (std::size_t r = 0; r < m.dim; ++r)
        if (m.right[a](r, c) && m.degree[r] != d) throw Error("bimodule grading: right action leaves the component");
    }
}

/// The regular bimodule A over itself.
inline GradedBimodule regular_bimodule(const GradedAlgebra& a) {
  GradedBimodule m{a.group, a.alg.dim(), {}, a.degree, {}, a.degree, a.degree, a.alg.generators(), a.alg.generators()};
  for (std::size_t k = 0; k < a.alg.dim(); ++k) {
    m.left.push_back(a.alg.left_matrix(a.alg.basis(k)));
    m.right.push_back(a.alg.right_matrix(a.alg.basis(k)));
  }
  return m;
}

/// M(y): M(y)_x = M_{xy}, right algebra regraded as A'^y.
inline GradedBimodule shift(const GradedBimodule& m, std::size_t y) {
  GradedBimodule out = m;
  const std::size_t yi = m.group.inv(y);
  for (auto& d : out.degree) d = m.group.mul(d, yi);
  for (auto& d : out.right_degree) d = m.group.mul(m.group.mul(y, d), yi);
  check_bimodule_grading(out);
  return out;
}

/// M_phi with m . a' = m phi(a'); phi is given on basis coordinates of A'
/// (columns are images) and the right grading is pulled back along phi.
inline GradedBimodule twist(const GradedBimodule& m, const Mat& phi) {
  const auto& f = phi.field;
  GradedBimodule out = m;
  for (std::size_t k = 0; k < m.right.size(); ++k) {
    Mat r(f, m.dim, m.dim);
    std::optional<std::size_t> d;
    for (std::size_t j = 0; j < m.right.size(); ++j) {
      if (!phi(j, k)) continue;
      if (d && *d != m.right_degree[j]) throw Error("twist: image of a basis element is not homogeneous");
      d = m.right_degree[j];
      r = r + scale(phi(j, k), m.right[j]);
    }
    if (!d) throw Error("twist: map is not injective");
    out.right[k] = std::move(r);
    out.right_degree[k] = *d;
  }
  check_bimodule_grading(out);
  return out;
}

/// Basis of graded bimodule maps M -> N(s): X(M_d) in N_{ds}, commuting with
/// both actions.
inline std::vector<Mat> graded_hom(const GradedBimodule& m, const GradedBimodule& n, std::size_t s) {
  const auto& f = m.left.empty() ? n.left.front().field : m.left.front().field;
  std::vector<std::pair<std::size_t, std::size_t>> vars;
  std::vector<std::size_t> var_of(n.dim * m.dim, SIZE_MAX);
  for (std::size_t r = 0; r < n.dim; ++r)
    for (std::size_t c = 0; c < m.dim; ++c)
      if (n.degree[r] == m.group.mul(m.degree[c], s)) {
        var_of[r * m.dim + c] = vars.size();
        vars.emplace_back(r, c);
      }
  const std::size_t u = vars.size();
  if (u == 0) return {};
  EchelonBuilder rows(f, u);
  auto add_eqs = [&](const Mat& a, const Mat& b) {
    // X a - b X = 0
    for (std::size_t r = 0; r < n.dim && rows.dim() < u; ++r)
      for (std::size_t c = 0; c < m.dim && rows.dim() < u; ++c) {
        Vec eq(u, 0);
        bool any = false;
        for (std::size_t k = 0; k < m.dim; ++k) {
          const std::size_t v = var_of[r * m.dim + k];
          if (v != SIZE_MAX && a(k, c)) {
            eq[v] = f.add(eq[v], a(k, c));
            any = true;
          }
        }
        for (std::size_t k = 0; k < n.dim; ++k) {
          const std::size_t v = var_of[k * m.dim + c];
          if (v != SIZE_MAX && b(r, k)) {
            eq[v] = f.sub(eq[v], b(r, k));
            any = true;
          }
        }
        if (any) rows.insert(std::move(eq));
      }
  };
  for (auto g : m.left_gens) add_eqs(m.left[g], n.left[g]);
  for (auto g : m.right_gens) add_eqs(m.right[g], n.right[g]);
  Mat sys = rows.dim() ? Mat::from_row_vectors(f, u, rows.rows()) : Mat(f, 0, u);
  const Mat ns = nullspace(sys);
  std::vector<Mat> out;
  for (std::size_t c = 0; c < ns.cols; ++c) {
    Mat x(f, n.dim, m.dim);
    for (std::size_t v = 0; v < u; ++v) x(vars[v].first, vars[v].second) = ns(v, c);
    out.push_back(std::move(x));
  }
  return out;
}

/// gV for a module V over the 1-component: a_1 . v = (u_g^-1 a_1 u_g) v.
inline Module conjugate_module(const GradedAlgebra& a, std::size_t g, const Module& v,
                               const std::vector<Vec>& candidates = {}) {
  auto r = homogeneous_unit(a, g, candidates);
  if (!r.unit) throw Error("conjugate module: no homogeneous unit in that degree");
  const Vec& u = r.unit->element;
  const Vec ui = *homogeneous_inverse(a, u, g);
  const auto one = a.one();
  Module out{v.field, v.dim, {}, v.gens};
  for (std::size_t k = 0; k < one.alg.dim(); ++k)
    out.action.push_back(v.act(one.coords(a.alg.mul3(ui, one.to_ambient(one.alg.basis(k)), u))));
  return out;
}

}  // namespace blockfusion
