#pragma once

/**
 * @file clifford.hpp
 * @brief Clifford extensions of a pointed group on a block extension: the
 *        crossed-product corners E and F, the comparison map between them,
 *        residual and local versions, embeddings and tensor products.
 */

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "blockfusion/fusion.hpp"

namespace blockfusion {

// ---------------------------------------------------------------------------
// Crossed products over subalgebras and quotients

/// E acting on a unital subalgebra D of `amb` by conjugation with t_x, with
/// cocycle t_x t_y t_xy^-1 cut down by the unit of D.
inline CrossedProductData transport_data(const Algebra& amb, const Subalgebra& d, const FiniteGroup& e,
                                         const std::vector<Vec>& t, const std::vector<Vec>& t_inv) {
  const std::size_t n = e.order();
  const auto& f = amb.field();
  CrossedProductData out{d.alg, e, {}, {}};
  const Vec one = d.to_ambient(d.alg.unit());
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<Vec> cols;
    for (std::size_t k = 0; k < d.alg.dim(); ++k) {
      auto y = d.from_ambient(amb.mul3(t[x], d.to_ambient(d.alg.basis(k)), t_inv[x]));
      if (!y) throw Error("transport: conjugation does not preserve the base algebra");
      cols.push_back(std::move(*y));
    }
    out.sigma.push_back(Mat::from_columns(f, d.alg.dim(), cols));
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      auto c = d.from_ambient(amb.mul(amb.mul3(t[x], t[y], t_inv[e.mul(x, y)]), one));
      if (!c) throw Error("transport: cocycle value outside the base algebra");
      out.cocycle.push_back(std::move(*c));
    }
  return out;
}

inline Mat projection_matrix(const QuotientAlgebra& q) {
  const std::size_t n = q.ideal.ambient_dim();
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < n; ++k) cols.push_back(q.project(unit_vec(n, k)));
  return Mat::from_columns(q.alg.field(), q.alg.dim(), cols);
}

/// The same crossed product pushed onto D / I for a sigma-stable ideal I.
inline CrossedProductData descend(const CrossedProductData& d, const QuotientAlgebra& q) {
  const auto& f = d.base.field();
  for (const auto& s : d.sigma)
    for (const auto& v : q.ideal.basis())
      if (!q.ideal.contains(mat_vec(s, v))) throw Error("descend: ideal is not stable");
  CrossedProductData out{q.alg, d.group, {}, {}};
  for (const auto& s : d.sigma) {
    std::vector<Vec> cols;
    for (std::size_t k = 0; k < q.alg.dim(); ++k) cols.push_back(q.project(mat_vec(s, q.lift(q.alg.basis(k)))));
    out.sigma.push_back(Mat::from_columns(f, q.alg.dim(), cols));
  }
  for (const auto& c : d.cocycle) out.cocycle.push_back(q.project(c));
  return out;
}

/// j (D * E) j for an idempotent j of D, graded by E.
struct CrossedCorner {
  CrossedProductData data;
  GradedAlgebra ambient;
  Subalgebra corner;    ///< inside ambient.alg
  GradedAlgebra graded; ///< on corner's basis
  Vec j;                ///< D coordinates
};

inline CrossedCorner crossed_corner(CrossedProductData d, const Vec& j) {
  CrossedCorner c;
  c.ambient = crossed_product(d);
  c.corner = corner(c.ambient.alg, crossed_element(d, j, 0));
  std::vector<std::size_t> deg;
  for (auto piv : c.corner.span.pivots()) deg.push_back(c.ambient.degree[piv]);
  c.graded = make_graded(c.corner.alg, d.group, std::move(deg));
  c.data = std::move(d);
  c.j = j;
  return c;
}

/// The linear map y (x) x -> beta(y) r_x (x) x between two crossed corners
/// over the same group, on corner coordinates.
inline Mat crossed_map(const CrossedCorner& a, const CrossedCorner& b, const Mat& beta, const std::vector<Vec>& r = {}) {
  const std::size_t n = a.data.group.order();
  const std::size_t ma = a.data.base.dim(), mb = b.data.base.dim();
  const auto& f = a.data.base.field();
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < a.corner.alg.dim(); ++k) {
    const Vec v = a.corner.to_ambient(a.corner.alg.basis(k));
    Vec out(n * mb, 0);
    for (std::size_t x = 0; x < n; ++x) {
      Vec y(v.begin() + static_cast<std::ptrdiff_t>(x * ma), v.begin() + static_cast<std::ptrdiff_t>((x + 1) * ma));
      if (is_zero(y)) continue;
      Vec z = mat_vec(beta, y);
      if (!r.empty()) z = b.data.base.mul(z, r[x]);
      for (std::size_t t = 0; t < mb; ++t) out[x * mb + t] = z[t];
    }
    auto c = b.corner.from_ambient(out);
    if (!c) throw Error("crossed map: image leaves the target corner");
    cols.push_back(std::move(*c));
  }
  return Mat::from_columns(f, b.corner.alg.dim(), cols);
}

// ---------------------------------------------------------------------------
// The E side

/// j (D * E) j with D a subalgebra of kG, E acting through t_x.
struct CliffordE {
  Subalgebra base;           ///< inside kG
  Vec i;                     ///< kG
  std::vector<Vec> t, t_inv; ///< kG, one per element of E
  CrossedCorner cc;
};

inline CliffordE clifford_E(const Algebra& kg, Subalgebra base, const Vec& i, const FiniteGroup& e, std::vector<Vec> t,
                            std::vector<Vec> t_inv) {
  auto data = transport_data(kg, base, e, t, t_inv);
  auto j = base.coords(i);
  auto cc = crossed_corner(std::move(data), j);
  return {std::move(base), i, std::move(t), std::move(t_inv), std::move(cc)};
}

inline std::vector<Vec> group_transport(const BlockExtension& ext, const EFusion& e, const Vec& unit, bool inverse) {
  std::vector<Vec> out;
  for (std::size_t x = 0; x < e.order(); ++x) {
    const Perm g = inverse ? e.rep(x).inverse() : e.rep(x);
    out.push_back(ext.mul(ext.element(g), unit));
  }
  return out;
}

/// End of (B^P * E) (x) B^P i, realised as i (B^P * E) i.
inline CliffordE build_E(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg, const EFusion& e) {
  const auto& bp = ctx.fixed.alg;
  const Vec ic = bp.coords(pg.idempotent);
  for (std::size_t x = 0; x < e.order(); ++x)
    if (!same_point(ctx.structure, ic, bp.coords(ext.conjugate(e.rep(x), pg.idempotent))))
      throw Error("build_E: B^P i is not E-invariant");
  return clifford_E(ext.kg.alg, bp, pg.idempotent, e.q.gbar, group_transport(ext, e, ext.b, false),
                    group_transport(ext, e, ext.b, true));
}

// ---------------------------------------------------------------------------
// The F side

/// The direct sum of the twisted centralizers X_f (f in F) with the
/// multiplication of iAi.
struct CliffordF {
  Corner corner;
  FusionGroup group;
  std::vector<Subspace> comps;      ///< corner coordinates
  std::vector<std::size_t> offset;
  GradedAlgebra graded;

  /// Coordinates of an element of X_f, given in kG.
  Vec coords(std::size_t f, const Vec& x) const {
    auto c = comps[f].coords(corner.coords(x));
    if (!c) throw Error("F: element is not in the component");
    Vec out(graded.alg.dim(), 0);
    std::copy(c->begin(), c->end(), out.begin() + static_cast<std::ptrdiff_t>(offset[f]));
    return out;
  }

  Vec to_kg(std::span<const Residue> v) const {
    Vec y(corner.graded.alg.dim(), 0);
    for (std::size_t f = 0; f < comps.size(); ++f) {
      Vec part(v.begin() + static_cast<std::ptrdiff_t>(offset[f]),
               v.begin() + static_cast<std::ptrdiff_t>(offset[f] + comps[f].dim()));
      y = vadd(corner.graded.alg.field(), y, comps[f].combine(part));
    }
    return corner.to_kg(y);
  }
};

inline CliffordF build_F(const Corner& c, const FusionGroup& fg) {
  const auto& a = c.graded.alg;
  const auto& fld = a.field();
  CliffordF out{c, fg, {}, {}, {}};
  std::size_t dim = 0;
  std::vector<std::size_t> deg;
  for (std::size_t f = 0; f < fg.order(); ++f) {
    out.comps.emplace_back(fld, a.dim(), twisted_centralizer(c, fg.elements[f]));
    out.offset.push_back(dim);
    dim += out.comps.back().dim();
    deg.insert(deg.end(), out.comps.back().dim(), f);
  }
  std::vector<std::vector<Vec>> basis;
  for (const auto& s : out.comps) basis.push_back(s.basis());
  std::vector<Vec> prods(dim * dim, Vec(dim, 0));
  for (std::size_t f = 0; f < fg.order(); ++f)
    for (std::size_t g = 0; g < fg.order(); ++g) {
      const std::size_t fgi = fg.group.mul(f, g);
      for (std::size_t k = 0; k < basis[f].size(); ++k)
        for (std::size_t l = 0; l < basis[g].size(); ++l) {
          auto y = out.comps[fgi].coords(a.mul(basis[f][k], basis[g][l]));
          if (!y) throw Error("build_F: product leaves the component");
          auto& v = prods[(out.offset[f] + k) * dim + out.offset[g] + l];
          std::copy(y->begin(), y->end(), v.begin() + static_cast<std::ptrdiff_t>(out.offset[fgi]));
        }
    }
  auto u = out.comps[0].coords(a.unit());
  if (!u) throw Error("build_F: i is not in the identity component");
  Vec unit(dim, 0);
  std::copy(u->begin(), u->end(), unit.begin());
  out.graded = make_graded(Algebra(fld, dim, prods, unit, false), fg.group, std::move(deg));
  return out;
}

/// y (x) x -> y t_x, from the E side to the F side along gmap (E -> F).
inline Mat psi_matrix(const CliffordE& e, const CliffordF& f, const std::vector<std::size_t>& gmap, const Algebra& kg) {
  const auto& cc = e.cc;
  const std::size_t n = cc.data.group.order(), m = cc.data.base.dim();
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < cc.corner.alg.dim(); ++k) {
    const Vec v = cc.corner.to_ambient(cc.corner.alg.basis(k));
    Vec out(f.graded.alg.dim(), 0);
    for (std::size_t x = 0; x < n; ++x) {
      Vec y(v.begin() + static_cast<std::ptrdiff_t>(x * m), v.begin() + static_cast<std::ptrdiff_t>((x + 1) * m));
      if (is_zero(y)) continue;
      out = vadd(kg.field(), out, f.coords(gmap[x], kg.mul(e.base.to_ambient(y), e.t[x])));
    }
    cols.push_back(std::move(out));
  }
  return Mat::from_columns(kg.field(), f.graded.alg.dim(), cols);
}

// ---------------------------------------------------------------------------
// Residual extensions

/// The graded radical quotient with a factor set.
struct Residual {
  GradedQuotient q;
  FactorSet fs;
};

inline Residual residual(const GradedAlgebra& a, const MeataxeOptions& opt = {}) {
  auto q = graded_radical_quotient(a, opt);
  auto fs = factor_set(q.graded);
  return {std::move(q), std::move(fs)};
}

/// End of (B(P_gamma) * E) (x) V_gamma as j (B(P_gamma) * E) j, with the
/// projection from the unreduced corner.
struct ResidualE {
  QuotientAlgebra base;   ///< D / m_gamma
  CrossedCorner cc;
  Mat projection;         ///< corner of E -> cc.corner
};

inline ResidualE residual_E(const CliffordE& ce, const Subspace& m_gamma) {
  auto q = quotient_algebra(ce.cc.data.base, m_gamma);
  auto data = descend(ce.cc.data, q);
  const Vec j = q.project(ce.cc.j);
  auto cc = crossed_corner(std::move(data), j);
  Mat pi = crossed_map(ce.cc, cc, projection_matrix(q));
  return {std::move(q), std::move(cc), std::move(pi)};
}

/// Right inverse of a surjective matrix.
inline Mat right_inverse(const Mat& m) {
  auto x = solve(m, Mat::identity(m.field, m.rows));
  if (!x) throw Error("right inverse: map is not surjective");
  return *x;
}

/// The map induced on quotients by a linear map lin: A -> B, given a
/// surjection pa: A -> A', and the projection pb: B -> B'. Checks that
/// ker pa lands in ker pb.
inline Mat induced_map(const Mat& lin, const Mat& pa, const Mat& pb) {
  const Mat comp = pb * lin;
  const Mat ker = nullspace(pa);
  if (ker.cols && !(comp * ker).is_zero()) throw Error("induced map: kernel not preserved");
  return comp * right_inverse(pa);
}

// ---------------------------------------------------------------------------
// Local version through the Brauer map

/// The Brauer image of a kG element of B^P, back in kG (coefficients off
/// C_H(P) dropped).
inline Vec brauer_kg(const BlockExtension& ext, const BrauerMap& br, std::span<const Residue> x) {
  Vec y(x.size(), 0);
  for (const auto& c : br.centralizer.elements()) {
    const std::size_t k = ext.kg.group.index(c);
    y[k] = x[k];
  }
  return y;
}

struct LocalResidual {
  Subalgebra base;          ///< k C_H(P) b_gamma inside kG (or a corner of it)
  QuotientAlgebra simple;   ///< base / m*
  CrossedCorner cc;
};

inline LocalResidual local_residual_in(const Algebra& kg, Subalgebra base, const Subspace& m_star, const FiniteGroup& e,
                                       const std::vector<Vec>& t, const std::vector<Vec>& t_inv, const Vec& j_kg) {
  auto data = transport_data(kg, base, e, t, t_inv);
  auto q = quotient_algebra(base.alg, m_star);
  auto dq = descend(data, q);
  const Vec j = q.project(base.coords(j_kg));
  auto cc = crossed_corner(std::move(dq), j);
  return {std::move(base), std::move(q), std::move(cc)};
}

inline Vec kc_to_kg(const BlockExtension& ext, const GroupAlgebra& kc, std::span<const Residue> x) {
  Vec y(ext.kg.group.order(), 0);
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k]) y[ext.kg.group.index(kc.group.element(k))] = x[k];
  return y;
}

/// (B(P) b_gamma / m*) * E acting on V_gamma, with j the image of Br_P(i).
inline LocalResidual local_residual(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg,
                                    const EFusion& e, const LocalBlockData& lb) {
  const auto& kc = ctx.brauer.kc;
  const Vec bg = kc_to_kg(ext, kc, lb.b_gamma.idempotent);
  std::vector<Vec> span;
  for (const auto& v : lb.block_alg.span.basis()) span.push_back(kc_to_kg(ext, kc, v));
  auto base = make_subalgebra(ext.kg.alg, span, bg);
  std::vector<Vec> ms;
  for (const auto& v : lb.m_star.basis()) ms.push_back(base.coords(kc_to_kg(ext, kc, lb.block_alg.to_ambient(v))));
  const Subspace m_star(ext.field, base.alg.dim(), ms);
  const Vec j = ext.mul(brauer_kg(ext, ctx.brauer, pg.idempotent), bg);
  return local_residual_in(ext.kg.alg, std::move(base), m_star, e.q.gbar, group_transport(ext, e, bg, false),
                           group_transport(ext, e, bg, true), j);
}

/// B(P_gamma) -> B(P) b_gamma / m* induced by Br_P, on quotient coordinates.
inline Mat local_comparison(const BlockExtension& ext, const BrauerMap& br, const CliffordE& ce, const ResidualE& re,
                            const LocalResidual& lr) {
  const Vec bg = lr.base.to_ambient(lr.base.alg.unit());
  auto img = [&](const Vec& y) {
    return lr.simple.project(lr.base.coords(ext.mul(brauer_kg(ext, br, ce.base.to_ambient(y)), bg)));
  };
  for (const auto& v : re.base.ideal.basis())
    if (!is_zero(img(v))) throw Error("local comparison: m_gamma does not map into m*");
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < re.base.alg.dim(); ++k) cols.push_back(img(re.base.lift(re.base.alg.basis(k))));
  return Mat::from_columns(ext.field, lr.simple.alg.dim(), cols);
}

// ---------------------------------------------------------------------------
// Everything attached to one pointed group

struct CliffordBundle {
  PointedGroup pg;
  EFusion e;
  Corner corner;
  FusionSearch f;
  NormalizerScan scan;
  ThetaCheck theta;
  CliffordE ce;
  CliffordF cf;
  Mat psi;                   ///< E corner -> F
  ResidualE ebar;            ///< direct residual over B(P_gamma)
  Residual ebar_q;           ///< graded radical quotient of the E corner
  Residual fbar;             ///< graded radical quotient of F
  FactorSet ebar_fs;         ///< factor set of the direct residual
  Mat psibar;                ///< ebar -> fbar
  std::optional<LocalBlockData> lb;
  std::optional<LocalResidual> loc;
  std::optional<FactorSet> loc_fs;
  Mat local_map;             ///< ebar -> loc
};

struct BundleOptions {
  MeataxeOptions meataxe;
  std::uint64_t seed = 1;
  std::uint64_t unit_cap = kUnitExhaustiveCap;
};

/// E, the corner, F both ways and Theta.
inline CliffordBundle fusion_bundle(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg,
                                   const BundleOptions& opt = {}) {
  CliffordBundle b;
  b.pg = pg;
  b.e = fusion_E(ext, ctx, pg);
  b.corner = corner(ext, pg.p, pg.idempotent);
  b.f = fusion_F_direct(ext.setup, b.corner, opt.seed, opt.unit_cap);
  b.scan = fusion_F_normalizer(ext.setup, b.corner, opt.unit_cap);
  b.theta = theta_check(ext, ctx, b.corner, b.e, b.f.group, opt.seed);
  return b;
}

/// The extensions E, F, their residuals and the local residual.
inline void complete_bundle(const BlockExtension& ext, const LocalContext& ctx, CliffordBundle& b,
                            const BundleOptions& opt = {}) {
  if (!b.theta.ok()) throw Error("clifford: E and F do not match under Theta");
  const auto& pg = b.pg;
  b.ce = build_E(ext, ctx, pg, b.e);
  b.cf = build_F(b.corner, b.f.group);
  b.psi = psi_matrix(b.ce, b.cf, b.theta.map, ext.kg.alg);

  const auto m_gamma = annihilator(ctx.structure.simples[pg.point].module);
  b.ebar = residual_E(b.ce, m_gamma);
  b.ebar_q = residual(b.ce.cc.graded, opt.meataxe);
  b.fbar = residual(b.cf.graded, opt.meataxe);
  b.ebar_fs = factor_set(b.ebar.cc.graded);
  b.psibar = induced_map(b.psi, b.ebar.projection, projection_matrix(b.fbar.q.quotient));

  if (pg.local) {
    b.lb = local_block_data(ext, ctx, pg, opt.meataxe);
    b.loc = local_residual(ext, ctx, pg, b.e, *b.lb);
    b.loc_fs = factor_set(b.loc->cc.graded);
    b.local_map = crossed_map(b.ebar.cc, b.loc->cc, local_comparison(ext, ctx.brauer, b.ce, b.ebar, *b.loc));
  }
}

inline CliffordBundle clifford_bundle(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg,
                                      const BundleOptions& opt = {}) {
  auto b = fusion_bundle(ext, ctx, pg, opt);
  complete_bundle(ext, ctx, b, opt);
  return b;
}

/// The checks of one bundle.
struct CliffordChecks {
  bool psi_iso = false;              ///< E corner ~ F along Theta
  bool residual_kernel = false;      ///< ker(E -> ebar) = J(E_1) E
  bool psibar_iso = false;           ///< ebar ~ fbar along Theta
  SearchStatus residual_equiv = SearchStatus::Absent;   ///< factor sets of ebar, fbar
  bool residual_one_is_end = false;  ///< ebar_1 is a field of degree end_degree
  std::optional<bool> local_iso;     ///< ebar ~ loc through Br_P
  std::optional<SearchStatus> local_equiv;
  FactorSetEquivalence residual_witness;
  std::optional<FactorSetEquivalence> local_witness;
};

inline CliffordChecks check_bundle(const LocalContext& ctx, const CliffordBundle& b) {
  CliffordChecks c;
  const auto id = identity_map(b.e.order());
  c.psi_iso = is_graded_isomorphism(b.ce.cc.graded, b.cf.graded, b.psi, b.theta.map);
  const Subspace ker(b.ce.cc.graded.alg.field(), b.ce.cc.graded.alg.dim(), nullspace(b.ebar.projection).columns());
  c.residual_kernel = ker == b.ebar_q.q.quotient.ideal;
  c.psibar_iso = is_graded_isomorphism(b.ebar.cc.graded, b.fbar.q.graded, b.psibar, b.theta.map);
  auto eq = factor_sets_equivalent(b.ebar_fs, b.fbar.fs, b.theta.map);
  c.residual_equiv = eq.status;
  if (eq.status == SearchStatus::Found &&
      !check_equivalence_witness(b.ebar_fs, b.fbar.fs, b.theta.map, *eq.theta, eq.cochain))
    c.residual_equiv = SearchStatus::Absent;
  c.residual_witness = std::move(eq);
  const auto one = b.ebar.cc.graded.one();
  c.residual_one_is_end = one.alg.is_commutative() && radical(one.alg).dim() == 0 &&
                          one.alg.dim() == ctx.structure.simples[b.pg.point].end_degree;
  if (b.loc) {
    c.local_iso = is_graded_isomorphism(b.ebar.cc.graded, b.loc->cc.graded, b.local_map, id);
    auto le = factor_sets_equivalent(b.ebar_fs, *b.loc_fs);
    c.local_equiv = le.status;
    if (le.status == SearchStatus::Found &&
        !check_equivalence_witness(b.ebar_fs, *b.loc_fs, id, *le.theta, le.cochain))
      c.local_equiv = SearchStatus::Absent;
    c.local_witness = std::move(le);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Embeddings A' = e A e

/// The idempotent i plus the other members of gamma in a primitive
/// decomposition of 1 containing i.
inline Vec point_cut(const LocalContext& ctx, const PointedGroup& pg) {
  const auto& bp = ctx.fixed.alg;
  const auto& f = bp.alg.field();
  const Vec ic = bp.coords(pg.idempotent);
  Vec rest = bp.alg.unit();
  axpy(f, f.neg(1), ic, rest);
  Vec e = ic;
  if (!is_zero(rest))
    for (const auto& d : decompose_idempotent(bp.alg, ctx.structure, rest))
      if (d.component_index == pg.point) e = vadd(f, e, d.element);
  return bp.to_ambient(e);
}

struct EmbeddingCheck {
  Vec e;                      ///< kG
  std::vector<Vec> w;         ///< kG, units of B^P with w g e g^-1 = e w and w g i g^-1 = i w
  bool i_primitive = false;   ///< i is primitive in e B^P e
  bool e_match = false;       ///< N_G(P_gamma') = N_G(P_gamma)
  bool f_match = false;       ///< F' = F elementwise
  bool verticals_iso = false; ///< the three vertical maps are graded isomorphisms
  bool left_square = false;   ///< residual F' <- E' against F <- E
  bool right_square = false;  ///< residual E' -> E'(P) against E -> E(P)
  bool unreduced_square = false;

  bool ok() const {
    return i_primitive && e_match && f_match && verticals_iso && left_square && right_square && unreduced_square;
  }
};

/// A unit w of B^P with w (g e g^-1) = e w and w (g i g^-1) = i w.
inline std::optional<Vec> embedding_unit(const BlockExtension& ext, const LocalContext& ctx, const Vec& e, const Vec& i,
                                         const Perm& g, std::uint64_t seed) {
  const auto& bp = ctx.fixed.alg;
  const auto& f = ext.field;
  const Vec ge = ext.conjugate(g, e), gi = ext.conjugate(g, i);
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < bp.alg.dim(); ++k) {
    const Vec b = bp.to_ambient(bp.alg.basis(k));
    Vec l1 = ext.mul(b, ge), l2 = ext.mul(b, gi);
    axpy(f, f.neg(1), ext.mul(e, b), l1);
    axpy(f, f.neg(1), ext.mul(i, b), l2);
    l1.insert(l1.end(), l2.begin(), l2.end());
    cols.push_back(std::move(l1));
  }
  const auto sol = nullspace(Mat::from_columns(f, 2 * ext.kg.alg.dim(), cols)).columns();
  auto r = search_span(f, sol, [&](const Vec& x) { return bp.alg.is_unit(x); }, seed);
  if (r.status == SearchStatus::Inconclusive) throw Error("embedding: unit search inconclusive");
  if (!r.element) return std::nullopt;
  return bp.to_ambient(*r.element);
}

inline EmbeddingCheck embed_truncate(const BlockExtension& ext, const LocalContext& ctx, const CliffordBundle& b,
                                     const Vec& e, const BundleOptions& opt = {}) {
  const auto& bp = ctx.fixed.alg;
  const auto& f = ext.field;
  const auto& pg = b.pg;
  const Vec& i = pg.idempotent;
  const auto ec = bp.from_ambient(e);
  if (!ec || bp.alg.mul(*ec, *ec) != *ec || ext.mul(e, i) != i || ext.mul(i, e) != i)
    throw Error("embedding: e is not an idempotent of B^P with ei = ie = i");
  EmbeddingCheck out;
  out.e = e;

  // B' = e B e, the point of i on B'^P = e B^P e
  const auto base = corner(ext.kg.alg, e);
  std::vector<Vec> bspan;
  for (const auto& v : bp.span.basis()) bspan.push_back(ext.mul3(e, v, e));
  auto base_p = make_subalgebra(ext.kg.alg, bspan, e);
  (void)base;
  const auto st = analyze(base_p.alg, opt.meataxe);
  out.i_primitive = decompose_idempotent(base_p.alg, st, base_p.coords(i)).size() == 1;

  // E' = N_G(P_gamma') / C_H(P)
  std::vector<Perm> n_prime;
  const auto n = normalizer(ext.setup.g, pg.p);
  for (const auto& g : n.elements())
    if (embedding_unit(ext, ctx, e, i, g, opt.seed)) n_prime.push_back(g);
  out.e_match = PermGroup::from_elements(ext.setup.g.degree(), n_prime).same_elements(b.e.n);
  if (!out.e_match) return out;
  std::vector<Vec> t, t_inv;
  for (std::size_t x = 0; x < b.e.order(); ++x) {
    auto w = embedding_unit(ext, ctx, e, i, b.e.rep(x), opt.seed);
    if (x == 0) w = ext.b;
    const Vec winv = bp.to_ambient(*bp.alg.inverse(bp.coords(*w)));
    t.push_back(ext.mul(*w, ext.element(b.e.rep(x))));
    t_inv.push_back(ext.mul(ext.element(b.e.rep(x).inverse()), winv));
    out.w.push_back(std::move(*w));
  }
  const auto ce = clifford_E(ext.kg.alg, base_p, i, b.e.q.gbar, t, t_inv);

  // F' from the corner i (eAe) i
  std::vector<Vec> aspan;
  for (const auto& v : ext.a.span.basis()) aspan.push_back(ext.mul3(e, v, e));
  const auto c2 = corner_in(ext, aspan, pg.p, i);
  const auto f2 = fusion_F_direct(ext.setup, c2, opt.seed, opt.unit_cap);
  out.f_match = f2.group.elements == b.f.group.elements;
  if (!out.f_match) return out;
  const auto cf = build_F(c2, f2.group);
  const Mat psi = psi_matrix(ce, cf, b.theta.map, ext.kg.alg);

  // residuals on the primed side
  const std::size_t gp = *component_of(st, base_p.coords(i));
  const auto ebar = residual_E(ce, annihilator(st.simples[gp].module));
  const auto fbar = residual(cf.graded, opt.meataxe);
  const Mat psibar = induced_map(psi, ebar.projection, projection_matrix(fbar.q.quotient));

  // verticals, primed -> unprimed
  std::vector<Vec> incl_cols, w_base;
  for (std::size_t k = 0; k < base_p.alg.dim(); ++k) incl_cols.push_back(bp.coords(base_p.to_ambient(base_p.alg.basis(k))));
  const Mat incl = Mat::from_columns(f, bp.alg.dim(), incl_cols);
  for (const auto& w : out.w) w_base.push_back(bp.coords(w));
  const Mat v_e = crossed_map(ce.cc, b.ce.cc, incl, w_base);
  std::vector<Vec> vf_cols;
  for (std::size_t k = 0; k < cf.graded.alg.dim(); ++k)
    vf_cols.push_back(b.cf.coords(cf.graded.degree[k], cf.to_kg(cf.graded.alg.basis(k))));
  const Mat v_f = Mat::from_columns(f, b.cf.graded.alg.dim(), vf_cols);
  out.unreduced_square = v_f * psi == b.psi * v_e;

  const Mat pb = projection_matrix(b.ebar.base);
  const Mat incl_bar = pb * incl * right_inverse(projection_matrix(ebar.base));
  for (const auto& v : ebar.base.ideal.basis())
    if (!is_zero(b.ebar.base.project(mat_vec(incl, v))))
      throw Error("embedding: m_gamma' does not map into m_gamma");
  std::vector<Vec> wbar;
  for (const auto& w : w_base) wbar.push_back(b.ebar.base.project(w));
  const Mat vbar_e = crossed_map(ebar.cc, b.ebar.cc, incl_bar, wbar);
  const Mat vbar_f = induced_map(v_f, projection_matrix(fbar.q.quotient), projection_matrix(b.fbar.q.quotient));
  const auto id = identity_map(b.e.order());
  const auto fid = identity_map(b.f.group.order());
  out.left_square = vbar_f * psibar == b.psibar * vbar_e;
  out.verticals_iso = is_graded_isomorphism(ebar.cc.graded, b.ebar.cc.graded, vbar_e, id) &&
                      is_graded_isomorphism(fbar.q.graded, b.fbar.q.graded, vbar_f, fid) &&
                      is_graded_isomorphism(ce.cc.graded, b.ce.cc.graded, v_e, id);

  if (!b.loc) {
    out.right_square = true;
    return out;
  }
  // local side: Br_P(e) cuts k C_H(P) b_gamma
  const auto& loc = *b.loc;
  const Vec bg = loc.base.to_ambient(loc.base.alg.unit());
  const Vec ebr = ext.mul(brauer_kg(ext, ctx.brauer, e), bg);
  std::vector<Vec> lspan, mspan;
  for (const auto& v : loc.base.span.basis()) lspan.push_back(ext.mul3(ebr, v, ebr));
  auto lbase = make_subalgebra(ext.kg.alg, lspan, ebr);
  for (const auto& v : loc.simple.ideal.basis())
    mspan.push_back(lbase.coords(ext.mul3(ebr, loc.base.to_ambient(v), ebr)));
  const Subspace m2(f, lbase.alg.dim(), mspan);
  std::vector<Vec> lt, lt_inv, wloc;
  for (std::size_t x = 0; x < b.e.order(); ++x) {
    const Vec wb = ext.mul(brauer_kg(ext, ctx.brauer, out.w[x]), bg);
    const Vec wib = ext.mul(brauer_kg(ext, ctx.brauer, bp.to_ambient(*bp.alg.inverse(bp.coords(out.w[x])))), bg);
    lt.push_back(ext.mul(wb, ext.element(b.e.rep(x))));
    lt_inv.push_back(ext.mul(ext.element(b.e.rep(x).inverse()), wib));
    wloc.push_back(loc.simple.project(loc.base.coords(wb)));
  }
  const Vec j2 = ext.mul(brauer_kg(ext, ctx.brauer, i), bg);
  const auto loc2 = local_residual_in(ext.kg.alg, lbase, m2, b.e.q.gbar, lt, lt_inv, j2);
  const Mat h2 = crossed_map(ebar.cc, loc2.cc, [&] {
    const Vec bg2 = ebr;
    std::vector<Vec> cols;
    for (std::size_t k = 0; k < ebar.base.alg.dim(); ++k) {
      const Vec y = base_p.to_ambient(ebar.base.lift(ebar.base.alg.basis(k)));
      cols.push_back(loc2.simple.project(loc2.base.coords(ext.mul(brauer_kg(ext, ctx.brauer, y), bg2))));
    }
    return Mat::from_columns(f, loc2.simple.alg.dim(), cols);
  }());
  std::vector<Vec> linc;
  for (std::size_t k = 0; k < loc2.simple.alg.dim(); ++k)
    linc.push_back(loc.simple.project(loc.base.coords(loc2.base.to_ambient(loc2.simple.lift(loc2.simple.alg.basis(k))))));
  const Mat v_loc = crossed_map(loc2.cc, loc.cc, Mat::from_columns(f, loc.simple.alg.dim(), linc), wloc);
  out.right_square = b.local_map * vbar_e == v_loc * h2 &&
                     is_graded_isomorphism(loc2.cc.graded, loc.cc.graded, v_loc, id) &&
                     is_graded_isomorphism(ebar.cc.graded, loc2.cc.graded, h2, id);
  return out;
}

// ---------------------------------------------------------------------------
// Tensor products over a common Gbar

inline constexpr std::size_t kTensorDimCap = 64;

struct TensorCheck {
  std::size_t g_order = 0;      ///< |G''|
  std::size_t a_dim = 0;        ///< dim A''
  std::size_t point = 0;        ///< gamma'' as a point of P on B''
  FusionGroup f2;               ///< F''
  FusionGroup k;                ///< F cap F'
  bool k_in_f2 = false;
  std::size_t diagonal_dim = 0;
  std::size_t residual_dim = 0; ///< dim of the K-part of the residual of F''
  SearchStatus iso = SearchStatus::Absent;

  bool ok() const { return k_in_f2 && iso == SearchStatus::Found; }
};

/// dim A'' = |Gbar| dim B dim B', known before anything is built.
inline std::size_t tensor_algebra_dim(const BlockExtension& e1, const BlockExtension& e2) {
  return e1.setup.gbar.order() * e1.b_alg.alg.dim() * e2.b_alg.alg.dim();
}

namespace detail {

inline Perm pair_perm(const Perm& g, const Perm& h) {
  std::vector<int> img(g.images());
  const int n = static_cast<int>(g.degree());
  for (int x : h.images()) img.push_back(n + x);
  return Perm(std::move(img));
}

}  // namespace detail

/// A'' = the diagonal part of A (x) A' over Gbar, as the block extension of
/// G'' = {(g, g') : gbar = g'bar} over H x H', with P embedded diagonally.
/// Compares the K-parts of the residual F-extensions, K = F cap F'.
inline TensorCheck tensor_diagonal_check(const BlockExtension& e1, const CliffordBundle& b1, const BlockExtension& e2,
                                         const CliffordBundle& b2, const BundleOptions& opt = {}) {
  const auto& q1 = e1.setup;
  const auto& q2 = e2.setup;
  if (q1.gbar.table() != q2.gbar.table()) throw Error("tensor: grading groups differ");
  if (!(e1.field == e2.field)) throw Error("tensor: fields differ");
  if (!b1.pg.local || !b2.pg.local) throw Error("tensor: pointed groups must be local");
  if (tensor_algebra_dim(e1, e2) > kTensorDimCap) throw Error("tensor: A'' exceeds the dimension cap");
  const auto& p1 = b1.pg.p;
  const auto& p2 = b2.pg.p;
  if (p1.generators().size() != p2.generators().size() || p1.order() != p2.order())
    throw Error("tensor: P is not identified");
  std::vector<Perm> pgens;
  for (std::size_t k = 0; k < p1.generators().size(); ++k)
    pgens.push_back(detail::pair_perm(p1.generators()[k], p2.generators()[k]));
  const std::size_t n1 = q1.g.degree(), n2 = q2.g.degree();
  const auto p = PermGroup::enumerate(n1 + n2, pgens);
  if (p.order() != p1.order()) throw Error("tensor: generators of P do not correspond");
  for (std::size_t k = 0; k < p.order(); ++k) {
    const Perm& u = p.element(k);
    if (detail::pair_perm(p1.element(k), p2.element(k)) != u) throw Error("tensor: P enumerations disagree");
    if (q1.coset_of(p1.element(k)) != q2.coset_of(p2.element(k))) throw Error("tensor: omega(P) differs from omega'(P)");
  }

  TensorCheck out;
  const auto& f = e1.field;
  std::vector<Perm> gg, hh;
  for (const auto& g : q1.g.elements())
    for (const auto& g2 : q2.g.elements())
      if (q1.coset_of(g) == q2.coset_of(g2)) gg.push_back(detail::pair_perm(g, g2));
  for (const auto& h : q1.h.elements())
    for (const auto& h2 : q2.h.elements()) hh.push_back(detail::pair_perm(h, h2));
  const auto setup = quotient(PermGroup::from_elements(n1 + n2, gg), PermGroup::from_elements(n1 + n2, hh));
  out.g_order = setup.g.order();
  std::vector<std::size_t> gmap;  // Gbar'' -> Gbar
  for (auto r : setup.reps) {
    const auto& im = setup.g.element(r).images();
    gmap.push_back(q1.coset_of(Perm(std::vector<int>(im.begin(), im.begin() + static_cast<std::ptrdiff_t>(n1)))));
  }
  if (!setup.gbar.is_isomorphism(gmap, q1.gbar)) throw Error("tensor: G''/H'' is not Gbar");

  // b (x) b' and i (x) i'
  auto kh = group_algebra(setup.h, f);
  auto tensor = [&](const Vec& x, const Vec& y, const GroupAlgebra& kx, const GroupAlgebra& ky, const PermGroup& onto) {
    Vec z(onto.order(), 0);
    for (std::size_t a = 0; a < x.size(); ++a)
      for (std::size_t c = 0; c < y.size(); ++c)
        if (x[a] && y[c]) z[onto.index(detail::pair_perm(kx.group.element(a), ky.group.element(c)))] = f.mul(x[a], y[c]);
    return z;
  };
  const Vec bb = tensor(e1.block.idempotent, e2.block.idempotent, e1.kh, e2.kh, setup.h);
  const auto bl = blocks(kh);
  auto it = std::find_if(bl.begin(), bl.end(), [&](const BlockData& x) { return x.idempotent == bb; });
  if (it == bl.end()) throw Error("tensor: b (x) b' is not a block of k(H x H')");
  const auto ext = block_extension(setup, *it, f);
  out.a_dim = ext.a.alg.dim();
  if (out.a_dim > kTensorDimCap) throw Error("tensor: A'' exceeds the dimension cap");

  const auto ctx = local_context(ext, p, opt.meataxe);
  const Vec ii = tensor(b1.pg.idempotent, b2.pg.idempotent, e1.kg, e2.kg, setup.g);
  const auto& bp = ctx.fixed.alg;
  std::optional<std::size_t> point;
  Vec i2;
  for (const auto& d : decompose_idempotent(bp.alg, ctx.structure, bp.coords(ii))) {
    const Vec x = bp.to_ambient(d.element);
    if (is_zero(ctx.brauer.truncate(ext, x))) continue;
    if (point && *point != d.component_index) throw Error("tensor: local summands of i (x) i' lie in different points");
    if (!point) i2 = x;
    point = d.component_index;
  }
  if (!point) throw Error("tensor: i (x) i' has no local summand");
  out.point = *point;

  const auto c2 = corner(ext, p, i2);
  auto fs2 = fusion_F_direct(setup, c2, opt.seed, opt.unit_cap);
  if (fs2.status != SearchStatus::Found) throw Error("tensor: F'' search inconclusive");
  out.f2 = fs2.group;

  // K = F cap F', and its copy inside F''
  std::vector<GbarAutomorphism> kel;
  std::vector<std::size_t> in1, in2, in3;
  for (std::size_t x = 0; x < b1.f.group.order(); ++x)
    if (b2.f.group.find(b1.f.group.elements[x])) kel.push_back(b1.f.group.elements[x]);
  out.k = fusion_group(kel, q1.gbar);
  out.k_in_f2 = true;
  for (const auto& x : out.k.elements) {
    in1.push_back(*b1.f.group.find(x));
    in2.push_back(*b2.f.group.find(x));
    std::optional<std::size_t> y;
    for (std::size_t d = 0; d < gmap.size(); ++d)
      if (gmap[d] == x.gbar) y = out.f2.find({x.phi, d});
    if (!y) out.k_in_f2 = false;
    in3.push_back(y.value_or(0));
  }
  if (!out.k_in_f2) return out;

  const auto ra = restrict_grading(b1.fbar.q.graded, in1, out.k.group);
  const auto rb = restrict_grading(b2.fbar.q.graded, in2, out.k.group);
  const auto diag = diagonal_subalgebra(ra, rb);
  const auto cf = build_F(c2, out.f2);
  const auto r2 = residual(cf.graded, opt.meataxe);
  const auto rc = restrict_grading(r2.q.graded, in3, out.k.group);
  out.diagonal_dim = diag.graded.alg.dim();
  out.residual_dim = rc.alg.dim();
  if (out.diagonal_dim != out.residual_dim) {
    out.iso = SearchStatus::Absent;
    return out;
  }
  out.iso = crossed_product_isomorphism(diag.graded, factor_set(diag.graded), rc, factor_set(rc),
                                        identity_map(out.k.order()))
                .status;
  return out;
}

}  // namespace blockfusion
