#pragma once

/**
 * @file block_theory.hpp
 * @brief Group algebras, blocks, block extensions A = kGb, fixed subalgebras,
 *        the Brauer construction, points and pointed groups.
 */

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "blockfusion/algebra_structure.hpp"
#include "blockfusion/finite_group.hpp"
#include "blockfusion/graded.hpp"
#include "blockfusion/perm_group.hpp"

namespace blockfusion {

/// kG on the group basis, in the element order of the PermGroup.
struct GroupAlgebra {
  PermGroup group;
  Algebra alg;

  Vec element(const Perm& g) const { return unit_vec(group.order(), group.index(g)); }

  /// g x g^-1 for g normalizing the group (g need not lie in it).
  Vec conjugate(const Perm& g, std::span<const Residue> x) const {
    const Perm gi = g.inverse();
    Vec y(group.order(), 0);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k]) y[group.index(g * group.element(k) * gi)] = x[k];
    return y;
  }

  /// Left multiplication by a group element.
  Vec times(const Perm& g, std::span<const Residue> x) const {
    Vec y(group.order(), 0);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k]) y[group.index(g * group.element(k))] = x[k];
    return y;
  }
};

inline GroupAlgebra group_algebra(const PermGroup& g, const Field& f) {
  const std::size_t n = g.order();
  std::vector<std::size_t> table(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = g.index(g.element(a) * g.element(b));
  return {g, Algebra::from_monomial_table(f, n, table, g.index(Perm(g.degree())))};
}

/// Conjugacy classes as lists of element indices, in order of first element.
inline std::vector<std::vector<std::size_t>> conjugacy_classes(const PermGroup& g) {
  std::vector<bool> seen(g.order(), false);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < g.order(); ++k) {
    if (seen[k]) continue;
    std::vector<std::size_t> cls;
    for (const auto& x : g.elements()) {
      const std::size_t j = g.index(x * g.element(k) * x.inverse());
      if (!seen[j]) {
        seen[j] = true;
        cls.push_back(j);
      }
    }
    std::sort(cls.begin(), cls.end());
    out.push_back(std::move(cls));
  }
  return out;
}

inline std::vector<Vec> class_sums(const PermGroup& g) {
  std::vector<Vec> out;
  for (const auto& cls : conjugacy_classes(g)) {
    Vec v(g.order(), 0);
    for (auto k : cls) v[k] = 1;
    out.push_back(std::move(v));
  }
  return out;
}

struct BlockData {
  Vec idempotent;            ///< in kH coordinates
  std::size_t dim = 0;       ///< dim kH e
  bool g_invariant = false;
  std::size_t orbit_size = 1;  ///< number of blocks summed (G-orbit sums)
};

/// Sum of the coefficients: the augmentation kH -> k.
inline Residue augmentation(const Field& f, std::span<const Residue> x) {
  Residue s = 0;
  for (auto c : x) s = f.add(s, c);
  return s;
}

/// Primitive idempotents of Z(kH), sorted.
inline std::vector<BlockData> blocks(const GroupAlgebra& kh) {
  const auto& a = kh.alg;
  const auto z = make_subalgebra(a, class_sums(kh.group), a.unit());
  const auto q = quotient_algebra(z.alg, nilradical_commutative(z.alg));
  std::vector<BlockData> out;
  for (const auto& e : split_commutative_semisimple(q.alg)) {
    const Vec b = z.to_ambient(lift_idempotent(z.alg, q.lift(e)));
    out.push_back({b, rank(a.left_matrix(b)), false, 1});
  }
  std::sort(out.begin(), out.end(), [](const BlockData& x, const BlockData& y) { return x.idempotent < y.idempotent; });
  return out;
}

/// Index of the principal block (the one not killed by the augmentation).
inline std::size_t principal_block(const GroupAlgebra& kh, const std::vector<BlockData>& bl) {
  for (std::size_t k = 0; k < bl.size(); ++k)
    if (augmentation(kh.alg.field(), bl[k].idempotent)) return k;
  throw Error("principal block not found");
}

/// G-orbit sums of the blocks of kH, in order of their first block.
inline std::vector<BlockData> g_invariant_blocks(const QuotientSetup& setup, const GroupAlgebra& kh) {
  const auto bl = blocks(kh);
  const auto& f = kh.alg.field();
  std::vector<std::size_t> orbit(bl.size(), bl.size());
  std::vector<BlockData> out;
  for (std::size_t k = 0; k < bl.size(); ++k) {
    if (orbit[k] != bl.size()) continue;
    const std::size_t id = out.size();
    std::vector<std::size_t> members{k};
    orbit[k] = id;
    for (std::size_t m = 0; m < members.size(); ++m)
      for (const auto& g : setup.g.generators()) {
        const Vec c = kh.conjugate(g, bl[members[m]].idempotent);
        auto it = std::find_if(bl.begin(), bl.end(), [&](const BlockData& b) { return b.idempotent == c; });
        if (it == bl.end()) throw Error("conjugate of a block is not a block");
        const std::size_t j = static_cast<std::size_t>(it - bl.begin());
        if (orbit[j] == bl.size()) {
          orbit[j] = id;
          members.push_back(j);
        }
      }
    BlockData s{Vec(kh.group.order(), 0), 0, true, members.size()};
    for (auto j : members) {
      s.idempotent = vadd(f, s.idempotent, bl[j].idempotent);
      s.dim += bl[j].dim;
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block extensions

/// A = kGb graded by G/H, with B = kHb, everything inside kG.
struct BlockExtension {
  QuotientSetup setup;
  Field field{2};
  GroupAlgebra kg;
  GroupAlgebra kh;
  BlockData block;
  Vec b;                  ///< the block idempotent in kG coordinates
  Subalgebra a;           ///< A inside kG
  GradedAlgebra graded;   ///< A on the same basis, with degrees in G/H
  Subalgebra b_alg;       ///< B inside kG

  Vec embed(std::span<const Residue> x_kh) const {
    Vec y(kg.group.order(), 0);
    for (std::size_t k = 0; k < x_kh.size(); ++k)
      if (x_kh[k]) y[kg.group.index(kh.group.element(k))] = x_kh[k];
    return y;
  }

  Vec element(const Perm& g) const { return kg.element(g); }
  Vec conjugate(const Perm& g, std::span<const Residue> x) const { return kg.conjugate(g, x); }
  Vec mul(std::span<const Residue> x, std::span<const Residue> y) const { return kg.alg.mul(x, y); }
  Vec mul3(const Vec& x, const Vec& y, const Vec& z) const { return kg.alg.mul3(x, y, z); }
};

inline BlockExtension block_extension(const QuotientSetup& setup, const BlockData& blk, const Field& f) {
  auto kh = group_algebra(setup.h, f);
  const auto bl = blocks(kh);
  if (std::none_of(bl.begin(), bl.end(), [&](const BlockData& x) { return x.idempotent == blk.idempotent; }))
    throw Error("block extension: idempotent is not a block of kH");
  for (const auto& g : setup.g.generators())
    if (kh.conjugate(g, blk.idempotent) != blk.idempotent) throw Error("block extension: block is not G-invariant");
  BlockExtension ext{setup, f, group_algebra(setup.g, f), std::move(kh), blk, {}, {}, {}, {}};
  ext.block.g_invariant = true;
  ext.b = ext.embed(blk.idempotent);
  const auto& kg = ext.kg;
  std::vector<Vec> span_a, span_b;
  for (const auto& g : setup.g.elements()) span_a.push_back(kg.times(g, ext.b));
  for (const auto& h : setup.h.elements()) span_b.push_back(kg.times(h, ext.b));
  ext.a = make_subalgebra(kg.alg, span_a, ext.b);
  ext.b_alg = make_subalgebra(kg.alg, span_b, ext.b);
  std::vector<std::size_t> deg;
  for (auto piv : ext.a.span.pivots()) deg.push_back(setup.omega[piv]);
  ext.graded = make_graded(ext.a.alg, setup.gbar, std::move(deg));
  const auto dims = ext.graded.component_dims();
  for (auto d : dims)
    if (d != ext.b_alg.alg.dim()) throw Error("block extension: component dimension differs from dim B");
  return ext;
}

// ---------------------------------------------------------------------------
// Fixed subalgebras, relative traces, the Brauer construction

struct FixedSubalgebra {
  PermGroup p;
  Subalgebra alg;  ///< B^P inside kG, unit b
};

/// B^P spanned by the P-conjugation orbit sums of H, cut by b.
inline FixedSubalgebra fixed_subalgebra(const BlockExtension& ext, const PermGroup& p) {
  if (!p.is_subgroup_of(ext.setup.g)) throw Error("fixed subalgebra: subgroup is not contained in G");
  const auto& h = ext.setup.h;
  std::vector<bool> seen(h.order(), false);
  std::vector<Vec> span;
  for (std::size_t k = 0; k < h.order(); ++k) {
    if (seen[k]) continue;
    Vec s(ext.kg.group.order(), 0);
    for (const auto& u : p.elements()) {
      const Perm y = u * h.element(k) * u.inverse();
      const std::size_t j = h.index(y);
      if (!seen[j]) {
        seen[j] = true;
        s[ext.kg.group.index(y)] = 1;
      }
    }
    span.push_back(ext.mul(s, ext.b));
  }
  return {p, make_subalgebra(ext.kg.alg, span, ext.b)};
}

/// Left coset representatives of Q in P (first element of each coset).
inline std::vector<Perm> coset_reps(const PermGroup& p, const PermGroup& q) {
  std::vector<Perm> reps;
  std::vector<bool> seen(p.order(), false);
  for (std::size_t k = 0; k < p.order(); ++k) {
    if (seen[k]) continue;
    reps.push_back(p.element(k));
    for (const auto& y : q.elements()) seen[p.index(p.element(k) * y)] = true;
  }
  return reps;
}

/// tr^P_Q(x) = sum over u in P/Q of u x u^-1, for x fixed by Q.
inline Vec relative_trace(const BlockExtension& ext, const PermGroup& p, const PermGroup& q, const Vec& x) {
  if (!q.is_subgroup_of(p)) throw Error("relative trace: Q is not a subgroup of P");
  Vec y(x.size(), 0);
  for (const auto& u : coset_reps(p, q)) y = vadd(ext.field, y, ext.conjugate(u, x));
  return y;
}

struct BrauerMap {
  PermGroup p;
  PermGroup centralizer;  ///< C_H(P)
  GroupAlgebra kc;        ///< k C_H(P)
  Vec br_b;               ///< Br_P(b) in kc coordinates
  Subalgebra target;      ///< k C_H(P) Br_P(b) inside kc
  Mat map;                ///< B^P coordinates -> target coordinates

  /// Truncation of a kG element to C_H(P), in kc coordinates.
  Vec truncate(const BlockExtension& ext, std::span<const Residue> x) const {
    Vec y(kc.group.order(), 0);
    for (std::size_t k = 0; k < kc.group.order(); ++k) y[k] = x[ext.kg.group.index(kc.group.element(k))];
    return y;
  }
};

/// Br_P on B^P: keep the coefficients on C_H(P). On P-fixed elements this is
/// the orbit-sum rule (a P-orbit in H is a singleton exactly on C_H(P)).
inline BrauerMap brauer(const BlockExtension& ext, const FixedSubalgebra& fx) {
  const auto& f = ext.field;
  BrauerMap br;
  br.p = fx.p;
  br.centralizer = centralizer(ext.setup.h, fx.p);
  br.kc = group_algebra(br.centralizer, f);
  br.br_b = br.truncate(ext, ext.b);
  std::vector<Vec> span;
  for (std::size_t k = 0; k < br.kc.group.order(); ++k) span.push_back(br.kc.alg.mul(br.kc.alg.basis(k), br.br_b));
  br.target = make_subalgebra(br.kc.alg, span, br.br_b);
  std::vector<Vec> cols;
  for (const auto& x : fx.alg.span.basis()) cols.push_back(br.target.coords(br.truncate(ext, x)));
  br.map = Mat::from_columns(f, br.target.alg.dim(), cols);
  return br;
}

struct BrauerCheck {
  bool unital = false;
  bool multiplicative = false;
  bool kills_traces = false;
  bool surjective = false;
  bool dim_matches = false;
  std::size_t dim_target = 0;
  std::size_t proper_subgroups = 0;

  bool ok() const { return unital && multiplicative && kills_traces && surjective && dim_matches; }
};

/// Exhaustive verification of the Brauer map on B^P.
inline BrauerCheck check_brauer(const BlockExtension& ext, const FixedSubalgebra& fx, const BrauerMap& br) {
  BrauerCheck c;
  const auto& bp = fx.alg.alg;
  const auto& t = br.target.alg;
  c.dim_target = t.dim();
  c.unital = mat_vec(br.map, bp.unit()) == t.unit();
  c.multiplicative = true;
  for (std::size_t i = 0; i < bp.dim() && c.multiplicative; ++i)
    for (std::size_t j = 0; j < bp.dim() && c.multiplicative; ++j)
      c.multiplicative = mat_vec(br.map, bp.mul(bp.basis(i), bp.basis(j))) == t.mul(br.map.col(i), br.map.col(j));
  c.kills_traces = true;
  for (const auto& q : p_subgroups(fx.p, ext.field.p())) {
    if (q.order() == fx.p.order()) continue;
    ++c.proper_subgroups;
    const auto fq = fixed_subalgebra(ext, q);
    for (const auto& x : fq.alg.span.basis()) {
      const Vec tr = relative_trace(ext, fx.p, q, x);
      if (!is_zero(br.truncate(ext, tr))) c.kills_traces = false;
    }
  }
  c.surjective = rank(br.map) == t.dim();
  // direct count: dim of k C_H(P) Br_P(b) as the rank of multiplication by Br_P(b)
  c.dim_matches = rank(br.kc.alg.left_matrix(br.br_b)) == t.dim();
  return c;
}

// ---------------------------------------------------------------------------
// Points and pointed groups

struct PointedGroup {
  PermGroup p;
  std::size_t point = 0;
  Vec idempotent;  ///< representative primitive idempotent of B^P, kG coordinates
  bool local = false;
};

/// Everything attached to one subgroup P: B^P, its structure, Br_P, points.
struct LocalContext {
  FixedSubalgebra fixed;
  AlgebraStructure structure;
  BrauerMap brauer;
  std::vector<PointedGroup> points;
};

inline std::vector<PointedGroup> points(const BlockExtension& ext, const FixedSubalgebra& fx,
                                        const AlgebraStructure& st, const BrauerMap& br) {
  std::vector<PointedGroup> out;
  for (std::size_t c = 0; c < st.count(); ++c) {
    const auto id = primitive_idempotent_in(fx.alg.alg, st, c);
    const Vec i = fx.alg.to_ambient(id.element);
    out.push_back({fx.p, c, i, !is_zero(br.truncate(ext, i))});
  }
  return out;
}

inline LocalContext local_context(const BlockExtension& ext, const PermGroup& p, const MeataxeOptions& opt = {}) {
  auto fx = fixed_subalgebra(ext, p);
  auto st = analyze(fx.alg.alg, opt);
  auto br = brauer(ext, fx);
  auto pts = points(ext, fx, st, br);
  return {std::move(fx), std::move(st), std::move(br), std::move(pts)};
}

/// Point of B^P containing a primitive idempotent given in kG coordinates.
inline std::optional<std::size_t> point_of(const LocalContext& ctx, std::span<const Residue> e) {
  auto c = ctx.fixed.alg.from_ambient(e);
  if (!c) return std::nullopt;
  return component_of(ctx.structure, *c);
}

/// Q_delta <= P_gamma: some primitive summand of i_P in B^Q lies in delta.
inline bool containment(const LocalContext& inner_ctx, std::size_t delta, const PointedGroup& outer) {
  if (!inner_ctx.fixed.p.is_subgroup_of(outer.p)) return false;
  const auto& bq = inner_ctx.fixed.alg;
  const auto pieces = decompose_idempotent(bq.alg, inner_ctx.structure, bq.coords(outer.idempotent));
  return std::any_of(pieces.begin(), pieces.end(), [&](const IdempotentData& d) { return d.component_index == delta; });
}

struct DefectScan {
  std::vector<PermGroup> subgroups;       ///< all p-subgroups of G, sorted by order
  std::vector<LocalContext> contexts;     ///< one per subgroup
  std::vector<std::pair<std::size_t, std::size_t>> local;   ///< (subgroup, point)
  std::vector<std::pair<std::size_t, std::size_t>> maximal; ///< defect pointed groups
};

/// Maximal local pointed groups on B, by an exhaustive scan over the
/// p-subgroups of G.
inline DefectScan defect_pointed_groups(const BlockExtension& ext, const MeataxeOptions& opt = {},
                                        std::size_t cap = kDefaultOrderCap) {
  DefectScan s;
  s.subgroups = p_subgroups(ext.setup.g, ext.field.p(), cap);
  for (const auto& p : s.subgroups) s.contexts.push_back(local_context(ext, p, opt));
  for (std::size_t k = 0; k < s.subgroups.size(); ++k)
    for (const auto& pt : s.contexts[k].points)
      if (pt.local) s.local.emplace_back(k, pt.point);
  for (const auto& [k, c] : s.local) {
    bool maximal = true;
    for (const auto& [k2, c2] : s.local) {
      if (s.subgroups[k2].order() <= s.subgroups[k].order()) continue;
      if (!s.subgroups[k].is_subgroup_of(s.subgroups[k2])) continue;
      if (containment(s.contexts[k], c, s.contexts[k2].points[c2])) {
        maximal = false;
        break;
      }
    }
    if (maximal) s.maximal.emplace_back(k, c);
  }
  return s;
}

/// N_G(P_gamma) = {g in N_G(P) : g i g^-1 in gamma}.
inline PermGroup n_g_pointed(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg) {
  const auto n = normalizer(ext.setup.g, pg.p);
  std::vector<Perm> keep;
  for (const auto& g : n.elements())
    if (point_of(ctx, ext.conjugate(g, pg.idempotent)) == pg.point) keep.push_back(g);
  return PermGroup::from_elements(ext.setup.g.degree(), keep);
}

/// The block b_gamma of B(P) containing Br_P(gamma), the ideal m* and the
/// simple module V_gamma of B(P) b_gamma / m*.
struct LocalBlockData {
  BlockData b_gamma;          ///< block of k C_H(P), kc coordinates
  Subalgebra block_alg;       ///< k C_H(P) b_gamma inside kc
  AlgebraStructure structure; ///< of block_alg
  std::size_t simple = 0;     ///< component of Br_P(gamma)
  Subspace m_star;            ///< in block_alg coordinates
  Module v;                   ///< V_gamma as a block_alg module
};

inline LocalBlockData local_block_data(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg,
                                       const MeataxeOptions& opt = {}) {
  if (!pg.local) throw Error("local block data: pointed group is not local");
  const auto& f = ext.field;
  const auto& kc = ctx.brauer.kc;
  const Vec bri = ctx.brauer.truncate(ext, pg.idempotent);
  std::optional<BlockData> found;
  for (const auto& bl : blocks(kc))
    if (!is_zero(kc.alg.mul(bl.idempotent, bri))) {
      if (found) throw Error("local block data: Br_P(i) meets two blocks");
      found = bl;
    }
  if (!found) throw Error("local block data: Br_P(i) meets no block");
  LocalBlockData d;
  d.b_gamma = *found;
  std::vector<Vec> span;
  for (std::size_t k = 0; k < kc.group.order(); ++k) span.push_back(kc.alg.mul(kc.alg.basis(k), d.b_gamma.idempotent));
  d.block_alg = make_subalgebra(kc.alg, span, d.b_gamma.idempotent);
  d.structure = analyze(d.block_alg.alg, opt);
  const Vec bri_c = d.block_alg.coords(bri);
  std::optional<std::size_t> simple;
  for (std::size_t c = 0; c < d.structure.count(); ++c)
    if (!d.structure.rho(c, bri_c).is_zero()) {
      if (simple) throw Error("local block data: Br_P(i) is not primitive");
      simple = c;
    }
  d.simple = *simple;
  d.v = d.structure.simples[d.simple].module;
  d.m_star = annihilator(d.v);

  // B(P_gamma) = B^P / m_gamma maps isomorphically onto B(P) b_gamma / m*
  const auto& bp = ctx.fixed.alg;
  std::vector<Vec> ker_rows_local;
  for (std::size_t r = 0; r < d.v.dim * d.v.dim; ++r) ker_rows_local.push_back(Vec(bp.alg.dim(), 0));
  for (std::size_t i = 0; i < bp.alg.dim(); ++i) {
    const Vec y = kc.alg.mul(ctx.brauer.truncate(ext, bp.to_ambient(bp.alg.basis(i))), d.b_gamma.idempotent);
    const Mat act = d.v.act(d.block_alg.coords(y));
    for (std::size_t r = 0; r < act.data.size(); ++r) ker_rows_local[r][i] = act.data[r];
  }
  const Subspace m_gamma = annihilator(ctx.structure.simples[pg.point].module);
  const Mat to_local = Mat::from_row_vectors(f, bp.alg.dim(), ker_rows_local);
  const Subspace ker_local(f, bp.alg.dim(), nullspace(to_local).columns());
  const std::size_t quotient_dim = d.block_alg.alg.dim() - d.m_star.dim();
  if (!(m_gamma == ker_local) || rank(to_local) != quotient_dim ||
      quotient_dim != ctx.structure.components[pg.point].component_dim)
    throw Error("local block data: B(P_gamma) does not match B(P) b_gamma / m*");
  return d;
}

/// k N_G(Q_delta) b_delta graded by E = N_G(Q_delta) / C_H(Q).
struct ExtendedBrauer {
  GroupAlgebra kn;
  QuotientSetup quotient;
  Subalgebra alg;
  GradedAlgebra graded;
};

inline ExtendedBrauer extended_brauer_group_algebra(const PermGroup& n, const PermGroup& c, const Vec& b_delta_kc,
                                                    const Field& f) {
  ExtendedBrauer eb{group_algebra(n, f), quotient(n, c), {}, {}};
  Vec bd(n.order(), 0);
  for (std::size_t k = 0; k < c.order(); ++k) bd[n.index(c.element(k))] = b_delta_kc[k];
  std::vector<Vec> span;
  for (const auto& g : n.elements()) span.push_back(eb.kn.times(g, bd));
  eb.alg = make_subalgebra(eb.kn.alg, span, bd);
  std::vector<std::size_t> deg;
  for (auto piv : eb.alg.span.pivots()) deg.push_back(eb.quotient.omega[piv]);
  eb.graded = make_graded(eb.alg.alg, eb.quotient.gbar, std::move(deg));
  return eb;
}

}  // namespace blockfusion
