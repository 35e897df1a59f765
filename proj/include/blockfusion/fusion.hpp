#pragma once

/**
 * @file fusion.hpp
 * @brief G-bar automorphisms of a p-subgroup, the fusion groups E and F of a
 *        pointed group on a block extension, and the comparison map between them.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "blockfusion/block_theory.hpp"
#include "blockfusion/graded.hpp"

namespace blockfusion {

/// A pair (phi, gbar) with phi an automorphism of P and gbar in G/H.
struct GbarAutomorphism {
  ElementMap phi;
  std::size_t gbar = 0;
  auto operator<=>(const GbarAutomorphism&) const = default;
};

inline GbarAutomorphism compose(const GbarAutomorphism& a, const GbarAutomorphism& b, const FiniteGroup& gbar) {
  return {compose(a.phi, b.phi), gbar.mul(a.gbar, b.gbar)};
}

/// phi(u)H = g u g^-1 H for all u in P, g a representative of gbar.
inline bool gbar_compatible(const QuotientSetup& q, const PermGroup& p, const ElementMap& phi, std::size_t gbar) {
  const Perm& g = q.g.element(q.reps[gbar]);
  const Perm gi = g.inverse();
  for (std::size_t k = 0; k < p.order(); ++k)
    if (q.coset_of(p.element(phi[k])) != q.coset_of(g * p.element(k) * gi)) return false;
  return true;
}

/// A subgroup of Aut(P) x G/H, sorted so that the identity comes first.
/// witnesses[k], when present, is an element of kG realising elements[k].
struct FusionGroup {
  std::vector<GbarAutomorphism> elements;
  FiniteGroup group;
  std::vector<Vec> witnesses;

  std::size_t order() const { return elements.size(); }

  std::optional<std::size_t> find(const GbarAutomorphism& x) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), x);
    if (it == elements.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - elements.begin());
  }

  bool contains(const FusionGroup& sub) const {
    return std::all_of(sub.elements.begin(), sub.elements.end(), [&](const auto& x) { return find(x).has_value(); });
  }
};

/// Sort, build the multiplication table, and check closure.
inline FusionGroup fusion_group(std::vector<GbarAutomorphism> els, const FiniteGroup& gbar,
                                std::vector<Vec> witnesses = {}) {
  if (els.empty()) throw Error("fusion group: no elements");
  const bool wit = !witnesses.empty();
  if (wit && witnesses.size() != els.size()) throw Error("fusion group: witness count mismatch");
  std::vector<std::size_t> order(els.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return els[a] < els[b]; });
  FusionGroup fg;
  for (auto k : order) {
    if (!fg.elements.empty() && fg.elements.back() == els[k]) throw Error("fusion group: repeated element");
    fg.elements.push_back(els[k]);
    if (wit) fg.witnesses.push_back(std::move(witnesses[k]));
  }
  const GbarAutomorphism id{identity_map(fg.elements.front().phi.size()), 0};
  if (fg.elements.front() != id) throw Error("fusion group: identity missing");
  const std::size_t n = fg.elements.size();
  std::vector<std::size_t> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      auto c = fg.find(compose(fg.elements[a], fg.elements[b], gbar));
      if (!c) throw Error("fusion group: not closed under composition");
      t[a * n + b] = *c;
    }
  fg.group = FiniteGroup(std::move(t), n);
  return fg;
}

inline bool is_normal_subgroup(const FusionGroup& sub, const FusionGroup& amb, const FiniteGroup& gbar) {
  if (!amb.contains(sub)) return false;
  for (std::size_t a = 0; a < amb.order(); ++a) {
    const auto ai = amb.elements[amb.group.inv(a)];
    for (const auto& x : sub.elements)
      if (!sub.find(compose(compose(amb.elements[a], x, gbar), ai, gbar))) return false;
  }
  return true;
}

/// Aut^Gbar(P).
inline FusionGroup aut_gbar(const QuotientSetup& q, const PermGroup& p) {
  if (!p.is_subgroup_of(q.g)) throw Error("aut_gbar: P is not contained in G");
  std::vector<GbarAutomorphism> out;
  for (const auto& phi : aut_group(p))
    for (std::size_t d = 0; d < q.gbar.order(); ++d)
      if (gbar_compatible(q, p, phi, d)) out.push_back({phi, d});
  return fusion_group(std::move(out), q.gbar);
}

/// Int^Gbar(P), checked normal in Aut^Gbar(P) and checked to receive the
/// homomorphism v -> (c_v, vbar).
inline FusionGroup int_gbar(const QuotientSetup& q, const PermGroup& p) {
  const auto aut = aut_gbar(q, p);
  std::vector<GbarAutomorphism> out;
  for (const auto& v : p.elements()) {
    const auto cv = conjugation_map(p, v);
    for (std::size_t d = 0; d < q.gbar.order(); ++d) {
      GbarAutomorphism x{cv, d};
      if (gbar_compatible(q, p, cv, d) && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
  }
  auto in = fusion_group(std::move(out), q.gbar);
  if (!is_normal_subgroup(in, aut, q.gbar)) throw Error("int_gbar: not normal in Aut^Gbar(P)");
  for (const auto& v : p.elements())
    for (const auto& w : p.elements()) {
      const GbarAutomorphism xv{conjugation_map(p, v), q.coset_of(v)};
      const GbarAutomorphism xw{conjugation_map(p, w), q.coset_of(w)};
      const GbarAutomorphism xvw{conjugation_map(p, v * w), q.coset_of(v * w)};
      if (!in.find(xv) || compose(xv, xw, q.gbar) != xvw) throw Error("int_gbar: P -> Int^Gbar(P) is not a homomorphism");
    }
  return in;
}

// ---------------------------------------------------------------------------
// The corner iAi

/// iAi inside kG with its G/H grading and the structural map u -> ui.
struct Corner {
  Vec i;                      ///< kG coordinates
  PermGroup p;
  Subalgebra sub;             ///< iAi inside kG, unit i
  GradedAlgebra graded;       ///< same basis as sub.alg
  std::vector<Vec> p_image;   ///< ui in corner coordinates, indexed by P's elements

  Vec to_kg(std::span<const Residue> c) const { return sub.to_ambient(c); }
  Vec coords(std::span<const Residue> x) const { return sub.coords(x); }
};

/// i A' i for A' spanned by `span_a` inside kG (A itself, or a corner e A e).
inline Corner corner_in(const BlockExtension& ext, const std::vector<Vec>& span_a, const PermGroup& p, const Vec& i) {
  Corner c;
  c.i = i;
  c.p = p;
  std::vector<Vec> span;
  for (const auto& a : span_a) span.push_back(ext.mul3(i, a, i));
  c.sub = make_subalgebra(ext.kg.alg, span, i);
  std::vector<std::size_t> deg;
  for (auto piv : c.sub.span.pivots()) deg.push_back(ext.setup.omega[piv]);
  c.graded = make_graded(c.sub.alg, ext.setup.gbar, std::move(deg));
  for (const auto& u : p.elements()) {
    auto y = c.sub.from_ambient(ext.mul(ext.element(u), i));
    if (!y) throw Error("corner: ui is not in iAi");
    c.p_image.push_back(std::move(*y));
  }
  auto sorted = c.p_image;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("corner: structural map P -> (iAi)^x is not injective");
  return c;
}

inline Corner corner(const BlockExtension& ext, const PermGroup& p, const Vec& i) {
  return corner_in(ext, ext.a.span.basis(), p, i);
}

/// {x in (iAi)_gbar : x (ui) = (phi(u) i) x for u in P}, in corner coordinates.
inline std::vector<Vec> twisted_centralizer(const Corner& c, const GbarAutomorphism& f) {
  const auto& a = c.graded.alg;
  const auto idx = c.graded.component(f.gbar);
  const auto& gens = c.p.generators();
  std::vector<Vec> cols;
  for (auto k : idx) {
    Vec col;
    const Vec e = a.basis(k);
    for (const auto& u : gens) {
      const std::size_t ui = c.p.index(u);
      Vec l = a.mul(e, c.p_image[ui]);
      const Vec r = a.mul(c.p_image[f.phi[ui]], e);
      axpy(a.field(), a.field().neg(1), r, l);
      col.insert(col.end(), l.begin(), l.end());
    }
    cols.push_back(std::move(col));
  }
  std::vector<Vec> out;
  if (idx.empty()) return out;
  if (gens.empty()) {
    for (auto k : idx) out.push_back(a.basis(k));
    return out;
  }
  const Mat m = Mat::from_columns(a.field(), cols.front().size(), cols);
  const Mat ns = nullspace(m);
  for (const auto& v : ns.columns()) {
    Vec x(a.dim(), 0);
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = v[k];
    out.push_back(std::move(x));
  }
  return out;
}

struct FusionSearch {
  FusionGroup group;
  SearchStatus status = SearchStatus::Found;   ///< Inconclusive if some candidate was undecided
  std::vector<GbarAutomorphism> undecided;
};

/// F by deciding, for every (phi, gbar) in Aut^Gbar(P), whether the twisted
/// centralizer in (iAi)_gbar contains a unit of iAi.
inline FusionSearch fusion_F_direct(const QuotientSetup& q, const Corner& c, std::uint64_t seed = 1,
                                    std::uint64_t cap = kUnitExhaustiveCap) {
  const auto aut = aut_gbar(q, c.p);
  FusionSearch out;
  std::vector<GbarAutomorphism> els;
  std::vector<Vec> wit;
  for (const auto& f : aut.elements) {
    const auto x = twisted_centralizer(c, f);
    auto r = search_span(c.graded.alg.field(), x,
                         [&](const Vec& y) { return is_homogeneous_unit(c.graded, y, f.gbar); }, seed, cap);
    if (r.element) {
      els.push_back(f);
      wit.push_back(c.to_kg(*r.element));
    } else if (r.status == SearchStatus::Inconclusive) {
      out.undecided.push_back(f);
    }
  }
  if (!out.undecided.empty()) out.status = SearchStatus::Inconclusive;
  out.group = fusion_group(std::move(els), q.gbar, std::move(wit));
  return out;
}

struct NormalizerScan {
  FusionGroup group;
  SearchStatus status = SearchStatus::Found;
  std::uint64_t normalizer_order = 0;    ///< |N_{hU(iAi)}(Pi)|
  std::uint64_t centralizer_order = 0;   ///< |C_{(iBi)^x}(Pi)|
  std::vector<std::size_t> skipped_degrees;

  /// Every fibre of N -> F is a coset of C.
  bool fibres_match() const { return normalizer_order == centralizer_order * group.order(); }
};

/// F as the image of N_{hU(iAi)}(Pi) under a -> (conjugation by a, deg a),
/// scanning every element of each component of size at most cap.
inline NormalizerScan fusion_F_normalizer(const QuotientSetup& q, const Corner& c,
                                          std::uint64_t cap = kUnitExhaustiveCap) {
  const auto& a = c.graded.alg;
  const auto& f = a.field();
  const std::size_t np = c.p.order();
  std::vector<Mat> right, left;
  for (const auto& x : c.p_image) {
    right.push_back(a.right_matrix(x));
    left.push_back(a.left_matrix(x));
  }
  NormalizerScan out;
  std::map<GbarAutomorphism, Vec> image;
  for (std::size_t d = 0; d < q.gbar.order(); ++d) {
    const auto idx = c.graded.component(d);
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < idx.size() && total <= cap; ++k) total *= f.p();
    if (total > cap) {
      out.skipped_degrees.push_back(d);
      out.status = SearchStatus::Inconclusive;
      continue;
    }
    std::vector<Residue> coef(idx.size(), 0);
    for (std::uint64_t t = 1; t < total; ++t) {
      std::size_t k = 0;
      while (++coef[k] == f.p()) coef[k++] = 0;
      Vec x(a.dim(), 0);
      for (std::size_t j = 0; j < idx.size(); ++j) x[idx[j]] = coef[j];
      if (!is_homogeneous_unit(c.graded, x, d)) continue;
      std::map<Vec, std::size_t> rhs;
      for (std::size_t v = 0; v < np; ++v) rhs.emplace(mat_vec(left[v], x), v);
      ElementMap phi(np);
      bool ok = true;
      for (std::size_t u = 0; u < np && ok; ++u) {
        auto it = rhs.find(mat_vec(right[u], x));
        if (it == rhs.end()) ok = false;
        else phi[u] = it->second;
      }
      if (!ok) continue;
      ++out.normalizer_order;
      GbarAutomorphism g{std::move(phi), d};
      if (d == 0 && g.phi == identity_map(np)) ++out.centralizer_order;
      image.try_emplace(std::move(g), c.to_kg(x));
    }
  }
  std::vector<GbarAutomorphism> els;
  std::vector<Vec> wit;
  for (auto& [g, w] : image) {
    els.push_back(g);
    wit.push_back(w);
  }
  out.group = fusion_group(std::move(els), q.gbar, std::move(wit));
  return out;
}

// ---------------------------------------------------------------------------
// E = N_G(P_gamma) / C_H(P)

struct EFusion {
  PermGroup n;
  PermGroup c;
  QuotientSetup q;
  std::vector<GbarAutomorphism> actions;   ///< (c_g on P, gH) for each coset representative g

  std::size_t order() const { return q.reps.size(); }
  const Perm& rep(std::size_t k) const { return q.g.element(q.reps[k]); }
};

inline EFusion fusion_E(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg) {
  auto n = n_g_pointed(ext, ctx, pg);
  auto c = centralizer(ext.setup.h, pg.p);
  if (!c.is_subgroup_of(n)) throw Error("fusion_E: C_H(P) is not contained in N_G(P_gamma)");
  EFusion e{n, c, quotient(n, c), {}};
  for (std::size_t k = 0; k < e.order(); ++k)
    e.actions.push_back({conjugation_map(pg.p, e.rep(k)), ext.setup.coset_of(e.rep(k))});
  return e;
}

// ---------------------------------------------------------------------------
// Theta: E -> F

struct ThetaCheck {
  std::vector<std::size_t> map;   ///< E index -> F index
  std::vector<Vec> a1;            ///< unit of B^P with g i g^-1 = a1 i a1^-1 (kG)
  std::vector<Vec> witness;       ///< i a1^-1 g (kG)
  bool witnesses_ok = true;
  bool homomorphism = true;
  bool bijective = true;

  bool ok() const { return witnesses_ok && homomorphism && bijective; }
};

/// A unit a of B^P with a i a^-1 = j.
inline std::optional<Vec> conjugating_unit(const BlockExtension& ext, const LocalContext& ctx, const Vec& i,
                                           const Vec& j, std::uint64_t seed = 1) {
  const auto& bp = ctx.fixed.alg;
  const auto& f = ext.field;
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < bp.alg.dim(); ++k) {
    const Vec b = bp.to_ambient(bp.alg.basis(k));
    Vec l = ext.mul(b, i);
    axpy(f, f.neg(1), ext.mul(j, b), l);
    cols.push_back(std::move(l));
  }
  const auto sol = nullspace(Mat::from_columns(f, ext.kg.alg.dim(), cols)).columns();
  auto r = search_span(f, sol, [&](const Vec& x) { return bp.alg.is_unit(x); }, seed);
  if (!r.element) return std::nullopt;
  return bp.to_ambient(*r.element);
}

inline ThetaCheck theta_check(const BlockExtension& ext, const LocalContext& ctx, const Corner& c, const EFusion& e,
                              const FusionGroup& f, std::uint64_t seed = 1) {
  const auto& bp = ctx.fixed.alg;
  ThetaCheck t;
  for (std::size_t k = 0; k < e.order(); ++k) {
    const Perm& g = e.rep(k);
    auto a1 = conjugating_unit(ext, ctx, c.i, ext.conjugate(g, c.i), seed);
    if (!a1) throw Error("theta: no unit of B^P conjugates i to its G-conjugate");
    const auto a1inv = bp.alg.inverse(bp.coords(*a1));
    if (!a1inv) throw Error("theta: conjugating element is not a unit");
    const Vec x = ext.mul3(c.i, bp.to_ambient(*a1inv), ext.element(g));
    const auto& act = e.actions[k];
    const auto xc = c.sub.from_ambient(x);
    bool ok = xc && c.graded.degree_of(*xc) == act.gbar && is_homogeneous_unit(c.graded, *xc, act.gbar);
    if (ok)
      for (std::size_t u = 0; u < c.p.order() && ok; ++u)
        ok = c.graded.alg.mul(*xc, c.p_image[u]) == c.graded.alg.mul(c.p_image[act.phi[u]], *xc);
    const auto idx = f.find(act);
    if (!ok || !idx) {
      t.witnesses_ok = false;
      t.map.push_back(f.order());
    } else {
      t.map.push_back(*idx);
    }
    t.a1.push_back(std::move(*a1));
    t.witness.push_back(x);
  }
  if (!t.witnesses_ok) {
    t.homomorphism = t.bijective = false;
    return t;
  }
  for (std::size_t a = 0; a < e.order(); ++a)
    for (std::size_t b = 0; b < e.order(); ++b)
      if (t.map[e.q.gbar.mul(a, b)] != f.group.mul(t.map[a], t.map[b])) t.homomorphism = false;
  auto m = t.map;
  std::sort(m.begin(), m.end());
  t.bijective = e.order() == f.order() && std::adjacent_find(m.begin(), m.end()) == m.end();
  return t;
}

}  // namespace blockfusion
