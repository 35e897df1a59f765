#include <gtest/gtest.h>

#include "blockfusion/clifford.hpp"
#include "support.hpp"

using namespace blockfusion;
using namespace bftest;

namespace {

// B^P x as a left B^P-module
Module left_ideal(const Algebra& a, const Vec& x) {
  std::vector<Vec> span;
  for (std::size_t k = 0; k < a.dim(); ++k) span.push_back(a.mul(a.basis(k), x));
  return restrict_to(regular_module(a), Subspace(a.field(), a.dim(), span));
}

// every element of a small space, by brute force
std::vector<Vec> all_vectors(const Field& f, const std::vector<Vec>& basis) {
  std::vector<Vec> out{Vec(basis.empty() ? 0 : basis[0].size(), 0)};
  for (const auto& b : basis) {
    std::vector<Vec> next;
    for (const auto& v : out)
      for (Residue c = 0; c < f.p(); ++c) {
        Vec w = v;
        axpy(f, c, b, w);
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  return out;
}

int parity(const Perm& g) {
  int inv = 0;
  const auto& im = g.images();
  for (std::size_t a = 0; a < im.size(); ++a)
    for (std::size_t b = a + 1; b < im.size(); ++b) inv += im[a] > im[b];
  return inv % 2;
}

struct Setting {
  const char* name;
  PermGroup g, h;
  std::uint32_t p;
};

std::vector<Setting> small_settings() {
  return {{"C2/C2", gen(2, {"(0 1)"}), gen(2, {"(0 1)"}), 2}, {"S3/C3", s3(), c3(), 3}, {"S3/S3", s3(), s3(), 3},
          {"S3/C3 p2", s3(), c3(), 2},                        {"S4/V4", s4(), v4(), 2}, {"S4/A4", s4(), a4(), 2}};
}

}  // namespace

TEST(Clifford, SC1Dimensions) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, c3());
  const auto b = clifford_bundle(ext, ctx, ctx.points[0]);
  const auto& bp = ctx.fixed.alg;
  // i = 1 and B^P = kC3
  EXPECT_EQ(bp.alg.dim(), 3u);
  EXPECT_EQ(bp.coords(ctx.points[0].idempotent), bp.alg.unit());
  EXPECT_EQ(b.ce.cc.graded.alg.dim(), 6u);
  EXPECT_EQ(b.cf.graded.alg.dim(), 6u);
  EXPECT_EQ(b.ebar.cc.graded.alg.dim(), 2u);
  EXPECT_EQ(b.fbar.q.graded.alg.dim(), 2u);
  const auto c = check_bundle(ctx, b);
  EXPECT_TRUE(c.psi_iso);
  EXPECT_TRUE(c.psibar_iso);
  EXPECT_EQ(c.residual_equiv, SearchStatus::Found);
  EXPECT_EQ(c.local_equiv, SearchStatus::Found);
}

TEST(Clifford, SC1ResidualSplits) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, c3());
  const auto b = clifford_bundle(ext, ctx, ctx.points[0]);
  const auto& g = b.ebar.cc.graded;
  // a degree-1 unit squaring to 1, found by scanning the component
  std::vector<Vec> comp;
  for (auto k : g.component(1)) comp.push_back(g.alg.basis(k));
  bool split = false;
  for (const auto& u : all_vectors(g.alg.field(), comp))
    if (!is_zero(u) && g.alg.mul(u, u) == g.alg.unit()) split = true;
  EXPECT_TRUE(split);
  // same on the local side
  const auto& l = b.loc->cc.graded;
  comp.clear();
  for (auto k : l.component(1)) comp.push_back(l.alg.basis(k));
  split = false;
  for (const auto& u : all_vectors(l.alg.field(), comp))
    if (!is_zero(u) && l.alg.mul(u, u) == l.alg.unit()) split = true;
  EXPECT_TRUE(split);
}

TEST(Clifford, ComponentDimsMatchHomSpaces) {
  for (const auto& s : small_settings()) {
    SCOPED_TRACE(s.name);
    auto ext = extension(s.g, s.h, s.p);
    for (const auto& p : p_subgroups(s.g, s.p)) {
      auto ctx = local_context(ext, p);
      const auto& bp = ctx.fixed.alg;
      for (const auto& pg : ctx.points) {
        if (!pg.local) continue;
        const auto b = clifford_bundle(ext, ctx, pg);
        const Vec ic = bp.coords(pg.idempotent);
        const auto mi = left_ideal(bp.alg, ic);
        const auto dims = b.ce.cc.graded.component_dims();
        for (std::size_t x = 0; x < b.e.order(); ++x) {
          const Vec j = bp.coords(ext.conjugate(b.e.rep(x), pg.idempotent));
          EXPECT_EQ(dims[x], hom_space(mi, left_ideal(bp.alg, j)).size());
        }
        // E_1 = i B^P i = F_1
        const auto ibi = corner(bp.alg, ic);
        EXPECT_EQ(dims[0], ibi.alg.dim());
        EXPECT_EQ(b.cf.graded.component_dims()[0], ibi.alg.dim());
        EXPECT_EQ(b.ce.cc.graded.alg.dim(), b.e.order() * ibi.alg.dim());
        // per-degree dims agree along Theta
        const auto fd = b.cf.graded.component_dims();
        for (std::size_t x = 0; x < b.e.order(); ++x) EXPECT_EQ(dims[x], fd[b.theta.map[x]]);
      }
    }
  }
}

TEST(Clifford, AllChecksOnSmallExtensions) {
  for (const auto& s : small_settings()) {
    SCOPED_TRACE(s.name);
    auto ext = extension(s.g, s.h, s.p);
    for (const auto& p : p_subgroups(s.g, s.p)) {
      auto ctx = local_context(ext, p);
      for (const auto& pg : ctx.points) {
        if (!pg.local) continue;
        const auto b = clifford_bundle(ext, ctx, pg);
        const auto c = check_bundle(ctx, b);
        EXPECT_TRUE(c.psi_iso);
        EXPECT_TRUE(c.residual_kernel);
        EXPECT_TRUE(c.psibar_iso);
        EXPECT_EQ(c.residual_equiv, SearchStatus::Found);
        EXPECT_TRUE(c.residual_one_is_end);
        ASSERT_TRUE(c.local_iso.has_value());
        EXPECT_TRUE(*c.local_iso);
        EXPECT_EQ(c.local_equiv, SearchStatus::Found);
      }
    }
  }
}

TEST(Clifford, NonLocalPointHasNoLocalResidual) {
  auto ext = extension(s4(), a4(), 2);
  bool seen = false;
  for (const auto& p : p_subgroups(s4(), 2)) {
    auto ctx = local_context(ext, p);
    for (const auto& pg : ctx.points)
      if (!pg.local) {
        const auto b = clifford_bundle(ext, ctx, pg);
        EXPECT_FALSE(b.loc.has_value());
        const auto c = check_bundle(ctx, b);
        EXPECT_TRUE(c.psi_iso);
        EXPECT_EQ(c.residual_equiv, SearchStatus::Found);
        seen = true;
      }
  }
  EXPECT_TRUE(seen);
}

TEST(Clifford, FieldOfDegreeTwo) {
  // the 2-dimensional simple module of GF(2)S4 restricted to A4 has End = GF(4)
  auto ext = extension(s4(), a4(), 2);
  auto ctx = local_context(ext, PermGroup::enumerate(4, {}));
  bool seen = false;
  for (const auto& pg : ctx.points) {
    if (ctx.structure.simples[pg.point].end_degree != 2) continue;
    seen = true;
    const auto b = clifford_bundle(ext, ctx, pg);
    const auto one = b.ebar.cc.graded.one();
    ASSERT_EQ(one.alg.dim(), 2u);
    // a field: every nonzero element is a unit
    for (const auto& x : all_vectors(one.alg.field(), {one.alg.basis(0), one.alg.basis(1)}))
      EXPECT_TRUE(is_zero(x) || one.alg.is_unit(x));
    const auto c = check_bundle(ctx, b);
    EXPECT_TRUE(c.residual_one_is_end);
    EXPECT_EQ(c.residual_equiv, SearchStatus::Found);
    EXPECT_EQ(c.local_equiv, SearchStatus::Found);
    // the odd coset acts on End(V) = GF(4) as Frobenius
    const auto& fs = b.ebar_fs;
    ASSERT_EQ(fs.action.size(), 2u);
    for (const auto& x : all_vectors(one.alg.field(), {one.alg.basis(0), one.alg.basis(1)}))
      EXPECT_EQ(mat_vec(fs.action[1], x), one.alg.mul(x, x));
  }
  EXPECT_TRUE(seen);
}

TEST(Clifford, DescendRejectsUnstableIdeal) {
  // kV4 over itself, E = S3 permuting the involutions
  auto ext = extension(s4(), v4(), 2);
  auto ctx = local_context(ext, PermGroup::enumerate(4, {}));
  const auto b = clifford_bundle(ext, ctx, ctx.points[0]);
  const auto& f = ext.field;
  const auto v = v4();
  const auto& vs = v.elements();
  Vec x = ext.element(vs[0]), y = ext.element(vs[0]);
  x = vadd(f, x, ext.element(vs[1]));
  y = vadd(f, y, ext.element(vs[2]));
  // the ideal (1 + a) of kV4 is not stable under conjugation by S4
  const auto& base = b.ce.base;
  const Subspace ideal(f, base.alg.dim(), {base.coords(x), base.coords(ext.mul(x, y))});
  const auto q = quotient_algebra(base.alg, ideal);
  EXPECT_THROW(descend(b.ce.cc.data, q), Error);
  // the radical is
  const auto r = quotient_algebra(base.alg, radical(base.alg));
  EXPECT_EQ(descend(b.ce.cc.data, r).base.dim(), 1u);
}

TEST(Embedding, TrivialAndCornerCases) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, c3());
  const auto& pg = ctx.points[0];
  const auto b = clifford_bundle(ext, ctx, pg);
  for (const auto& e : {ext.b, pg.idempotent, point_cut(ctx, pg)}) {
    const auto r = embed_truncate(ext, ctx, b, e);
    EXPECT_TRUE(r.ok());
    // N_G(P_gamma) needs no correction here
    for (const auto& w : r.w) EXPECT_TRUE(ctx.fixed.alg.alg.is_unit(ctx.fixed.alg.coords(w)));
  }
}

TEST(Embedding, RejectsIncompatibleIdempotent) {
  auto ext = extension(s4(), a4(), 2);
  auto ctx = local_context(ext, PermGroup::enumerate(4, {}));
  ASSERT_GE(ctx.points.size(), 2u);
  const auto b = clifford_bundle(ext, ctx, ctx.points[0]);
  // the other point's idempotent is orthogonal to i
  EXPECT_THROW(embed_truncate(ext, ctx, b, ctx.points[1].idempotent), Error);
}

TEST(Embedding, DiagramsOnSC1AndSC2) {
  struct Case {
    const char* name;
    PermGroup g, h;
  };
  std::vector<Case> cases{{"SC1", s3(), c3()}, {"SC2", s4(), a4()}};
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    const std::uint32_t p = c.g.order() == 6 ? 3 : 2;
    auto ext = extension(c.g, c.h, p);
    for (const auto& q : p_subgroups(c.g, p)) {
      auto ctx = local_context(ext, q);
      for (const auto& pg : ctx.points) {
        if (!pg.local) continue;
        const auto b = clifford_bundle(ext, ctx, pg);
        for (const auto& e : {ext.b, pg.idempotent, point_cut(ctx, pg)}) {
          const auto r = embed_truncate(ext, ctx, b, e);
          EXPECT_TRUE(r.i_primitive);
          EXPECT_TRUE(r.e_match);
          EXPECT_TRUE(r.f_match);
          EXPECT_TRUE(r.unreduced_square);
          EXPECT_TRUE(r.verticals_iso);
          EXPECT_TRUE(r.left_square);
          EXPECT_TRUE(r.right_square);
        }
      }
    }
  }
}

TEST(Tensor, SC1WithItself) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, c3());
  const auto b = clifford_bundle(ext, ctx, ctx.points[0]);
  const auto t = tensor_diagonal_check(ext, b, ext, b);
  // pairs of S3 x S3 with equal sign
  std::size_t pairs = 0;
  for (const auto& g : s3().elements())
    for (const auto& h : s3().elements()) pairs += (parity(g) == parity(h));
  EXPECT_EQ(t.g_order, pairs);
  EXPECT_LE(t.a_dim, kTensorDimCap);
  EXPECT_EQ(t.k.elements, b.f.group.elements);
  EXPECT_TRUE(t.k_in_f2);
  EXPECT_EQ(t.diagonal_dim, t.k.order());
  EXPECT_EQ(t.iso, SearchStatus::Found);
  EXPECT_TRUE(t.ok());
}

TEST(Tensor, TrivialPartnerCollapses) {
  // Gbar = 1 on both sides; the partner is kC3 over itself with b' = 1
  auto e1 = extension(s3(), s3(), 3);
  auto c1 = local_context(e1, c3());
  auto e2 = extension(c3(), c3(), 3);
  auto c2 = local_context(e2, c3());
  for (const auto& pg : c1.points) {
    if (!pg.local) continue;
    const auto b1 = clifford_bundle(e1, c1, pg);
    const auto b2 = clifford_bundle(e2, c2, c2.points[0]);
    EXPECT_EQ(b2.f.group.order(), 1u);
    const auto t = tensor_diagonal_check(e1, b1, e2, b2);
    EXPECT_EQ(t.k.order(), 1u);
    EXPECT_EQ(t.diagonal_dim, b1.fbar.q.graded.one().alg.dim());
    EXPECT_TRUE(t.ok());
  }
}

TEST(Tensor, RejectsMismatchedGradings) {
  auto e1 = extension(s3(), c3(), 3);
  auto c1 = local_context(e1, c3());
  auto e2 = extension(s3(), s3(), 3);
  auto c2 = local_context(e2, c3());
  const auto b1 = clifford_bundle(e1, c1, c1.points[0]);
  const auto b2 = clifford_bundle(e2, c2, c2.points[0]);
  EXPECT_THROW(tensor_diagonal_check(e1, b1, e2, b2), Error);
}
