#include <gtest/gtest.h>

#include <set>

#include "blockfusion/fusion.hpp"
#include "support.hpp"

using namespace blockfusion;
using namespace bftest;

namespace {

// (c_g, gbar) for g in N_G(P), computed straight from the permutations
std::set<GbarAutomorphism> normalizer_image(const QuotientSetup& q, const PermGroup& p) {
  std::set<GbarAutomorphism> out;
  const auto n = normalizer(q.g, p);
  for (const auto& g : n.elements()) out.insert({conjugation_map(p, g), q.coset_of(g)});
  return out;
}

struct FusionRun {
  EFusion e;
  FusionSearch direct;
  NormalizerScan scan;
  ThetaCheck theta;
};

FusionRun run(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg) {
  auto c = corner(ext, pg.p, pg.idempotent);
  auto e = fusion_E(ext, ctx, pg);
  auto d = fusion_F_direct(ext.setup, c);
  auto n = fusion_F_normalizer(ext.setup, c);
  auto t = theta_check(ext, ctx, c, e, d.group);
  return {std::move(e), std::move(d), std::move(n), std::move(t)};
}

void expect_consistent(const BlockExtension& ext, const LocalContext& ctx, const PointedGroup& pg) {
  const auto r = run(ext, ctx, pg);
  EXPECT_EQ(r.direct.status, SearchStatus::Found);
  EXPECT_EQ(r.scan.status, SearchStatus::Found);
  EXPECT_EQ(r.direct.group.elements, r.scan.group.elements);
  EXPECT_TRUE(r.scan.fibres_match());
  EXPECT_TRUE(r.theta.ok());
  EXPECT_EQ(r.e.order(), r.direct.group.order());
  EXPECT_TRUE(aut_gbar(ext.setup, pg.p).contains(r.direct.group));
  // the image of N_G(P_gamma) is E's image; F contains Int-type elements from P
  for (const auto& a : r.e.actions) EXPECT_TRUE(r.direct.group.find(a).has_value());
  for (const auto& v : pg.p.elements())
    EXPECT_TRUE(r.direct.group.find({conjugation_map(pg.p, v), ext.setup.coset_of(v)}).has_value());
}

}  // namespace

TEST(AutGbar, Examples) {
  // P <= H: condition vacuous
  auto q1 = quotient(s3(), c3());
  EXPECT_EQ(aut_gbar(q1, c3()).order(), 4u);
  // Gbar trivial
  auto q3 = quotient(s3(), s3());
  EXPECT_EQ(aut_gbar(q3, c3()).order(), 2u);
  // P trivial: {id} x Gbar
  auto q4 = quotient(s4(), v4());
  EXPECT_EQ(aut_gbar(q4, PermGroup::enumerate(4, {})).order(), 6u);
  EXPECT_EQ(int_gbar(q4, PermGroup::enumerate(4, {})).order(), 6u);
}

TEST(AutGbar, ContainsNormalizerImageAndIsSubgroup) {
  struct Case {
    QuotientSetup q;
    PermGroup p;
  };
  std::vector<Case> cases{{quotient(s3(), c3()), c3()},
                          {quotient(s4(), v4()), d8()},
                          {quotient(s4(), a4()), d8()},
                          {quotient(s4(), a4()), v4()},
                          {quotient(s4(), v4()), gen(4, {"(0 1)"})}};
  for (const auto& c : cases) {
    const auto aut = aut_gbar(c.q, c.p);
    for (const auto& x : normalizer_image(c.q, c.p)) EXPECT_TRUE(aut.find(x).has_value());
    // every compatible pair from a brute force over all of Aut(P) x Gbar is present
    std::size_t n = 0;
    for (const auto& phi : aut_group(c.p))
      for (std::size_t d = 0; d < c.q.gbar.order(); ++d) {
        bool ok = true;
        for (const auto& g : c.q.g.elements()) {
          if (c.q.coset_of(g) != d) continue;
          for (std::size_t k = 0; k < c.p.order(); ++k)
            ok = ok && c.q.coset_of(c.p.element(phi[k])) == c.q.coset_of(g * c.p.element(k) * g.inverse());
          break;
        }
        n += ok;
      }
    EXPECT_EQ(aut.order(), n);
  }
}

TEST(IntGbar, NormalAndCountForD8) {
  auto q = quotient(s4(), v4());
  const auto p = d8();
  const auto in = int_gbar(q, p);
  EXPECT_TRUE(is_normal_subgroup(in, aut_gbar(q, p), q.gbar));
  // |P/Z(P)| inner automorphisms, each compatible with the two elements of the
  // centralizer of Pbar = C2 in S3 (translated by vbar)
  EXPECT_EQ(in.order(), 8u);
  // P abelian inside H
  auto q1 = quotient(s3(), c3());
  EXPECT_EQ(int_gbar(q1, c3()).order(), 2u);
}

TEST(Fusion, SC1) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, c3());
  ASSERT_EQ(ctx.points.size(), 1u);
  const auto r = run(ext, ctx, ctx.points[0]);
  EXPECT_EQ(r.e.order(), 2u);
  EXPECT_EQ(r.direct.group.order(), 2u);
  EXPECT_EQ(r.direct.group.elements, r.scan.group.elements);
  EXPECT_TRUE(r.theta.ok());
  // the non-trivial element inverts C3 and has degree 1
  EXPECT_EQ(r.direct.group.elements[1].gbar, 1u);
  EXPECT_NE(r.direct.group.elements[1].phi, identity_map(3));
  expect_consistent(ext, ctx, ctx.points[0]);
}

TEST(Fusion, TrivialP) {
  auto ext = extension(s3(), c3(), 3);
  auto ctx = local_context(ext, PermGroup::enumerate(3, {}));
  const auto r = run(ext, ctx, ctx.points[0]);
  EXPECT_EQ(r.e.order(), 2u);
  EXPECT_EQ(r.direct.group.order(), 2u);
  EXPECT_TRUE(r.theta.ok());
}

TEST(Fusion, ClassicalReduction) {
  // Gbar = 1: E = N_G(P_gamma)/C_G(P), every degree trivial
  auto ext = extension(s3(), s3(), 3);
  auto ctx = local_context(ext, c3());
  for (const auto& pg : ctx.points) {
    if (!pg.local) continue;
    const auto r = run(ext, ctx, pg);
    EXPECT_EQ(r.e.order(), normalizer(s3(), c3()).order() / centralizer(s3(), c3()).order());
    EXPECT_EQ(r.direct.group.order(), 2u);
    for (const auto& x : r.direct.group.elements) EXPECT_EQ(x.gbar, 0u);
    expect_consistent(ext, ctx, pg);
  }
}

TEST(Fusion, AllPointsOnSmallExtensions) {
  struct Case {
    const char* name;
    PermGroup g, h;
    std::uint32_t p;
  };
  std::vector<Case> cases{{"C2/C2", gen(2, {"(0 1)"}), gen(2, {"(0 1)"}), 2},
                          {"S3/C3", s3(), c3(), 3},
                          {"S3/S3", s3(), s3(), 3},
                          {"S3/C3 p2", s3(), c3(), 2},
                          {"S4/V4", s4(), v4(), 2},
                          {"S4/A4", s4(), a4(), 2}};
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    auto ext = extension(c.g, c.h, c.p);
    for (const auto& p : p_subgroups(c.g, c.p)) {
      auto ctx = local_context(ext, p);
      for (const auto& pg : ctx.points) {
        if (!pg.local) continue;
        expect_consistent(ext, ctx, pg);
      }
    }
  }
}

TEST(Fusion, DefectGroupOfSC4) {
  auto ext = extension(s4(), v4(), 2);
  auto ctx = local_context(ext, d8());
  for (const auto& pg : ctx.points)
    if (pg.local) {
      const auto r = run(ext, ctx, pg);
      // N_G(D8) = D8, C_{V4}(D8) = Z(D8)
      EXPECT_EQ(r.e.order(), 4u);
      EXPECT_TRUE(r.theta.ok());
    }
}
