#include <gtest/gtest.h>

#include "blockfusion/algebra.hpp"
#include "blockfusion/algebra_structure.hpp"
#include "blockfusion/meataxe.hpp"
#include "support.hpp"

using namespace blockfusion;
using bftest::for_each_vector;
using bftest::is_nilpotent;

namespace {

// GF(p)C_n realised as GF(p)[x]/(x^n - 1)
Algebra cyclic_group_algebra(std::uint32_t p, std::size_t n) {
  Field f(p);
  Poly m(n + 1, 0);
  m[0] = f.neg(1);
  m[n] = 1;
  return polynomial_quotient_algebra(f, m);
}

Algebra upper_triangular_2x2(const Field& f) {
  Algebra m2 = matrix_algebra(f, 2);
  // E00, E01, E11
  return make_subalgebra(m2, {m2.basis(0), m2.basis(1), m2.basis(3)}, m2.unit()).alg;
}

}  // namespace

TEST(Algebra, RejectsNonAssociativeTable) {
  Field f(2);
  // e0 unit, e1 e1 = e0 + e1 with e1 e0 = 0: unit fails
  std::vector<Vec> prods{{1, 0}, {0, 1}, {0, 0}, {1, 1}};
  EXPECT_THROW(Algebra(f, 2, prods, {1, 0}), Error);
}

TEST(Radical, Examples) {
  Field f2(2), f3(3);
  EXPECT_EQ(radical(Algebra(f2, 1, {{1}}, {1})).dim(), 0u);
  auto dual = polynomial_quotient_algebra(f3, Poly{0, 0, 1});
  auto j = radical(dual);
  ASSERT_EQ(j.dim(), 1u);
  EXPECT_TRUE(j.contains(Vec{0, 1}));
  auto c3 = cyclic_group_algebra(3, 3);
  auto jc = radical(c3);
  EXPECT_EQ(jc.dim(), 2u);
  // (x - 1)^3 = 0 and (x - 1) spans J with its square
  Vec xm1{2, 1, 0};
  EXPECT_TRUE(jc.contains(xm1));
  EXPECT_TRUE(is_zero(c3.pow(xm1, 3)));
}

TEST(NilradicalCommutative, Examples) {
  Field f2(2);
  EXPECT_EQ(nilradical_commutative(polynomial_quotient_algebra(f2, Poly{1, 1, 1})).dim(), 0u);
  auto n = nilradical_commutative(polynomial_quotient_algebra(f2, Poly{0, 0, 1}));
  ASSERT_EQ(n.dim(), 1u);
  EXPECT_TRUE(n.contains(Vec{0, 1}));
  EXPECT_THROW(nilradical_commutative(matrix_algebra(f2, 2)), Error);
}

TEST(SplitCommutativeSemisimple, Examples) {
  Field f2(2);
  auto one = split_commutative_semisimple(Algebra(Field(5), 1, {{1}}, {1}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], Vec{1});
  auto k = Algebra(f2, 1, {{1}}, {1});
  auto coords = split_commutative_semisimple(direct_product(k, k));
  ASSERT_EQ(coords.size(), 2u);
  EXPECT_EQ(coords[0], (Vec{0, 1}));
  EXPECT_EQ(coords[1], (Vec{1, 0}));
  auto c3 = cyclic_group_algebra(2, 3);
  auto idems = split_commutative_semisimple(c3);
  ASSERT_EQ(idems.size(), 2u);
  EXPECT_EQ(idems[0], (Vec{0, 1, 1}));  // x + x^2
  EXPECT_EQ(idems[1], (Vec{1, 1, 1}));  // 1 + x + x^2
  // oracle: the idempotents of GF(2)C3 are exactly 0, 1 and these two
  std::vector<Vec> found;
  for_each_vector(f2, 3, [&](const Vec& v) {
    if (c3.is_idempotent(v) && !is_zero(v) && v != c3.unit()) found.push_back(v);
  });
  std::sort(found.begin(), found.end());
  EXPECT_EQ(found, idems);
}

TEST(LiftIdempotent, Examples) {
  Field f2(2);
  auto t = upper_triangular_2x2(f2);
  EXPECT_EQ(lift_idempotent(t, t.unit()), t.unit());
  EXPECT_EQ(lift_idempotent(t, t.zero()), t.zero());
  // basis of the subalgebra is the echelon basis E00, E01, E11
  Vec f{1, 1, 0};
  Vec e = lift_idempotent(t, f);
  EXPECT_TRUE(t.is_idempotent(e));
  // congruent to diag(1,0) modulo the strict upper triangle
  EXPECT_EQ(e[0], 1u);
  EXPECT_EQ(e[2], 0u);
}

TEST(LiftIdempotent, ReducesToInputModuloNilpotentIdeal) {
  Rng rng(31);
  Field f(3);
  auto c = cyclic_group_algebra(3, 3);
  // GF(3)C3 x GF(3)C3 has J of dim 4 and idempotents (1,0), (0,1)
  auto a = direct_product(c, c);
  auto j = radical(a);
  for (int t = 0; t < 20; ++t) {
    Vec e(6, 0);
    e[0] = 1;
    for (auto b : j.basis()) axpy(f, rng.residue(f), b, e);
    Vec l = lift_idempotent(a, e);
    EXPECT_TRUE(a.is_idempotent(l));
    EXPECT_TRUE(j.contains(vsub(f, l, e)));
  }
}

TEST(SimpleComponents, Examples) {
  auto c3 = simple_components(cyclic_group_algebra(3, 3));
  ASSERT_EQ(c3.size(), 1u);
  EXPECT_EQ(c3[0].component_dim, 1u);
  EXPECT_EQ(c3[0].end_field_degree, 1u);

  Field f2(2);
  auto split = simple_components(direct_product(Algebra(f2, 1, {{1}}, {1}), matrix_algebra(f2, 2)));
  ASSERT_EQ(split.size(), 2u);
  std::vector<std::size_t> dims{split[0].component_dim, split[1].component_dim};
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 4}));

  auto g2c3 = simple_components(cyclic_group_algebra(2, 3));
  ASSERT_EQ(g2c3.size(), 2u);
  std::vector<std::size_t> degs{g2c3[0].end_field_degree, g2c3[1].end_field_degree};
  std::sort(degs.begin(), degs.end());
  EXPECT_EQ(degs, (std::vector<std::size_t>{1, 2}));
}

TEST(PrimitiveIdempotent, Examples) {
  Field f2(2);
  auto c = cyclic_group_algebra(2, 3);
  auto st = analyze(c);
  for (std::size_t k = 0; k < st.count(); ++k)
    EXPECT_EQ(primitive_idempotent_in(c, st, k).element, st.components[k].central_idempotent);

  auto m2 = matrix_algebra(f2, 2);
  auto sm = analyze(m2);
  auto e = primitive_idempotent_in(m2, sm, 0).element;
  EXPECT_TRUE(m2.is_idempotent(e));
  Mat em(f2, 2, 2);
  em.data = e;
  EXPECT_EQ(rank(em), 1u);

  auto l = cyclic_group_algebra(3, 3);
  EXPECT_EQ(primitive_idempotent_in(l, analyze(l), 0).element, l.unit());
}

TEST(SamePoint, Examples) {
  Field f2(2), f3(3);
  auto k = Algebra(f2, 1, {{1}}, {1});
  auto kk = direct_product(k, k);
  auto st = analyze(kk);
  EXPECT_TRUE(same_point(st, Vec{1, 0}, Vec{1, 0}));
  EXPECT_FALSE(same_point(st, Vec{1, 0}, Vec{0, 1}));
  EXPECT_THROW(same_point(st, kk.unit(), Vec{1, 0}), Error);

  auto m2 = matrix_algebra(f3, 2);
  auto sm = analyze(m2);
  Vec d10{1, 0, 0, 0}, d01{0, 0, 0, 1};
  EXPECT_TRUE(same_point(sm, d10, d01));
  // the swap conjugates one into the other
  Vec w{0, 1, 1, 0};
  EXPECT_EQ(m2.mul3(w, d10, *m2.inverse(w)), d01);
}

TEST(HomSpace, Examples) {
  Field f2(2);
  auto c3 = cyclic_group_algebra(2, 3);
  auto st = analyze(c3);
  for (std::size_t a = 0; a < st.count(); ++a)
    for (std::size_t b = 0; b < st.count(); ++b) {
      auto h = hom_space(st.simples[a].module, st.simples[b].module);
      EXPECT_EQ(h.size(), a == b ? st.simples[a].end_degree : 0u);
    }
  auto trivial = analyze(Algebra(f2, 1, {{1}}, {1}));
  EXPECT_EQ(hom_space(trivial.simples[0].module, trivial.simples[0].module).size(), 1u);
  auto c2 = cyclic_group_algebra(2, 2);
  auto reg = regular_module(c2);
  auto h = hom_space(reg, reg);
  EXPECT_EQ(h.size(), 2u);
  for (const auto& x : h) EXPECT_TRUE(intertwines(reg, reg, x));
}

TEST(ModuleIso, Examples) {
  Field f3(3);
  auto c3 = cyclic_group_algebra(3, 3);
  auto reg = regular_module(c3);
  auto self = module_iso(reg, reg);
  EXPECT_EQ(self.status, SearchStatus::Found);
  auto st = analyze(c3);
  EXPECT_EQ(module_iso(reg, st.simples[0].module).status, SearchStatus::Absent);

  // relabel the basis through x -> x^2 (swap x and x^2)
  Mat perm = Mat::from_rows(f3, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}});
  Module twisted = reg;
  for (auto& a : twisted.action) a = perm * a * perm;
  auto r = module_iso(reg, twisted);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_TRUE(intertwines(reg, twisted, *r.map));
  EXPECT_EQ(rank(*r.map), 3u);
}

TEST(ModuleIso, NonIsomorphicSameDimensionIsAbsent) {
  Field f2(2);
  // over GF(2)C3: trivial + trivial versus the 2-dim simple
  auto c3 = cyclic_group_algebra(2, 3);
  auto st = analyze(c3);
  const auto& one = st.simples[st.simples[0].module.dim == 1 ? 0 : 1].module;
  const auto& two = st.simples[st.simples[0].module.dim == 2 ? 0 : 1].module;
  Module sum{f2, 2, {}, one.gens};
  for (const auto& a : one.action) {
    Mat m(f2, 2, 2);
    m(0, 0) = m(1, 1) = a(0, 0);
    sum.action.push_back(m);
  }
  EXPECT_EQ(module_iso(sum, two).status, SearchStatus::Absent);
}

// Random matrix algebras: radical against the brute-force characterisation
// J = {x : yx nilpotent for every y}, plus the structural invariants.
TEST(AlgebraStructure, RandomMatrixAlgebras) {
  Rng rng(4242);
  int checked = 0;
  for (int t = 0; t < 60 && checked < 25; ++t) {
    const std::uint32_t p = t % 2 ? 2 : 3;
    Field f(p);
    const std::size_t n = 3;
    std::vector<Mat> gens;
    for (int g = 0; g < 2; ++g) gens.push_back(bftest::random_mat(f, n, n, rng, 2 + t % 3));
    auto ma = bftest::generated_matrix_algebra(f, n, gens);
    const auto& a = ma.alg;
    if (std::pow(double(p), double(a.dim())) > 5000) continue;
    ++checked;
    MeataxeOptions opt{static_cast<std::uint64_t>(t), 200};
    auto st = analyze(a, opt);

    std::size_t nil_count = 0;
    for_each_vector(f, a.dim(), [&](const Vec& x) {
      bool all = true;
      for_each_vector(f, a.dim(), [&](const Vec& y) { all = all && is_nilpotent(a, a.mul(y, x)); });
      if (all) {
        ++nil_count;
        EXPECT_TRUE(st.radical.contains(x));
      }
    });
    EXPECT_EQ(static_cast<double>(nil_count), std::pow(double(p), double(st.radical.dim())));

    EXPECT_TRUE(nilpotency_index(a, st.radical).has_value());
    auto q = quotient_algebra(a, st.radical);
    EXPECT_EQ(radical(q.alg).dim(), 0u);

    std::size_t total = st.radical.dim();
    for (const auto& c : st.components) total += c.component_dim;
    EXPECT_EQ(total, a.dim());

    auto prims = decompose_idempotent(a, st, a.unit());
    Vec sum = a.zero();
    for (std::size_t i = 0; i < prims.size(); ++i) {
      EXPECT_TRUE(a.is_idempotent(prims[i].element));
      EXPECT_EQ(component_of(st, prims[i].element), prims[i].component_index);
      sum = vadd(f, sum, prims[i].element);
      for (std::size_t k = 0; k < prims.size(); ++k) {
        if (k != i) {
          EXPECT_TRUE(is_zero(a.mul(prims[i].element, prims[k].element)));
        }
      }
    }
    EXPECT_EQ(sum, a.unit());
    std::size_t expected = 0;
    for (const auto& s : st.simples) expected += s.matrix_size;
    EXPECT_EQ(prims.size(), expected);
  }
  EXPECT_GE(checked, 10);
}
