#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <cstdint>
#include <functional>
#include <vector>

#include "blockfusion/gfp.hpp"
#include "blockfusion/perm_group.hpp"
#include "blockfusion/poly.hpp"

namespace bftest {

using namespace blockfusion;

inline Mat random_mat(const Field& f, std::size_t r, std::size_t c, Rng& rng, int zero_bias = 0) {
  Mat m(f, r, c);
  for (auto& x : m.data) x = (zero_bias && rng.next() % zero_bias) ? 0 : rng.residue(f);
  return m;
}

/// Visit every vector of GF(p)^n (p^n must be small).
inline void for_each_vector(const Field& f, std::size_t n, const std::function<void(const Vec&)>& visit) {
  Vec v(n, 0);
  for (;;) {
    visit(v);
    std::size_t k = 0;
    while (k < n && ++v[k] == f.p()) v[k++] = 0;
    if (k == n) return;
  }
}

/// Determinant by cofactor expansion, independent of elimination code.
inline Residue det_cofactor(const Field& f, const std::vector<std::vector<Residue>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  Residue acc = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Residue>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Residue> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    Residue term = f.mul(m[0][c], det_cofactor(f, minor));
    acc = (c % 2) ? f.sub(acc, term) : f.add(acc, term);
  }
  return acc;
}

}  // namespace bftest

#include "blockfusion/algebra.hpp"

namespace bftest {

/// The subalgebra of M_n(GF(p)) generated by `mats`, as structure constants,
/// together with its basis of matrices.
struct MatrixAlgebra {
  Algebra alg;
  std::vector<Mat> basis;
};

inline MatrixAlgebra generated_matrix_algebra(const Field& f, std::size_t n, const std::vector<Mat>& mats) {
  EchelonBuilder span(f, n * n);
  std::vector<Mat> basis{Mat::identity(f, n)};
  span.insert(basis[0].data);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (const auto& g : mats) {
      Mat y = basis[k] * g;
      if (span.insert(y.data)) basis.push_back(std::move(y));
    }
  std::vector<Vec> flat;
  for (const auto& b : basis) flat.push_back(b.data);
  const Mat cols = Mat::from_columns(f, n * n, flat);
  std::vector<Vec> prods;
  for (const auto& x : basis)
    for (const auto& y : basis) prods.push_back(solve(cols, Mat::from_columns(f, n * n, {(x * y).data}))->col(0));
  return {Algebra(f, basis.size(), prods, unit_vec(basis.size(), 0)), basis};
}

inline bool is_nilpotent(const Algebra& a, const Vec& x) {
  Vec y = x;
  for (std::size_t k = 0; k <= a.dim(); ++k) {
    if (is_zero(y)) return true;
    y = a.mul(y, x);
  }
  return false;
}

inline PermGroup gen(std::size_t n, std::initializer_list<const char*> cycles) {
  std::vector<Perm> g;
  for (auto c : cycles) g.push_back(Perm::parse(c, n));
  return PermGroup::enumerate(n, g);
}

// the small groups used throughout
inline PermGroup s3() { return gen(3, {"(0 1)", "(0 1 2)"}); }
inline PermGroup c3() { return gen(3, {"(0 1 2)"}); }
inline PermGroup s4() { return gen(4, {"(0 1)", "(0 1 2 3)"}); }
inline PermGroup a4() { return gen(4, {"(0 1 2)", "(1 2 3)"}); }
inline PermGroup v4() { return gen(4, {"(0 1)(2 3)", "(0 2)(1 3)"}); }
inline PermGroup d8() { return gen(4, {"(0 1 2 3)", "(0 2)"}); }

/// Central idempotents of an algebra by enumerating its centre (given by a basis).
inline std::vector<Vec> central_idempotents_brute(const Algebra& a, const std::vector<Vec>& centre_basis) {
  const auto& f = a.field();
  std::vector<Vec> out;
  for_each_vector(f, centre_basis.size(), [&](const Vec& c) {
    Vec x(a.dim(), 0);
    for (std::size_t k = 0; k < c.size(); ++k) axpy(f, c[k], centre_basis[k], x);
    if (a.mul(x, x) == x) out.push_back(x);
  });
  return out;
}

}  // namespace bftest

#include "blockfusion/block_theory.hpp"

namespace bftest {

inline BlockExtension extension(const PermGroup& g, const PermGroup& h, std::uint32_t p, bool principal = true,
                                std::size_t index = 0) {
  Field f(p);
  auto q = quotient(g, h);
  auto kh = group_algebra(h, f);
  auto inv = g_invariant_blocks(q, kh);
  const std::size_t k = principal ? principal_block(kh, inv) : index;
  return block_extension(q, inv[k], f);
}

}  // namespace bftest
