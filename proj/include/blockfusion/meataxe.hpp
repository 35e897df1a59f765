#pragma once

/**
 * @file meataxe.hpp
 * @brief Module chopping over GF(p): Norton's irreducibility test, composition
 *        factors, intertwiner spaces and isomorphism search.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "blockfusion/algebra.hpp"
#include "blockfusion/poly.hpp"

namespace blockfusion {

inline constexpr int kDefaultMeataxeBudget = 200;

struct MeataxeOptions {
  std::uint64_t seed = 1;
  int budget = kDefaultMeataxeBudget;
};

/// Outcome of one Norton search: either irreducible, or a proper submodule.
struct NortonResult {
  bool irreducible = false;
  std::optional<Subspace> submodule;
};

inline NortonResult norton_split(const Module& m, Rng& rng, int budget) {
  const auto& f = m.field;
  const std::size_t n = m.dim;
  if (n <= 1) return {true, std::nullopt};
  const auto gens = m.generator_actions();
  const auto gens_t = transposed(gens);
  for (int attempt = 0; attempt < budget; ++attempt) {
    Mat theta(f, n, n);
    for (const auto& a : m.action) axpy(f, rng.residue(f), a.data, theta.data);
    const auto factors = poly::distinct_irreducible_factors(f, poly::charpoly(theta), rng);
    for (const auto& fac : factors) {
      const Mat ft = poly::eval(fac, theta);
      const Mat ker = nullspace(ft);
      Subspace s = spin(f, n, {ker.col(0)}, gens);
      if (s.dim() < n) return {false, std::move(s)};
      if (ker.cols != static_cast<std::size_t>(poly::degree(fac))) continue;
      const Mat ker_t = nullspace(transpose(ft));
      Subspace t = spin(f, n, {ker_t.col(0)}, gens_t);
      if (t.dim() == n) return {true, std::nullopt};
      // the annihilator of an invariant subspace of the dual is a submodule
      Mat perp = nullspace(Mat::from_row_vectors(f, n, t.basis()));
      return {false, Subspace(f, n, perp.columns())};
    }
  }
  throw Error("meataxe: retry budget exhausted");
}

namespace detail {

inline void chop(const Module& m, Rng& rng, int budget, std::vector<Module>& out) {
  auto r = norton_split(m, rng, budget);
  if (r.irreducible) {
    out.push_back(m);
    return;
  }
  chop(restrict_to(m, *r.submodule), rng, budget, out);
  chop(quotient_module(m, *r.submodule), rng, budget, out);
}

}  // namespace detail

/// Composition factors, bottom to top along the chosen series.
inline std::vector<Module> composition_factors(const Module& m, const MeataxeOptions& opt = {}) {
  Rng rng(opt.seed);
  std::vector<Module> out;
  if (m.dim > 0) detail::chop(m, rng, opt.budget, out);
  return out;
}

inline bool is_irreducible(const Module& m, const MeataxeOptions& opt = {}) {
  Rng rng(opt.seed);
  return m.dim > 0 && norton_split(m, rng, opt.budget).irreducible;
}

/// Basis of Hom_A(m, n): matrices X (n.dim x m.dim) with X m(a) = n(a) X.
inline std::vector<Mat> hom_space(const Module& m, const Module& n) {
  const auto& f = m.field;
  const std::size_t dm = m.dim, dn = n.dim, u = dm * dn;
  if (u == 0) return {};
  EchelonBuilder rows(f, u);
  for (auto g : m.gens) {
    const Mat& a = m.action[g];
    const Mat& b = n.action[g];
    for (std::size_t r = 0; r < dn && rows.dim() < u; ++r)
      for (std::size_t c = 0; c < dm && rows.dim() < u; ++c) {
        // (X a - b X)(r, c)
        Vec eq(u, 0);
        for (std::size_t k = 0; k < dm; ++k)
          if (a(k, c)) eq[r * dm + k] = f.add(eq[r * dm + k], a(k, c));
        for (std::size_t k = 0; k < dn; ++k)
          if (b(r, k)) eq[k * dm + c] = f.sub(eq[k * dm + c], b(r, k));
        rows.insert(std::move(eq));
      }
  }
  Mat sys = rows.dim() ? Mat::from_row_vectors(f, u, rows.rows()) : Mat(f, 0, u);
  Mat ns = nullspace(sys);
  std::vector<Mat> out;
  for (std::size_t c = 0; c < ns.cols; ++c) {
    Mat x(f, dn, dm);
    x.data = ns.col(c);
    out.push_back(std::move(x));
  }
  return out;
}

inline bool intertwines(const Module& m, const Module& n, const Mat& x) {
  for (std::size_t g = 0; g < m.action.size(); ++g)
    if (!(x * m.action[g] == n.action[g] * x)) return false;
  return true;
}

enum class SearchStatus { Found, Absent, Inconclusive };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::Absent: return "absent";
    case SearchStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct IsoResult {
  SearchStatus status = SearchStatus::Absent;
  std::optional<Mat> map;
};

inline constexpr std::uint64_t kExhaustiveCap = 1000000;

/// Find an invertible element in the span of `basis` (square matrices), trying
/// basis elements, then pairs, then seeded random combinations, then all
/// combinations when the span is small enough.
inline IsoResult find_invertible(const std::vector<Mat>& basis, const Field& f, std::uint64_t seed) {
  if (basis.empty()) return {SearchStatus::Absent, std::nullopt};
  const std::size_t n = basis.front().rows;
  auto ok = [&](const Mat& x) { return rank(x) == n; };
  for (const auto& b : basis)
    if (ok(b)) return {SearchStatus::Found, b};
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      for (Residue c = 1; c < f.p(); ++c) {
        Mat x = basis[i] + scale(c, basis[j]);
        if (ok(x)) return {SearchStatus::Found, x};
      }
  Rng rng(seed);
  for (int t = 0; t < 64; ++t) {
    Mat x(f, n, n);
    for (const auto& b : basis) axpy(f, rng.residue(f), b.data, x.data);
    if (ok(x)) return {SearchStatus::Found, x};
  }
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < basis.size() && total <= kExhaustiveCap; ++k) total *= f.p();
  if (basis.size() > 6 || total > kExhaustiveCap) return {SearchStatus::Inconclusive, std::nullopt};
  std::vector<Residue> c(basis.size(), 0);
  for (std::uint64_t t = 1; t < total; ++t) {
    std::size_t k = 0;
    while (++c[k] == f.p()) c[k++] = 0;
    Mat x(f, n, n);
    for (std::size_t j = 0; j < basis.size(); ++j) axpy(f, c[j], basis[j].data, x.data);
    if (ok(x)) return {SearchStatus::Found, x};
  }
  return {SearchStatus::Absent, std::nullopt};
}

/// An invertible intertwiner m -> n, proven absent, or inconclusive.
inline IsoResult module_iso(const Module& m, const Module& n, std::uint64_t seed = 1) {
  if (m.dim != n.dim || m.action.size() != n.action.size()) return {SearchStatus::Absent, std::nullopt};
  if (m.dim == 0) return {SearchStatus::Found, Mat(m.field, 0, 0)};
  return find_invertible(hom_space(m, n), m.field, seed);
}

}  // namespace blockfusion
