#pragma once

/**
 * @file poly.hpp
 * @brief Univariate polynomials over GF(p): characteristic polynomials,
 *        evaluation at matrices, and factorisation into distinct irreducibles.
 */

#include <cstdint>
#include <random>
#include <vector>

#include "blockfusion/gfp.hpp"

namespace blockfusion {

/// Deterministic generator used everywhere randomness is needed. Draws are
/// reduced with `%` so sequences are identical on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  Residue residue(const Field& f) { return static_cast<Residue>(gen_() % f.p()); }
  Vec vec(const Field& f, std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = residue(f);
    return v;
  }

private:
  std::mt19937_64 gen_;
};

/// Derive an independent stream for a named sub-computation.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Coefficients low degree first; no trailing zeros (the zero polynomial is empty).
using Poly = std::vector<Residue>;

namespace poly {

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly x_power(std::size_t k) {
  Poly a(k + 1, 0);
  a[k] = 1;
  return a;
}

inline Poly constant(Residue c) { return c ? Poly{c} : Poly{}; }

inline Poly add(const Field& f, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = f.add(r[k], b[k]);
  trim(r);
  return r;
}

inline Poly sub(const Field& f, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = f.sub(r[k], b[k]);
  trim(r);
  return r;
}

inline Poly mul(const Field& f, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % f.p();
  }
  trim(r);
  return r;
}

inline Poly scale(const Field& f, Residue c, const Poly& a) {
  Poly r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = f.mul(c, a[k]);
  trim(r);
  return r;
}

inline Poly monic(const Field& f, const Poly& a) {
  if (a.empty()) return a;
  return scale(f, f.inv(a.back()), a);
}

/// Quotient and remainder of a by nonzero b.
inline std::pair<Poly, Poly> divmod(const Field& f, Poly a, const Poly& b) {
  if (b.empty()) throw Error("polynomial division by zero");
  trim(a);
  if (a.size() < b.size()) return {Poly{}, a};
  Poly q(a.size() - b.size() + 1, 0);
  const Residue lead_inv = f.inv(b.back());
  for (std::size_t s = q.size(); s-- > 0;) {
    const Residue c = f.mul(a[s + b.size() - 1], lead_inv);
    q[s] = c;
    if (c)
      for (std::size_t j = 0; j < b.size(); ++j) a[s + j] = f.sub(a[s + j], f.mul(c, b[j]));
  }
  trim(q);
  trim(a);
  return {q, a};
}

inline Poly mod(const Field& f, const Poly& a, const Poly& b) { return divmod(f, a, b).second; }

inline Poly gcd(const Field& f, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(f, a);
}

inline Poly mulmod(const Field& f, const Poly& a, const Poly& b, const Poly& m) { return mod(f, mul(f, a, b), m); }

inline Poly powmod(const Field& f, Poly a, std::uint64_t e, const Poly& m) {
  Poly r = mod(f, Poly{1}, m);
  a = mod(f, a, m);
  while (e) {
    if (e & 1) r = mulmod(f, r, a, m);
    a = mulmod(f, a, a, m);
    e >>= 1;
  }
  return r;
}

inline Residue eval(const Field& f, const Poly& a, Residue x) {
  Residue r = 0;
  for (std::size_t k = a.size(); k-- > 0;) r = f.add(f.mul(r, x), a[k]);
  return r;
}

/// Evaluate a at a square matrix by Horner's rule.
inline Mat eval(const Poly& a, const Mat& m) {
  const auto& f = m.field;
  Mat r(f, m.rows, m.cols);
  for (std::size_t k = a.size(); k-- > 0;) {
    r = r * m;
    for (std::size_t d = 0; d < m.rows; ++d) r(d, d) = f.add(r(d, d), a[k]);
  }
  return r;
}

/// Characteristic polynomial det(xI - m), via reduction to Hessenberg form.
inline Poly charpoly(Mat h) {
  if (!h.is_square()) throw Error("charpoly of non-square matrix");
  const auto& f = h.field;
  const std::size_t n = h.rows;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t piv = k + 1;
    while (piv < n && h(piv, k) == 0) ++piv;
    if (piv == n) continue;
    if (piv != k + 1) {
      for (std::size_t c = 0; c < n; ++c) std::swap(h(piv, c), h(k + 1, c));
      for (std::size_t r = 0; r < n; ++r) std::swap(h(r, piv), h(r, k + 1));
    }
    const Residue inv = f.inv(h(k + 1, k));
    for (std::size_t r = k + 2; r < n; ++r) {
      const Residue t = f.mul(h(r, k), inv);
      if (!t) continue;
      for (std::size_t c = 0; c < n; ++c) h(r, c) = f.sub(h(r, c), f.mul(t, h(k + 1, c)));
      for (std::size_t rr = 0; rr < n; ++rr) h(rr, k + 1) = f.add(h(rr, k + 1), f.mul(t, h(rr, r)));
    }
  }
  // p_m = (x - h_mm) p_{m-1} - sum_i h_{m-i,m} (prod of subdiagonal) p_{m-i-1}, 1-indexed
  std::vector<Poly> ps(n + 1);
  ps[0] = Poly{1};
  for (std::size_t m = 1; m <= n; ++m) {
    ps[m] = mul(f, Poly{f.neg(h(m - 1, m - 1)), 1}, ps[m - 1]);
    Residue t = 1;
    for (std::size_t i = 1; i < m; ++i) {
      t = f.mul(t, h(m - i, m - i - 1));
      const Residue coeff = f.mul(h(m - i - 1, m - 1), t);
      if (coeff) ps[m] = sub(f, ps[m], scale(f, coeff, ps[m - i - 1]));
    }
  }
  return ps[n];
}

namespace detail {

/// Split a squarefree monic product of irreducibles of equal degree d.
inline void equal_degree_split(const Field& f, const Poly& g, int d, Rng& rng, std::vector<Poly>& out) {
  if (degree(g) == d) {
    out.push_back(g);
    return;
  }
  const std::uint32_t p = f.p();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Poly a(static_cast<std::size_t>(degree(g)));
    for (auto& c : a) c = rng.residue(f);
    trim(a);
    if (degree(a) < 1) continue;
    Poly t;
    if (p == 2) {
      // trace map a + a^2 + ... + a^(2^(d-1))
      Poly s = mod(f, a, g), acc = s;
      for (int k = 1; k < d; ++k) {
        s = mulmod(f, s, s, g);
        acc = add(f, acc, s);
      }
      t = acc;
    } else {
      // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
      Poly s = mod(f, a, g), norm = s;
      for (int k = 1; k < d; ++k) {
        s = powmod(f, s, p, g);
        norm = mulmod(f, norm, s, g);
      }
      t = sub(f, powmod(f, norm, (p - 1) / 2, g), Poly{1});
    }
    Poly h = gcd(f, g, t);
    if (degree(h) > 0 && degree(h) < degree(g)) {
      equal_degree_split(f, h, d, rng, out);
      equal_degree_split(f, divmod(f, g, h).first, d, rng, out);
      return;
    }
  }
  throw Error("equal-degree factorisation did not converge");
}

}  // namespace detail

/// Distinct monic irreducible factors of a nonzero polynomial, sorted by
/// degree then coefficients (deterministic for a given seed).
inline std::vector<Poly> distinct_irreducible_factors(const Field& f, const Poly& a, Rng& rng) {
  Poly m = monic(f, a);
  if (m.empty()) throw Error("factorisation of the zero polynomial");
  std::vector<Poly> out;
  if (degree(m) < 1) return out;
  Poly found_product{1};
  Poly xp = mod(f, Poly{0, 1}, m);
  const int n = degree(m);
  int covered = 0;
  for (int d = 1; d <= n && covered < n; ++d) {
    xp = powmod(f, xp, f.p(), m);
    Poly g = gcd(f, m, sub(f, xp, Poly{0, 1}));
    Poly lower = gcd(f, g, found_product);
    Poly fresh = divmod(f, g, lower).first;
    fresh = monic(f, fresh);
    if (degree(fresh) > 0) {
      std::vector<Poly> parts;
      detail::equal_degree_split(f, fresh, d, rng, parts);
      for (auto& q : parts) {
        found_product = mul(f, found_product, q);
        covered += d;
        out.push_back(monic(f, q));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Poly& x, const Poly& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return std::lexicographical_compare(x.rbegin(), x.rend(), y.rbegin(), y.rend());
  });
  return out;
}

/// Minimal polynomial of a square matrix (Krylov iteration on the full algebra).
inline Poly minimal_polynomial(const Mat& m) {
  const auto& f = m.field;
  const std::size_t n = m.rows;
  EchelonBuilder powers(f, n * n);
  std::vector<Vec> raw;
  Mat cur = Mat::identity(f, n);
  for (std::size_t k = 0; k <= n; ++k) {
    if (!powers.in_span(cur.data)) {
      powers.insert(cur.data);
      raw.push_back(cur.data);
      cur = cur * m;
      continue;
    }
    // cur = sum c_j m^j
    Mat sys = Mat::from_columns(f, n * n, raw);
    auto sol = solve(sys, Mat::from_columns(f, n * n, {cur.data}));
    Poly r(k + 1, 0);
    r[k] = 1;
    for (std::size_t j = 0; j < k; ++j) r[j] = f.neg((*sol)(j, 0));
    trim(r);
    return r;
  }
  throw Error("minimal polynomial: Cayley-Hamilton violated");
}

}  // namespace poly
}  // namespace blockfusion
