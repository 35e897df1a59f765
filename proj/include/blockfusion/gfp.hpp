#pragma once

/**
 * @file gfp.hpp
 * @brief Dense exact linear algebra over prime fields GF(p), p <= 97.
 *
 * Everything else in the library sits on top of this: matrices are row-major
 * arrays of residues in [0, p), and every operation is exact.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blockfusion {

using Residue = std::uint32_t;
using Vec = std::vector<Residue>;

/// Library-wide error type. Carries a human readable reason.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kMaxPrime = 97;

/// The prime field GF(p). Cheap to copy (a small inverse table).
class Field {
public:
  Field() : Field(2) {}

  explicit Field(std::uint32_t p) : p_(p) {
    if (p < 2 || p > kMaxPrime)
      throw Error("field characteristic out of range [2, 97]: " + std::to_string(p));
    for (std::uint32_t d = 2; d * d <= p; ++d)
      if (p % d == 0)
        throw Error("field characteristic is not prime: " + std::to_string(p));
    inv_.assign(p, 0);
    for (std::uint32_t a = 1; a < p; ++a)
      for (std::uint32_t b = 1; b < p; ++b)
        if (a * b % p == 1) {
          inv_[a] = b;
          break;
        }
  }

  std::uint32_t p() const { return p_; }

  Residue reduce(std::int64_t x) const {
    auto r = x % static_cast<std::int64_t>(p_);
    return static_cast<Residue>(r < 0 ? r + p_ : r);
  }
  Residue add(Residue a, Residue b) const { return (a + b) % p_; }
  Residue sub(Residue a, Residue b) const { return (a + p_ - b) % p_; }
  Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const { return a * b % p_; }
  Residue inv(Residue a) const {
    if (a == 0)
      throw Error("division by zero in GF(" + std::to_string(p_) + ")");
    return inv_[a];
  }
  Residue pow(Residue a, std::uint64_t e) const {
    Residue r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  bool operator==(const Field& o) const { return p_ == o.p_; }

private:
  std::uint32_t p_;
  std::vector<Residue> inv_;
};

// ---------------------------------------------------------------------------
// Vectors

inline bool is_zero(std::span<const Residue> v) {
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

inline Vec zero_vec(std::size_t n) { return Vec(n, 0); }

inline Vec unit_vec(std::size_t n, std::size_t k) {
  Vec v(n, 0);
  v[k] = 1;
  return v;
}

/// y += c * x
inline void axpy(const Field& f, Residue c, std::span<const Residue> x, std::span<Residue> y) {
  if (c == 0) return;
  const auto p = f.p();
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k]) y[k] = (y[k] + c * x[k]) % p;
}

inline Vec vadd(const Field& f, const Vec& a, const Vec& b) {
  Vec r(a);
  axpy(f, 1, b, r);
  return r;
}

inline Vec vsub(const Field& f, const Vec& a, const Vec& b) {
  Vec r(a);
  axpy(f, f.neg(1), b, r);
  return r;
}

inline Vec vscale(const Field& f, Residue c, const Vec& a) {
  Vec r(a.size(), 0);
  axpy(f, c, a, r);
  return r;
}

// ---------------------------------------------------------------------------
// Matrices

struct Mat {
  Field field;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Mat() = default;
  Mat(Field f, std::size_t r, std::size_t c) : field(std::move(f)), rows(r), cols(c), data(r * c, 0) {}

  static Mat zero(const Field& f, std::size_t r, std::size_t c) { return Mat(f, r, c); }

  static Mat identity(const Field& f, std::size_t n) {
    Mat m(f, n, n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1;
    return m;
  }

  static Mat from_rows(const Field& f, const std::vector<std::vector<std::int64_t>>& rs) {
    const std::size_t c = rs.empty() ? 0 : rs.front().size();
    Mat m(f, rs.size(), c);
    for (std::size_t r = 0; r < rs.size(); ++r) {
      if (rs[r].size() != c) throw Error("ragged matrix rows");
      for (std::size_t k = 0; k < c; ++k) m(r, k) = f.reduce(rs[r][k]);
    }
    return m;
  }

  /// Matrix whose columns are the given vectors (all of length n).
  static Mat from_columns(const Field& f, std::size_t n, const std::vector<Vec>& cs) {
    Mat m(f, n, cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c)
      for (std::size_t r = 0; r < n; ++r) m(r, c) = cs[c][r];
    return m;
  }

  static Mat from_row_vectors(const Field& f, std::size_t n, const std::vector<Vec>& rs) {
    Mat m(f, rs.size(), n);
    for (std::size_t r = 0; r < rs.size(); ++r)
      std::copy(rs[r].begin(), rs[r].end(), m.data.begin() + r * n);
    return m;
  }

  Residue& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Residue operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<Residue> row_span(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const Residue> row_span(std::size_t r) const { return {data.data() + r * cols, cols}; }

  Vec row(std::size_t r) const { return Vec(data.begin() + r * cols, data.begin() + (r + 1) * cols); }
  Vec col(std::size_t c) const {
    Vec v(rows);
    for (std::size_t r = 0; r < rows; ++r) v[r] = (*this)(r, c);
    return v;
  }
  std::vector<Vec> columns() const {
    std::vector<Vec> out;
    out.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) out.push_back(col(c));
    return out;
  }

  bool is_zero() const { return blockfusion::is_zero(data); }
  bool is_square() const { return rows == cols; }

  bool operator==(const Mat& o) const {
    return field == o.field && rows == o.rows && cols == o.cols && data == o.data;
  }
};

inline Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw Error("matrix product dimension mismatch");
  const auto& f = a.field;
  const auto p = f.p();
  Mat c(f, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    auto crow = c.row_span(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Residue x = a(i, k);
      if (!x) continue;
      auto brow = b.row_span(k);
      for (std::size_t j = 0; j < b.cols; ++j)
        if (brow[j]) crow[j] = (crow[j] + x * brow[j]) % p;
    }
  }
  return c;
}

inline Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw Error("matrix sum dimension mismatch");
  Mat c(a);
  axpy(a.field, 1, b.data, c.data);
  return c;
}

inline Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw Error("matrix difference dimension mismatch");
  Mat c(a);
  axpy(a.field, a.field.neg(1), b.data, c.data);
  return c;
}

inline Mat scale(Residue s, const Mat& a) {
  Mat c(a.field, a.rows, a.cols);
  axpy(a.field, s, a.data, c.data);
  return c;
}

/// m * v for a column vector v.
inline Vec mat_vec(const Mat& m, std::span<const Residue> v) {
  if (v.size() != m.cols) throw Error("matrix-vector dimension mismatch");
  const auto p = m.field.p();
  Vec out(m.rows, 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::uint64_t acc = 0;
    auto row = m.row_span(r);
    for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * v[c];
    out[r] = static_cast<Residue>(acc % p);
  }
  return out;
}

inline Mat transpose(const Mat& m) {
  Mat t(m.field, m.cols, m.rows);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  return t;
}

/// Stack matrices vertically (all must share the column count).
inline Mat vstack(const std::vector<Mat>& ms) {
  if (ms.empty()) throw Error("vstack of nothing");
  Mat out(ms.front().field, 0, ms.front().cols);
  for (const auto& m : ms) {
    if (m.cols != out.cols) throw Error("vstack column mismatch");
    out.data.insert(out.data.end(), m.data.begin(), m.data.end());
    out.rows += m.rows;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elimination

struct Echelon {
  Mat reduced;                      ///< reduced row echelon form (zero rows dropped)
  std::vector<std::size_t> pivots;  ///< pivot column of each kept row
};

inline Echelon rref(Mat m) {
  const auto& f = m.field;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = r;
    while (piv < m.rows && m(piv, c) == 0) ++piv;
    if (piv == m.rows) continue;
    if (piv != r)
      for (std::size_t k = 0; k < m.cols; ++k) std::swap(m(piv, k), m(r, k));
    const Residue inv = f.inv(m(r, c));
    for (auto& x : m.row_span(r)) x = f.mul(x, inv);
    for (std::size_t o = 0; o < m.rows; ++o) {
      if (o == r || m(o, c) == 0) continue;
      axpy(f, f.neg(m(o, c)), m.row_span(r), m.row_span(o));
    }
    pivots.push_back(c);
    ++r;
  }
  m.data.resize(r * m.cols);
  m.rows = r;
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Mat& m) { return rref(m).pivots.size(); }

/// Basis of {x : m x = 0}, returned as the columns of a cols x (cols - rank) matrix.
inline Mat nullspace(const Mat& m) {
  auto [red, piv] = rref(m);
  const auto& f = m.field;
  std::vector<bool> is_pivot(m.cols, false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    Vec v(m.cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = f.neg(red(r, free));
    basis.push_back(std::move(v));
  }
  return Mat::from_columns(f, m.cols, basis);
}

/// Some x with a x = b, or nothing when the system is inconsistent.
inline std::optional<Mat> solve(const Mat& a, const Mat& b) {
  if (a.rows != b.rows) throw Error("solve: row count mismatch");
  const auto& f = a.field;
  Mat aug(f, a.rows, a.cols + b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) aug(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols; ++c) aug(r, a.cols + c) = b(r, c);
  }
  auto [red, piv] = rref(std::move(aug));
  Mat x(f, a.cols, b.cols);
  for (std::size_t r = 0; r < piv.size(); ++r) {
    if (piv[r] >= a.cols) return std::nullopt;
    for (std::size_t c = 0; c < b.cols; ++c) x(piv[r], c) = red(r, a.cols + c);
  }
  return x;
}

inline std::optional<Mat> inverse(const Mat& m) {
  if (!m.is_square()) return std::nullopt;
  if (rank(m) != m.rows) return std::nullopt;
  return solve(m, Mat::identity(m.field, m.rows));
}

inline Mat kron(const Mat& a, const Mat& b) {
  const auto& f = a.field;
  Mat k(f, a.rows * b.rows, a.cols * b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      const Residue x = a(i, j);
      if (!x) continue;
      for (std::size_t r = 0; r < b.rows; ++r)
        for (std::size_t c = 0; c < b.cols; ++c) k(i * b.rows + r, j * b.cols + c) = f.mul(x, b(r, c));
    }
  return k;
}

// ---------------------------------------------------------------------------
// Subspaces

/// A subspace of GF(p)^n held in reduced row echelon form. Coordinates of a
/// member with respect to the stored basis are its entries at pivot columns.
class Subspace {
public:
  Subspace() = default;
  Subspace(Field f, std::size_t ambient) : field_(std::move(f)), n_(ambient), basis_(field_, 0, ambient) {}

  Subspace(Field f, std::size_t ambient, const std::vector<Vec>& spanning)
      : field_(std::move(f)), n_(ambient) {
    auto e = rref(Mat::from_row_vectors(field_, n_, spanning));
    basis_ = std::move(e.reduced);
    pivots_ = std::move(e.pivots);
    if (spanning.empty()) basis_ = Mat(field_, 0, n_);
  }

  const Field& field() const { return field_; }
  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return pivots_.size(); }
  Vec basis_vector(std::size_t k) const { return basis_.row(k); }
  std::vector<Vec> basis() const {
    std::vector<Vec> out;
    for (std::size_t k = 0; k < dim(); ++k) out.push_back(basis_.row(k));
    return out;
  }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Coordinates of v, or nothing when v is not in the subspace.
  std::optional<Vec> coords(std::span<const Residue> v) const {
    Vec c(dim());
    Vec rest(v.begin(), v.end());
    for (std::size_t k = 0; k < dim(); ++k) {
      c[k] = rest[pivots_[k]];
      axpy(field_, field_.neg(c[k]), basis_.row_span(k), rest);
    }
    if (!blockfusion::is_zero(rest)) return std::nullopt;
    return c;
  }

  bool contains(std::span<const Residue> v) const { return coords(v).has_value(); }

  Vec combine(std::span<const Residue> c) const {
    Vec v(n_, 0);
    for (std::size_t k = 0; k < dim(); ++k) axpy(field_, c[k], basis_.row_span(k), v);
    return v;
  }

  bool contains(const Subspace& o) const {
    for (std::size_t k = 0; k < o.dim(); ++k)
      if (!contains(o.basis_.row_span(k))) return false;
    return true;
  }

  bool operator==(const Subspace& o) const { return dim() == o.dim() && contains(o); }

private:
  Field field_;
  std::size_t n_ = 0;
  Mat basis_;
  std::vector<std::size_t> pivots_;
};

/// Intersection of subspaces via the nullspace of [U; -W].
inline Subspace intersect(const Subspace& u, const Subspace& w) {
  const auto& f = u.field();
  const std::size_t n = u.ambient_dim();
  if (u.dim() == 0 || w.dim() == 0) return Subspace(f, n);
  std::vector<Vec> cols;
  for (auto& b : u.basis()) cols.push_back(b);
  for (auto& b : w.basis()) cols.push_back(vscale(f, f.neg(1), b));
  Mat ns = nullspace(Mat::from_columns(f, n, cols));
  std::vector<Vec> span;
  for (std::size_t c = 0; c < ns.cols; ++c) {
    Vec v(n, 0);
    for (std::size_t k = 0; k < u.dim(); ++k) axpy(f, ns(k, c), u.basis_vector(k), v);
    span.push_back(std::move(v));
  }
  return Subspace(f, n, span);
}

/// Incremental echelon form for building spans one vector at a time.
class EchelonBuilder {
public:
  EchelonBuilder(Field f, std::size_t n) : field_(std::move(f)), n_(n) {}

  /// Reduce v in place against the stored rows.
  void reduce(Vec& v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Residue c = v[pivots_[k]];
      if (c) axpy(field_, field_.neg(c), rows_[k], v);
    }
  }

  /// Insert v; returns true when it enlarged the span.
  bool insert(Vec v) {
    reduce(v);
    std::size_t piv = 0;
    while (piv < n_ && v[piv] == 0) ++piv;
    if (piv == n_) return false;
    const Residue inv = field_.inv(v[piv]);
    for (auto& x : v) x = field_.mul(x, inv);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Residue c = rows_[k][piv];
      if (c) axpy(field_, field_.neg(c), v, rows_[k]);
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
  }

  bool in_span(Vec v) const {
    reduce(v);
    return blockfusion::is_zero(v);
  }

  std::size_t dim() const { return rows_.size(); }
  std::size_t ambient_dim() const { return n_; }
  Subspace subspace() const { return Subspace(field_, n_, rows_); }
  const std::vector<Vec>& rows() const { return rows_; }

private:
  Field field_;
  std::size_t n_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace blockfusion
