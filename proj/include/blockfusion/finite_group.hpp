#pragma once

/**
 * @file finite_group.hpp
 * @brief Abstract finite groups by multiplication table (grading groups such
 *        as G/H, E and F), and the quotient map G -> G/H.
 */

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blockfusion/perm_group.hpp"

namespace blockfusion {

/// A finite group on {0, ..., n-1} with 0 the identity.
class FiniteGroup {
public:
  FiniteGroup() : FiniteGroup(std::vector<std::size_t>{0}, 1) {}

  FiniteGroup(std::vector<std::size_t> table, std::size_t n) : n_(n), table_(std::move(table)), inv_(n, n) {
    if (n == 0 || table_.size() != n * n) throw Error("group table has wrong size");
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<bool> row(n, false);
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t c = table_[a * n + b];
        if (c >= n || row[c]) throw Error("group table is not a Latin square");
        row[c] = true;
        if (c == 0) inv_[a] = b;
      }
      if (mul(0, a) != a || mul(a, 0) != a) throw Error("element 0 is not the identity");
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw Error("group table is not associative");
  }

  static FiniteGroup trivial() { return FiniteGroup(); }

  static FiniteGroup from_perm_group(const PermGroup& g) {
    const std::size_t n = g.order();
    std::vector<std::size_t> t(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a * n + b] = g.index(g.element(a) * g.element(b));
    return FiniteGroup(std::move(t), n);
  }

  /// Cyclic group of order n, element k standing for the k-th power.
  static FiniteGroup cyclic(std::size_t n) {
    std::vector<std::size_t> t(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a * n + b] = (a + b) % n;
    return FiniteGroup(std::move(t), n);
  }

  std::size_t order() const { return n_; }
  std::size_t mul(std::size_t a, std::size_t b) const { return table_[a * n_ + b]; }
  std::size_t inv(std::size_t a) const { return inv_[a]; }
  const std::vector<std::size_t>& table() const { return table_; }

  std::size_t element_order(std::size_t a) const {
    std::size_t k = 1;
    for (std::size_t x = a; x != 0; x = mul(x, a)) ++k;
    return k;
  }

  bool is_abelian() const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  /// Greedy generating set, scanning elements in index order.
  std::vector<std::size_t> generators() const {
    std::vector<std::size_t> gens;
    std::vector<bool> in(n_, false);
    in[0] = true;
    std::size_t covered = 1;
    for (std::size_t x = 1; x < n_ && covered < n_; ++x) {
      if (in[x]) continue;
      gens.push_back(x);
      std::vector<std::size_t> queue;
      for (std::size_t y = 0; y < n_; ++y)
        if (in[y]) queue.push_back(y);
      for (std::size_t k = 0; k < queue.size(); ++k)
        for (auto s : gens) {
          const std::size_t z = mul(queue[k], s);
          if (!in[z]) {
            in[z] = true;
            ++covered;
            queue.push_back(z);
          }
        }
    }
    return gens;
  }

  /// True when `map` (indexed by elements of this group) is a homomorphism into `to`.
  bool is_homomorphism(const std::vector<std::size_t>& map, const FiniteGroup& to) const {
    if (map.size() != n_) return false;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (map[mul(a, b)] != to.mul(map[a], map[b])) return false;
    return true;
  }

  bool is_isomorphism(const std::vector<std::size_t>& map, const FiniteGroup& to) const {
    if (to.order() != n_ || !is_homomorphism(map, to)) return false;
    std::vector<bool> hit(n_, false);
    for (auto y : map) {
      if (y >= n_ || hit[y]) return false;
      hit[y] = true;
    }
    return true;
  }

  /// Some isomorphism onto `to` satisfying `accept`, by backtracking over
  /// generator images.
  std::optional<std::vector<std::size_t>> find_isomorphism(
      const FiniteGroup& to,
      const std::function<bool(const std::vector<std::size_t>&)>& accept = nullptr) const {
    if (to.order() != n_) return std::nullopt;
    const auto gens = generators();
    std::vector<std::size_t> images(gens.size());
    std::optional<std::vector<std::size_t>> found;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (found) return;
      if (k == gens.size()) {
        auto m = extend(gens, images, to);
        if (m && is_isomorphism(*m, to) && (!accept || accept(*m))) found = std::move(m);
        return;
      }
      for (std::size_t y = 0; y < n_ && !found; ++y) {
        if (to.element_order(y) != element_order(gens[k])) continue;
        images[k] = y;
        rec(k + 1);
      }
    };
    rec(0);
    return found;
  }

  /// Extend generator images to the whole group, or nothing if inconsistent
  /// along the breadth-first spanning tree (a full check is done by callers).
  std::optional<std::vector<std::size_t>> extend(const std::vector<std::size_t>& gens,
                                                 const std::vector<std::size_t>& images,
                                                 const FiniteGroup& to) const {
    std::vector<std::size_t> m(n_, to.order());
    m[0] = 0;
    std::vector<std::size_t> queue{0};
    for (std::size_t k = 0; k < queue.size(); ++k)
      for (std::size_t s = 0; s < gens.size(); ++s) {
        const std::size_t z = mul(queue[k], gens[s]);
        const std::size_t img = to.mul(m[queue[k]], images[s]);
        if (m[z] == to.order()) {
          m[z] = img;
          queue.push_back(z);
        } else if (m[z] != img) {
          return std::nullopt;
        }
      }
    if (queue.size() != n_) return std::nullopt;
    return m;
  }

private:
  std::size_t n_;
  std::vector<std::size_t> table_;
  std::vector<std::size_t> inv_;
};

/// G together with a normal subgroup H and the quotient map omega: G -> G/H.
/// Cosets are numbered by first appearance in G's element order, so the
/// identity coset is 0 and reps[c] is the first element of coset c.
struct QuotientSetup {
  PermGroup g;
  PermGroup h;
  std::vector<std::size_t> reps;   ///< element index in g of each coset representative
  std::vector<std::size_t> omega;  ///< element index in g -> coset index
  FiniteGroup gbar;

  std::size_t coset_of(const Perm& x) const { return omega[g.index(x)]; }
};

inline QuotientSetup quotient(const PermGroup& g, const PermGroup& h) {
  if (!h.is_normal_in(g)) throw Error("quotient: subgroup is not normal");
  QuotientSetup q{g, h, {}, std::vector<std::size_t>(g.order(), g.order()), {}};
  for (std::size_t k = 0; k < g.order(); ++k) {
    if (q.omega[k] != g.order()) continue;
    const std::size_t c = q.reps.size();
    q.reps.push_back(k);
    for (const auto& y : h.elements()) q.omega[g.index(g.element(k) * y)] = c;
  }
  const std::size_t n = q.reps.size();
  std::vector<std::size_t> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = q.coset_of(g.element(q.reps[a]) * g.element(q.reps[b]));
  q.gbar = FiniteGroup(std::move(t), n);
  return q;
}

}  // namespace blockfusion
