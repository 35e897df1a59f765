#pragma once

/**
 * @file perm_group.hpp
 * @brief Small permutation groups by full enumeration: subgroup services,
 *        quotients G -> G/H, p-subgroups and automorphism groups of p-groups.
 */

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "blockfusion/gfp.hpp"

namespace blockfusion {

inline constexpr std::size_t kDefaultOrderCap = 5000;

/// A permutation of {0, ..., n-1}. Products compose right to left:
/// (a * b)(x) = a(b(x)).
class Perm {
public:
  Perm() = default;
  explicit Perm(std::size_t n) : img_(n) { std::iota(img_.begin(), img_.end(), 0); }
  explicit Perm(std::vector<int> images) : img_(std::move(images)) {
    std::vector<bool> seen(img_.size(), false);
    for (int x : img_) {
      if (x < 0 || static_cast<std::size_t>(x) >= img_.size() || seen[x]) throw Error("images do not form a bijection");
      seen[x] = true;
    }
  }

  /// Parse disjoint-cycle notation such as "(0 1)(2 3)"; "()" is the identity.
  static Perm parse(const std::string& text, std::size_t degree) {
    std::vector<int> img(degree);
    std::iota(img.begin(), img.end(), 0);
    std::size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',' || text[pos] == '\t')) ++pos;
    };
    skip_ws();
    if (pos == text.size()) throw Error("empty permutation string");
    std::vector<bool> used(degree, false);
    while (pos < text.size()) {
      if (text[pos] != '(') throw Error("expected '(' in permutation \"" + text + "\"");
      ++pos;
      std::vector<int> cycle;
      for (;;) {
        skip_ws();
        if (pos >= text.size()) throw Error("unterminated cycle in \"" + text + "\"");
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos) throw Error("bad character in permutation \"" + text + "\"");
        const int pt = std::stoi(text.substr(pos, end - pos));
        if (pt < 0 || static_cast<std::size_t>(pt) >= degree)
          throw Error("point " + std::to_string(pt) + " outside degree " + std::to_string(degree));
        if (used[pt]) throw Error("point repeated in cycles \"" + text + "\"");
        used[pt] = true;
        cycle.push_back(pt);
        pos = end;
      }
      for (std::size_t k = 0; k < cycle.size(); ++k) img[cycle[k]] = cycle[(k + 1) % cycle.size()];
      skip_ws();
    }
    return Perm(std::move(img));
  }

  std::size_t degree() const { return img_.size(); }
  int operator()(int x) const { return img_[x]; }
  const std::vector<int>& images() const { return img_; }

  bool is_identity() const {
    for (std::size_t k = 0; k < img_.size(); ++k)
      if (img_[k] != static_cast<int>(k)) return false;
    return true;
  }

  Perm inverse() const {
    std::vector<int> inv(img_.size());
    for (std::size_t k = 0; k < img_.size(); ++k) inv[img_[k]] = static_cast<int>(k);
    Perm r;
    r.img_ = std::move(inv);
    return r;
  }

  friend Perm operator*(const Perm& a, const Perm& b) {
    if (a.degree() != b.degree()) throw Error("permutation degree mismatch");
    Perm r;
    r.img_.resize(a.img_.size());
    for (std::size_t k = 0; k < a.img_.size(); ++k) r.img_[k] = a.img_[b.img_[k]];
    return r;
  }

  bool operator==(const Perm& o) const { return img_ == o.img_; }
  bool operator<(const Perm& o) const { return img_ < o.img_; }

  std::string to_string() const {
    std::ostringstream os;
    std::vector<bool> seen(img_.size(), false);
    bool any = false;
    for (std::size_t s = 0; s < img_.size(); ++s) {
      if (seen[s] || img_[s] == static_cast<int>(s)) continue;
      os << '(';
      std::size_t x = s;
      bool first = true;
      while (!seen[x]) {
        seen[x] = true;
        os << (first ? "" : " ") << x;
        first = false;
        x = img_[x];
      }
      os << ')';
      any = true;
    }
    return any ? os.str() : "()";
  }

private:
  std::vector<int> img_;
};

struct PermHash {
  std::size_t operator()(const Perm& p) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : p.images()) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
    return h;
  }
};

/// A finite permutation group with its full element list cached. Elements are
/// indexed in breadth-first order from the identity.
class PermGroup {
public:
  PermGroup() = default;

  static PermGroup enumerate(std::size_t degree, const std::vector<Perm>& gens, std::size_t cap = kDefaultOrderCap) {
    PermGroup g;
    g.degree_ = degree;
    for (const auto& s : gens) {
      if (s.degree() != degree) throw Error("generator degree mismatch");
      if (!s.is_identity()) g.gens_.push_back(s);
    }
    g.add_element(Perm(degree));
    for (std::size_t k = 0; k < g.elements_.size(); ++k) {
      for (const auto& s : g.gens_) {
        Perm y = s * g.elements_[k];
        if (!g.index_.count(y)) {
          if (g.elements_.size() >= cap)
            throw Error("group order exceeds cap " + std::to_string(cap));
          g.add_element(std::move(y));
        }
      }
    }
    return g;
  }

  std::size_t degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Perm>& generators() const& { return gens_; }
  std::vector<Perm> generators() && { return std::move(gens_); }
  // by value on temporaries, so `for (x : group().elements())` is safe
  const std::vector<Perm>& elements() const& { return elements_; }
  std::vector<Perm> elements() && { return std::move(elements_); }
  const Perm& element(std::size_t k) const { return elements_[k]; }

  std::optional<std::size_t> index_of(const Perm& x) const {
    auto it = index_.find(x);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index(const Perm& x) const {
    auto k = index_of(x);
    if (!k) throw Error("element " + x.to_string() + " not in group");
    return *k;
  }
  bool contains(const Perm& x) const { return index_.count(x) > 0; }

  bool is_subgroup_of(const PermGroup& g) const {
    return std::all_of(gens_.begin(), gens_.end(), [&](const Perm& s) { return g.contains(s); });
  }

  bool same_elements(const PermGroup& o) const {
    return order() == o.order() && std::all_of(elements_.begin(), elements_.end(), [&](const Perm& x) { return o.contains(x); });
  }

  /// True when x S x^-1 = S.
  bool normalized_by(const Perm& x) const {
    const Perm xi = x.inverse();
    return std::all_of(gens_.begin(), gens_.end(), [&](const Perm& s) { return contains(x * s * xi); });
  }

  bool is_normal_in(const PermGroup& g) const {
    return is_subgroup_of(g) &&
           std::all_of(g.gens_.begin(), g.gens_.end(), [&](const Perm& x) { return normalized_by(x); });
  }

  bool is_abelian() const {
    for (std::size_t a = 0; a < gens_.size(); ++a)
      for (std::size_t b = a + 1; b < gens_.size(); ++b)
        if (!(gens_[a] * gens_[b] == gens_[b] * gens_[a])) return false;
    return true;
  }

  /// Subgroup with the given elements; generators chosen greedily in the
  /// order given so the result is deterministic.
  static PermGroup from_elements(std::size_t degree, const std::vector<Perm>& elems) {
    std::vector<Perm> gens;
    PermGroup cur = enumerate(degree, {});
    for (const auto& x : elems) {
      if (cur.contains(x)) continue;
      gens.push_back(x);
      cur = enumerate(degree, gens);
    }
    if (cur.order() != elems.size()) throw Error("element list is not a subgroup");
    return cur;
  }

  /// Sorted element list, used as a canonical key for subgroups.
  std::vector<Perm> sorted_elements() const {
    auto s = elements_;
    std::sort(s.begin(), s.end());
    return s;
  }

  int element_order(const Perm& x) const {
    int k = 1;
    Perm y = x;
    while (!y.is_identity()) {
      y = y * x;
      ++k;
    }
    return k;
  }

private:
  void add_element(Perm x) {
    index_.emplace(x, elements_.size());
    elements_.push_back(std::move(x));
  }

  std::size_t degree_ = 0;
  std::vector<Perm> gens_;
  std::vector<Perm> elements_;
  std::unordered_map<Perm, std::size_t, PermHash> index_;
};

inline PermGroup normalizer(const PermGroup& g, const PermGroup& s) {
  std::vector<Perm> keep;
  for (const auto& x : g.elements())
    if (s.normalized_by(x)) keep.push_back(x);
  return PermGroup::from_elements(g.degree(), keep);
}

inline PermGroup centralizer(const PermGroup& g, const PermGroup& s) {
  std::vector<Perm> keep;
  for (const auto& x : g.elements()) {
    bool ok = std::all_of(s.generators().begin(), s.generators().end(), [&](const Perm& t) { return x * t == t * x; });
    if (ok) keep.push_back(x);
  }
  return PermGroup::from_elements(g.degree(), keep);
}

inline PermGroup intersection(const PermGroup& a, const PermGroup& b) {
  std::vector<Perm> keep;
  for (const auto& x : a.elements())
    if (b.contains(x)) keep.push_back(x);
  return PermGroup::from_elements(a.degree(), keep);
}

/// Conjugate subgroup x S x^-1.
inline PermGroup conjugate(const PermGroup& s, const Perm& x) {
  std::vector<Perm> gens;
  const Perm xi = x.inverse();
  for (const auto& t : s.generators()) gens.push_back(x * t * xi);
  return PermGroup::enumerate(s.degree(), gens);
}

inline bool is_p_power(std::size_t n, std::uint32_t p) {
  if (n == 0) return false;
  while (n % p == 0) n /= p;
  return n == 1;
}

/// All subgroups of p-power order, each once, sorted by order then elements.
inline std::vector<PermGroup> p_subgroups(const PermGroup& g, std::uint32_t p, std::size_t cap = kDefaultOrderCap) {
  std::vector<Perm> p_elements;
  for (const auto& x : g.elements())
    if (!x.is_identity() && is_p_power(static_cast<std::size_t>(g.element_order(x)), p)) p_elements.push_back(x);
  std::map<std::vector<Perm>, PermGroup> found;
  std::vector<PermGroup> queue{PermGroup::enumerate(g.degree(), {})};
  found.emplace(queue.front().sorted_elements(), queue.front());
  for (std::size_t k = 0; k < queue.size(); ++k) {
    for (const auto& x : p_elements) {
      if (queue[k].contains(x)) continue;
      auto gens = queue[k].generators();
      gens.push_back(x);
      PermGroup t = PermGroup::enumerate(g.degree(), gens, cap);
      if (!is_p_power(t.order(), p)) continue;
      auto key = t.sorted_elements();
      if (found.count(key)) continue;
      if (found.size() >= cap) throw Error("p-subgroup count exceeds cap");
      found.emplace(key, t);
      queue.push_back(t);
    }
  }
  std::vector<PermGroup> out;
  for (auto& [key, grp] : found) out.push_back(grp);
  std::stable_sort(out.begin(), out.end(), [](const PermGroup& a, const PermGroup& b) { return a.order() < b.order(); });
  return out;
}

/// Automorphism of a permutation group, as a map on element indices.
using ElementMap = std::vector<std::size_t>;

inline ElementMap compose(const ElementMap& a, const ElementMap& b) {
  ElementMap r(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = a[b[k]];
  return r;
}

inline ElementMap inverse(const ElementMap& a) {
  ElementMap r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[a[k]] = k;
  return r;
}

inline ElementMap identity_map(std::size_t n) {
  ElementMap r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

/// Conjugation u -> x u x^-1 restricted to a subgroup normalised by x.
inline ElementMap conjugation_map(const PermGroup& p, const Perm& x) {
  ElementMap r(p.order());
  const Perm xi = x.inverse();
  for (std::size_t k = 0; k < p.order(); ++k) r[k] = p.index(x * p.element(k) * xi);
  return r;
}

/// All automorphisms of a group of order at most 64, found by brute force over
/// images of its generators. Sorted, so the identity comes first.
inline std::vector<ElementMap> aut_group(const PermGroup& grp) {
  if (grp.order() > 64) throw Error("aut_group: order cap 64 exceeded");
  const auto& gens = grp.generators();
  const std::size_t n = grp.order();
  std::vector<std::vector<std::size_t>> mult(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) mult[a][b] = grp.index(grp.element(a) * grp.element(b));

  // enumerate() lists elements breadth first as gens[which[y]] * parent[y]
  std::vector<std::size_t> parent(n, 0), which(n, 0);
  std::vector<bool> seen(n, false);
  seen[0] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t s = 0; s < gens.size(); ++s) {
      const std::size_t y = grp.index(gens[s] * grp.element(k));
      if (!seen[y]) {
        seen[y] = true;
        parent[y] = k;
        which[y] = s;
      }
    }

  std::vector<std::vector<std::size_t>> candidates(gens.size());
  for (std::size_t s = 0; s < gens.size(); ++s) {
    const int o = grp.element_order(gens[s]);
    for (std::size_t k = 0; k < n; ++k)
      if (grp.element_order(grp.element(k)) == o) candidates[s].push_back(k);
  }

  std::vector<ElementMap> out;
  std::vector<std::size_t> choice(gens.size(), 0);
  for (;;) {
    ElementMap phi(n, 0);
    for (std::size_t y = 1; y < n; ++y) phi[y] = mult[candidates[which[y]][choice[which[y]]]][phi[parent[y]]];
    bool ok = true;
    std::vector<bool> hit(n, false);
    for (std::size_t k = 0; k < n && ok; ++k) {
      if (hit[phi[k]]) ok = false;
      hit[phi[k]] = true;
    }
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = 0; b < n && ok; ++b)
        if (phi[mult[a][b]] != mult[phi[a]][phi[b]]) ok = false;
    if (ok) out.push_back(std::move(phi));
    std::size_t s = 0;
    while (s < gens.size() && ++choice[s] == candidates[s].size()) choice[s++] = 0;
    if (s == gens.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace blockfusion
