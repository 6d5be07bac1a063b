#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kreeb/error.hpp"

namespace kreeb {

/// A group given by explicit operations. `name()` identifies the carrier so
/// elements built over different groups are never mixed.
template <class G>
concept GroupOps = requires(const G& g, const typename G::Element& a, const typename G::Element& b,
                            const nlohmann::json& j) {
  { g.identity() } -> std::convertible_to<typename G::Element>;
  { g.multiply(a, b) } -> std::convertible_to<typename G::Element>;
  { g.inverse(a) } -> std::convertible_to<typename G::Element>;
  { g.equal(a, b) } -> std::convertible_to<bool>;
  { g.name() } -> std::convertible_to<std::string>;
  { g.encode(a) } -> std::convertible_to<nlohmann::json>;
  { g.decode(j) } -> std::convertible_to<typename G::Element>;
};

/// (Z, +).
struct IntegerGroup {
  using Element = std::int64_t;
  Element identity() const { return 0; }
  Element multiply(Element a, Element b) const { return a + b; }
  Element inverse(Element a) const { return -a; }
  bool equal(Element a, Element b) const { return a == b; }
  std::string name() const { return "Z"; }
  nlohmann::json encode(Element a) const { return nlohmann::json::array({a}); }
  Element decode(const nlohmann::json& j) const { return j.is_array() ? j.at(0).get<Element>() : j.get<Element>(); }
};

/// (Z/m, +), elements kept in [0, m).
class CyclicGroup {
 public:
  using Element = std::int64_t;
  explicit CyclicGroup(std::int64_t order) : m_(order) {
    if (m_ < 1) throw Error(ErrorKind::Domain, "cyclic group order must be positive");
  }
  std::int64_t order() const { return m_; }
  Element reduce(std::int64_t a) const { return ((a % m_) + m_) % m_; }
  Element identity() const { return 0; }
  Element multiply(Element a, Element b) const { return reduce(a + b); }
  Element inverse(Element a) const { return reduce(-a); }
  bool equal(Element a, Element b) const { return reduce(a) == reduce(b); }
  std::string name() const { return "Z_" + std::to_string(m_); }
  nlohmann::json encode(Element a) const { return nlohmann::json::array({reduce(a)}); }
  Element decode(const nlohmann::json& j) const { return reduce(j.is_array() ? j.at(0).get<Element>() : j.get<Element>()); }
  std::vector<Element> elements() const {
    std::vector<Element> all(static_cast<std::size_t>(m_));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }

 private:
  std::int64_t m_;
};

/// Free abelian group Z^r, written additively.
class FreeAbelianGroup {
 public:
  using Element = std::vector<std::int64_t>;
  explicit FreeAbelianGroup(int rank) : r_(rank) {
    if (r_ < 0) throw Error(ErrorKind::Domain, "rank must be non-negative");
  }
  int rank() const { return r_; }
  Element identity() const { return Element(static_cast<std::size_t>(r_), 0); }
  Element multiply(const Element& a, const Element& b) const {
    Element c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
  }
  Element inverse(const Element& a) const {
    Element c(a);
    for (auto& v : c) v = -v;
    return c;
  }
  bool equal(const Element& a, const Element& b) const { return a == b; }
  std::string name() const { return "Z^" + std::to_string(r_); }
  nlohmann::json encode(const Element& a) const { return a; }
  Element decode(const nlohmann::json& j) const {
    Element e = j.get<Element>();
    if (static_cast<int>(e.size()) != r_) throw Error(ErrorKind::Domain, "vector has the wrong rank");
    return e;
  }

 private:
  int r_;
};

/// Symmetric group S_k on {0..k-1}; elements are one-line arrays and
/// multiply(a, b) = a o b, i.e. (ab)(i) = a(b(i)).
class PermutationGroup {
 public:
  using Element = std::vector<int>;
  explicit PermutationGroup(int degree) : k_(degree) {
    if (k_ < 1) throw Error(ErrorKind::Domain, "permutation degree must be positive");
  }
  int degree() const { return k_; }
  Element identity() const {
    Element e(static_cast<std::size_t>(k_));
    std::iota(e.begin(), e.end(), 0);
    return e;
  }
  Element multiply(const Element& a, const Element& b) const {
    Element c(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[static_cast<std::size_t>(b[i])];
    return c;
  }
  Element inverse(const Element& a) const {
    Element c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
    return c;
  }
  bool equal(const Element& a, const Element& b) const { return a == b; }
  std::string name() const { return "S_" + std::to_string(k_); }
  nlohmann::json encode(const Element& a) const { return a; }
  Element decode(const nlohmann::json& j) const {
    Element e = j.get<Element>();
    std::vector<char> hit(static_cast<std::size_t>(k_), 0);
    if (static_cast<int>(e.size()) != k_) throw Error(ErrorKind::Domain, "permutation has the wrong degree");
    for (int v : e) {
      if (v < 0 || v >= k_ || hit[static_cast<std::size_t>(v)]) throw Error(ErrorKind::Domain, "not a permutation");
      hit[static_cast<std::size_t>(v)] = 1;
    }
    return e;
  }
  std::vector<Element> elements() const {
    std::vector<Element> all;
    Element p = identity();
    do all.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return all;
  }

 private:
  int k_;
};

/// (alpha, k) in Maps(Z_n, G) x Z. `n` and `group` name the ambient context.
template <class Elem>
struct WreathElement {
  std::vector<Elem> alpha;
  std::int64_t k = 0;
  int n = 1;
  std::string group;
};

inline int mod_index(std::int64_t i, int n) { return static_cast<int>(((i % n) + n) % n); }

/// alpha^k(i) = alpha(i + k mod n).
template <class Elem>
std::vector<Elem> shift_action(const std::vector<Elem>& alpha, std::int64_t k) {
  const int n = static_cast<int>(alpha.size());
  std::vector<Elem> out;
  out.reserve(alpha.size());
  for (int i = 0; i < n; ++i) out.push_back(alpha[static_cast<std::size_t>(mod_index(i + k, n))]);
  return out;
}

/// G wr_n Z = Maps(Z_n, G) x| Z with (alpha, k)(beta, l) = (alpha beta^k, k + l).
template <GroupOps G>
class Wreath {
 public:
  using Elem = typename G::Element;
  using Element = WreathElement<Elem>;

  Wreath(G group, int n) : g_(std::move(group)), n_(n) {
    if (n_ < 1) throw Error(ErrorKind::InvalidIndex, "wreath index must be at least 1");
  }

  const G& group() const { return g_; }
  int n() const { return n_; }

  Element make(std::vector<Elem> alpha, std::int64_t k) const {
    if (static_cast<int>(alpha.size()) != n_)
      throw Error(ErrorKind::MixedContext, "alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                                               std::to_string(n_));
    return {std::move(alpha), k, n_, g_.name()};
  }

  Element identity() const { return make(std::vector<Elem>(static_cast<std::size_t>(n_), g_.identity()), 0); }
  Element translation(std::int64_t k) const {
    return make(std::vector<Elem>(static_cast<std::size_t>(n_), g_.identity()), k);
  }

  void check(const Element& a) const {
    if (a.n != n_ || a.group != g_.name() || static_cast<int>(a.alpha.size()) != n_)
      throw Error(ErrorKind::MixedContext, "element of " + a.group + " wr_" + std::to_string(a.n) +
                                               " Z used in " + g_.name() + " wr_" + std::to_string(n_) + " Z");
  }

  Element mul(const Element& a, const Element& b) const {
    check(a);
    check(b);
    Element c = identity();
    for (int i = 0; i < n_; ++i)
      c.alpha[static_cast<std::size_t>(i)] =
          g_.multiply(a.alpha[static_cast<std::size_t>(i)], b.alpha[static_cast<std::size_t>(mod_index(i + a.k, n_))]);
    c.k = a.k + b.k;
    return c;
  }

  /// ((alpha^{-1})^{-k}, -k)
  Element inv(const Element& a) const {
    check(a);
    std::vector<Elem> inv_alpha;
    for (const auto& e : a.alpha) inv_alpha.push_back(g_.inverse(e));
    return make(shift_action(inv_alpha, -a.k), -a.k);
  }

  Element pow(const Element& a, std::int64_t e) const {
    Element base = e < 0 ? inv(a) : a;
    std::uint64_t left = e < 0 ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
    Element result = identity();
    while (left) {
      if (left & 1) result = mul(result, base);
      base = mul(base, base);
      left >>= 1;
    }
    return result;
  }

  bool equal(const Element& a, const Element& b) const {
    check(a);
    check(b);
    if (a.k != b.k) return false;
    for (int i = 0; i < n_; ++i)
      if (!g_.equal(a.alpha[static_cast<std::size_t>(i)], b.alpha[static_cast<std::size_t>(i)])) return false;
    return true;
  }

  /// zeta(alpha) = (alpha, 0)
  Element inclusion(std::vector<Elem> alpha) const { return make(std::move(alpha), 0); }
  /// p(alpha, k) = k
  std::int64_t projection(const Element& a) const {
    check(a);
    return a.k;
  }

  /// G wr_1 Z -> G x Z, ((g), k) -> (g, k).
  std::pair<Elem, std::int64_t> to_product(const Element& a) const {
    if (n_ != 1) throw Error(ErrorKind::WrongContext, "the product form exists only for n = 1");
    check(a);
    return {a.alpha.front(), a.k};
  }
  Element from_product(const Elem& g, std::int64_t k) const {
    if (n_ != 1) throw Error(ErrorKind::WrongContext, "the product form exists only for n = 1");
    return make({g}, k);
  }

  Element conjugate(const Element& by, const Element& a) const { return mul(mul(by, a), inv(by)); }

  nlohmann::json to_json(const Element& a) const {
    check(a);
    nlohmann::json alpha = nlohmann::json::array();
    for (const auto& e : a.alpha) alpha.push_back(g_.encode(e));
    return {{"n", a.n}, {"k", a.k}, {"group", a.group}, {"alpha", alpha}};
  }
  Element from_json(const nlohmann::json& j) const {
    if (j.at("n").get<int>() != n_) throw Error(ErrorKind::MixedContext, "serialized element has a different n");
    if (j.contains("group") && j.at("group").get<std::string>() != g_.name())
      throw Error(ErrorKind::MixedContext, "serialized element lives over " + j.at("group").get<std::string>());
    std::vector<Elem> alpha;
    for (const auto& e : j.at("alpha")) alpha.push_back(g_.decode(e));
    return make(std::move(alpha), j.at("k").get<std::int64_t>());
  }

 private:
  G g_;
  int n_;
};

}  // namespace kreeb
