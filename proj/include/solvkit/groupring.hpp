#pragma once

// Group-ring arithmetic Z[A] generic in the coefficient group.  Keys are
// canonical normal forms supplied by the group traits; the Laurent case
// A = Z^r additionally carries the Delta-adic valuation, exponent
// ranges and exact division.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "solvkit/common.hpp"

namespace solvkit {

// The group traits G provide:
//   Key                 canonical normal form of a group element
//   KeyLess             stateless strict weak order on keys
//   identity(), mul(), inv(), format_key(), compatible(other)
template <class G>
class RingElement {
 public:
  using Group = G;
  using Key = typename G::Key;
  using TermMap = std::map<Key, Int, typename G::KeyLess>;

  explicit RingElement(G group) : group_(std::move(group)) {}

  static RingElement zero(G group) { return RingElement(std::move(group)); }

  static RingElement one(G group) {
    Key k = group.identity();
    return monomial(std::move(group), std::move(k), 1);
  }

  static RingElement monomial(G group, Key k, Int c = 1) {
    RingElement e(std::move(group));
    if (c != 0) e.terms_.emplace(std::move(k), std::move(c));
    return e;
  }

  const G& group() const { return group_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Int coefficient(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Int(0) : it->second;
  }

  // Sum of coefficients; the element lies in the fundamental ideal iff
  // this is zero.
  Int augmentation() const {
    Int s = 0;
    for (const auto& [k, c] : terms_) s += c;
    return s;
  }

  RingElement& add_term(const Key& k, const Int& c) {
    if (c == 0) return *this;
    auto [it, inserted] = terms_.emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  friend RingElement operator+(const RingElement& a, const RingElement& b) {
    a.require_compatible(b);
    RingElement out = a;
    for (const auto& [k, c] : b.terms_) out.add_term(k, c);
    return out;
  }

  friend RingElement operator-(const RingElement& a, const RingElement& b) {
    a.require_compatible(b);
    RingElement out = a;
    for (const auto& [k, c] : b.terms_) out.add_term(k, -c);
    return out;
  }

  RingElement operator-() const {
    RingElement out(group_);
    for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
    return out;
  }

  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    a.require_compatible(b);
    RingElement out(a.group_);
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        out.add_term(a.group_.mul(ka, kb), ca * cb);
      }
    }
    return out;
  }

  RingElement scaled(const Int& c) const {
    RingElement out(group_);
    if (c == 0) return out;
    for (const auto& [k, v] : terms_) out.terms_.emplace(k, v * c);
    return out;
  }

  friend bool operator==(const RingElement& a, const RingElement& b) {
    if (!a.group_.compatible(b.group_) || a.terms_.size() != b.terms_.size()) return false;
    typename G::KeyLess less;
    return std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                      [&less](const auto& x, const auto& y) {
                        return !less(x.first, y.first) && !less(y.first, x.first) &&
                               x.second == y.second;
                      });
  }

  // Terms in key order, each as c*key; "0" for zero.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += c.str();
      out += '*';
      out += group_.format_key(k);
    }
    return out;
  }

 private:
  void require_compatible(const RingElement& o) const {
    if (!group_.compatible(o.group_)) throw DomainError("mismatched coefficient groups");
  }

  G group_;
  TermMap terms_;
};

// Free abelian coefficient group Z^r; keys are exponent vectors, so the
// ring is the Laurent polynomial ring Z[a1^{+-1},...,ar^{+-1}].
struct AbelianGroup {
  int rank;

  using Key = std::vector<Int>;

  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
  };

  Key identity() const { return Key(static_cast<std::size_t>(rank), 0); }

  Key mul(const Key& a, const Key& b) const {
    Key out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
  }

  Key inv(const Key& a) const {
    Key out(a);
    for (Int& e : out) e = -e;
    return out;
  }

  bool compatible(const AbelianGroup& o) const { return rank == o.rank; }

  std::string format_key(const Key& k) const {
    std::string out;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) out += '*';
      out += 'a';
      out += std::to_string(i + 1);
      out += '^';
      out += k[i].str();
    }
    return out;
  }
};

using LaurentElement = RingElement<AbelianGroup>;

inline LaurentElement laurent_zero(int rank) { return LaurentElement::zero(AbelianGroup{rank}); }
inline LaurentElement laurent_one(int rank) { return LaurentElement::one(AbelianGroup{rank}); }

// The monomial c * a_axis^e (axis 1-based).
inline LaurentElement laurent_monomial(int rank, int axis, Int e, Int c = 1) {
  AbelianGroup g{rank};
  auto key = g.identity();
  key[axis - 1] = std::move(e);
  return LaurentElement::monomial(g, std::move(key), std::move(c));
}

// Minimal and maximal exponent of variable `axis` (1-based) over all
// monomials of x.
inline std::pair<Int, Int> exponent_range(const LaurentElement& x, int axis) {
  if (x.is_zero()) throw DomainError("exponent_range of zero");
  if (axis < 1 || axis > x.group().rank) throw DomainError("exponent_range: bad axis");
  bool first = true;
  Int lo = 0, hi = 0;
  for (const auto& [k, c] : x.terms()) {
    const Int& e = k[axis - 1];
    if (first || e < lo) lo = e;
    if (first || e > hi) hi = e;
    first = false;
  }
  return {lo, hi};
}

// sum_i (|p_i| + |q_i|) + 1 over the exponent ranges (p_i, q_i).
inline Int choose_m(const LaurentElement& x) {
  if (x.is_zero()) throw DomainError("choose_m of zero");
  Int total = 1;
  for (int i = 1; i <= x.group().rank; ++i) {
    auto [p, q] = exponent_range(x, i);
    total += (p < 0 ? -p : p) + (q < 0 ? -q : q);
  }
  return total;
}

struct OmegaResult {
  int value;
  bool capped;  // true: the valuation is >= value (== the cap)

  friend bool operator==(const OmegaResult&, const OmegaResult&) = default;
  std::string str() const { return capped ? ">=" + std::to_string(value) : std::to_string(value); }
};

namespace detail {
inline void for_each_composition(int total, int parts, std::vector<int>& cur,
                                 const std::function<void(const std::vector<int>&)>& f) {
  if (parts == 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (int h = 0; h <= total; ++h) {
    cur.push_back(h);
    for_each_composition(total - h, parts - 1, cur, f);
    cur.pop_back();
  }
}
}  // namespace detail

// Delta-adic valuation: clear negative exponents by a unit monomial,
// substitute a_i = 1 + y_i and expand; the valuation is the minimal
// total y-degree with a nonzero coefficient.  Degrees are explored up
// to `cap`; if everything below vanishes the result is ">= cap".
inline OmegaResult omega(const LaurentElement& x, int cap = 8) {
  if (x.is_zero()) throw DomainError("omega of zero");
  if (cap < 1) throw DomainError("omega: cap must be positive");
  int r = x.group().rank;
  std::vector<Int> shift(static_cast<std::size_t>(r), 0);
  for (const auto& [k, c] : x.terms()) {
    for (int i = 0; i < r; ++i) {
      if (k[i] < -shift[i]) shift[i] = -k[i];
    }
  }
  for (int n = 0; n < cap; ++n) {
    bool nonzero = false;
    std::vector<int> cur;
    detail::for_each_composition(n, r, cur, [&](const std::vector<int>& deg) {
      if (nonzero) return;
      Int coeff = 0;
      for (const auto& [k, c] : x.terms()) {
        Int prod = c;
        for (int i = 0; i < r && prod != 0; ++i) {
          prod *= binomial(k[i] + shift[i], deg[i]);
        }
        coeff += prod;
      }
      if (coeff != 0) nonzero = true;
    });
    if (nonzero) return {n, false};
  }
  return {cap, true};
}

// Exact division in the Laurent ring: returns q with q*d == x, or
// nullopt when x is not divisible by d.  Units are cleared along every
// axis, then leading-term polynomial division runs under the
// lexicographic order; exactness is confirmed by multiplying back.
inline std::optional<LaurentElement> exact_div(const LaurentElement& x, const LaurentElement& d) {
  if (d.is_zero()) throw DomainError("exact_div by zero");
  const AbelianGroup& g = x.group();
  if (!g.compatible(d.group())) throw DomainError("mismatched coefficient groups");
  if (x.is_zero()) return laurent_zero(g.rank);
  int r = g.rank;

  auto min_exponents = [r](const LaurentElement& e) {
    std::vector<Int> mins;
    for (const auto& [k, c] : e.terms()) {
      if (mins.empty()) {
        mins = k;
        continue;
      }
      for (int i = 0; i < r; ++i) {
        if (k[i] < mins[i]) mins[i] = k[i];
      }
    }
    return mins;
  };
  auto shifted = [&g](const LaurentElement& e, const std::vector<Int>& by) {
    LaurentElement out(g);
    for (const auto& [k, c] : e.terms()) {
      auto key = k;
      for (std::size_t i = 0; i < key.size(); ++i) key[i] -= by[i];
      out.add_term(key, c);
    }
    return out;
  };

  std::vector<Int> sx = min_exponents(x), sd = min_exponents(d);
  LaurentElement X = shifted(x, sx), D = shifted(d, sd);

  const auto& lead_d = *D.terms().rbegin();
  LaurentElement Q(g);
  LaurentElement R = X;
  while (!R.is_zero()) {
    const auto& lead_r = *R.terms().rbegin();
    std::vector<Int> t(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      t[i] = lead_r.first[i] - lead_d.first[i];
      if (t[i] < 0) return std::nullopt;
    }
    if (lead_r.second % lead_d.second != 0) return std::nullopt;
    Int tc = lead_r.second / lead_d.second;
    Q.add_term(t, tc);
    for (const auto& [k, c] : D.terms()) {
      R.add_term(g.mul(k, t), -tc * c);
    }
  }
  // undo the unit shifts: x = X*u_x, d = D*u_d  =>  x/d = Q*u_x/u_d
  std::vector<Int> back(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) back[i] = sd[i] - sx[i];
  LaurentElement q = shifted(Q, back);
  if (!(q * d == x)) throw Error("exact_div: internal multiply-back check failed");
  return q;
}

// Parses sums of terms like "2*a1^3*a2^-1", "a1", "-3"; accepts the
// canonical serialization as well as hand-written input.
inline LaurentElement parse_laurent(std::string_view text, int rank) {
  LaurentElement out = laurent_zero(rank);
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto parse_integer = [&]() -> Int {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) throw ParseError("expected an integer", start);
    return Int(std::string(text.substr(start, pos - start)));
  };

  skip_ws();
  if (pos >= text.size()) throw ParseError("empty polynomial", pos);
  bool first_term = true;
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    Int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first_term) {
      throw ParseError("expected '+' or '-'", pos);
    }
    first_term = false;
    Int coeff = sign;
    std::vector<Int> exps(static_cast<std::size_t>(rank), 0);
    bool want_factor = true;
    while (want_factor) {
      skip_ws();
      if (pos < text.size() && text[pos] == 'a') {
        ++pos;
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected a variable index", pos);
        int axis = std::stoi(std::string(text.substr(start, pos - start)));
        if (axis < 1 || axis > rank) throw ParseError("variable index out of range", start);
        Int e = 1;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          e = parse_integer();
        }
        exps[axis - 1] += e;
      } else {
        coeff *= parse_integer();
      }
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
      } else {
        want_factor = false;
      }
    }
    out.add_term(exps, coeff);
  }
  return out;
}

}  // namespace solvkit
