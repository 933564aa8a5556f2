#pragma once

// Exact arithmetic and the word problem in free solvable groups S_{r,d}
// via the iterated Magnus normal form.  An element of class d >= 2 is
// stored as its image in S_{r,d-1} together with the vector of left Fox
// coordinates over Z[S_{r,d-1}].
//
// Conventions, fixed here and inherited by every other module:
//   - left Fox rules:  d_j(z_i) = delta_ij,  d_j(z_i^-1) = -a_i^-1 delta_ij,
//     d_j(uv) = d_j(u) + u* d_j(v)   (u* the image of u one class down)
//   - conjugation g^f = f g f^-1, so the module action satisfies
//     d_i(b^alpha) = alpha d_i(b)
//   - normal forms store both the image one class down and the Fox
//     coordinates; they are linked by the identity
//     sum_j coords_j (a_j* - 1) = top - 1.

#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "solvkit/common.hpp"
#include "solvkit/groupring.hpp"
#include "solvkit/word.hpp"

namespace solvkit {

inline int max_class_guard() {
  if (const char* env = std::getenv("SOLVKIT_MAX_CLASS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 4;
}

struct GroupContext {
  int rank;
  int klass;  // derived length d

  GroupContext(int r, int d) : rank(r), klass(d) {
    if (r < 1) throw DomainError("rank must be positive");
    if (d < 1) throw DomainError("class must be positive");
    if (d > max_class_guard()) {
      throw DomainError("class " + std::to_string(d) +
                        " exceeds the guard (set SOLVKIT_MAX_CLASS to raise it)");
    }
  }

  GroupContext sub() const { return GroupContext(rank, klass - 1); }

  friend bool operator==(const GroupContext&, const GroupContext&) = default;
};

class SolvableElement;
using SolvablePtr = std::shared_ptr<const SolvableElement>;

// Ring key: a normal form of class d-1 plus its canonical serialization.
// Key order is serialization order.
struct SolvKey {
  SolvablePtr elem;
  std::string serial;
};

struct SolvKeyGroup {
  int rank;
  int klass;  // class of the key elements

  using Key = SolvKey;

  struct KeyLess {
    bool operator()(const SolvKey& a, const SolvKey& b) const { return a.serial < b.serial; }
  };

  Key identity() const;
  Key mul(const Key& a, const Key& b) const;
  Key inv(const Key& a) const;
  bool compatible(const SolvKeyGroup& o) const { return rank == o.rank && klass == o.klass; }
  std::string format_key(const Key& k) const { return k.serial; }
};

using SolvRing = RingElement<SolvKeyGroup>;

class SolvableElement {
 public:
  static SolvableElement identity(const GroupContext& ctx) { return SolvableElement(ctx); }

  static SolvableElement generator(const GroupContext& ctx, int i) {
    if (i < 1 || i > ctx.rank) throw DomainError("out-of-range generator");
    SolvableElement e(ctx);
    if (ctx.klass == 1) {
      e.exps_[i - 1] = 1;
    } else {
      e.top_ = std::make_shared<const SolvableElement>(generator(ctx.sub(), i));
      e.coords_[i - 1] = SolvRing::one(e.ring_group());
    }
    return e;
  }

  const GroupContext& context() const { return ctx_; }
  int rank() const { return ctx_.rank; }
  int klass() const { return ctx_.klass; }

  const std::vector<Int>& exps() const {
    if (ctx_.klass != 1) throw DomainError("exps(): class-1 elements only");
    return exps_;
  }
  const SolvableElement& top() const {
    if (ctx_.klass < 2) throw DomainError("top(): class >= 2 only");
    return *top_;
  }
  SolvablePtr top_ptr() const { return top_; }
  const std::vector<SolvRing>& coords() const {
    if (ctx_.klass < 2) throw DomainError("coords(): class >= 2 only");
    return coords_;
  }

  SolvKeyGroup ring_group() const { return SolvKeyGroup{ctx_.rank, ctx_.klass - 1}; }

  bool is_identity() const {
    if (ctx_.klass == 1) {
      for (const Int& e : exps_) {
        if (e != 0) return false;
      }
      return true;
    }
    if (!top_->is_identity()) return false;
    for (const SolvRing& c : coords_) {
      if (!c.is_zero()) return false;
    }
    return true;
  }

  SolvableElement mul(const SolvableElement& o) const {
    require_same_context(o);
    SolvableElement out(ctx_);
    if (ctx_.klass == 1) {
      for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] = exps_[i] + o.exps_[i];
      return out;
    }
    out.top_ = std::make_shared<const SolvableElement>(top_->mul(*o.top_));
    SolvRing action = SolvRing::monomial(ring_group(), SolvKey{top_, top_->serialize()});
    for (int j = 0; j < ctx_.rank; ++j) {
      out.coords_[j] = coords_[j] + action * o.coords_[j];
    }
    return out;
  }

  SolvableElement inverse() const {
    SolvableElement out(ctx_);
    if (ctx_.klass == 1) {
      for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] = -exps_[i];
      return out;
    }
    auto topinv = std::make_shared<const SolvableElement>(top_->inverse());
    out.top_ = topinv;
    SolvRing action = SolvRing::monomial(ring_group(), SolvKey{topinv, topinv->serialize()});
    for (int j = 0; j < ctx_.rank; ++j) {
      out.coords_[j] = -(action * coords_[j]);
    }
    return out;
  }

  SolvableElement pow(const Int& e) const {
    if (e == 0) return identity(ctx_);
    if (e < 0) return inverse().pow(-e);
    SolvableElement base = *this;
    SolvableElement acc = identity(ctx_);
    Int n = e;
    while (n > 0) {
      if ((n & 1) != 0) acc = acc.mul(base);
      n >>= 1;
      if (n > 0) base = base.mul(base);
    }
    return acc;
  }

  friend bool operator==(const SolvableElement& a, const SolvableElement& b) {
    if (!(a.ctx_ == b.ctx_)) return false;
    if (a.ctx_.klass == 1) return a.exps_ == b.exps_;
    return *a.top_ == *b.top_ && a.coords_ == b.coords_;
  }

  // Canonical recursive serialization: d1:(e1,...,er) at the base,
  // d{k}:{top}|[poly1;...;polyr] above it.
  std::string serialize() const {
    std::string out = "d" + std::to_string(ctx_.klass) + ":";
    if (ctx_.klass == 1) {
      out += '(';
      for (std::size_t i = 0; i < exps_.size(); ++i) {
        if (i) out += ',';
        out += exps_[i].str();
      }
      out += ')';
      return out;
    }
    out += top_->serialize();
    out += "|[";
    for (int j = 0; j < ctx_.rank; ++j) {
      if (j) out += ';';
      out += coords_[j].str();
    }
    out += ']';
    return out;
  }

  std::vector<Int> abelianized() const {
    const SolvableElement* e = this;
    while (e->ctx_.klass > 1) e = e->top_.get();
    return e->exps_;
  }

  // sum_j coords_j (a_j* - 1) == top - 1 in Z[S_{r,d-1}].
  bool fundamental_identity_holds() const {
    if (ctx_.klass == 1) return true;
    SolvKeyGroup g = ring_group();
    SolvRing lhs = SolvRing::zero(g);
    for (int j = 0; j < ctx_.rank; ++j) {
      SolvKey aj = make_key(generator(ctx_.sub(), j + 1));
      lhs = lhs + coords_[j] * (SolvRing::monomial(g, aj) - SolvRing::one(g));
    }
    SolvRing rhs = SolvRing::monomial(g, SolvKey{top_, top_->serialize()}) - SolvRing::one(g);
    return lhs == rhs;
  }

  static SolvKey make_key(SolvableElement e) {
    auto p = std::make_shared<const SolvableElement>(std::move(e));
    std::string s = p->serialize();
    return SolvKey{std::move(p), std::move(s)};
  }

  // Assembles a class >= 2 normal form from its parts.
  static SolvableElement compose(const GroupContext& ctx, SolvableElement top,
                                 std::vector<SolvRing> coords) {
    if (ctx.klass < 2) throw DomainError("compose(): class >= 2 only");
    if (!(top.context() == ctx.sub()) || static_cast<int>(coords.size()) != ctx.rank) {
      throw DomainError("compose(): malformed parts");
    }
    SolvableElement out(ctx);
    out.top_ = std::make_shared<const SolvableElement>(std::move(top));
    out.coords_ = std::move(coords);
    return out;
  }

 private:
  explicit SolvableElement(const GroupContext& ctx) : ctx_(ctx) {
    if (ctx_.klass == 1) {
      exps_.assign(static_cast<std::size_t>(ctx_.rank), 0);
    } else {
      top_ = std::make_shared<const SolvableElement>(SolvableElement(ctx_.sub()));
      coords_.assign(static_cast<std::size_t>(ctx_.rank), SolvRing::zero(ring_group()));
    }
  }

  void require_same_context(const SolvableElement& o) const {
    if (!(ctx_ == o.ctx_)) throw DomainError("context mismatch");
  }

  GroupContext ctx_;
  std::vector<Int> exps_;
  SolvablePtr top_;
  std::vector<SolvRing> coords_;
};

inline SolvKeyGroup::Key SolvKeyGroup::identity() const {
  return SolvableElement::make_key(SolvableElement::identity(GroupContext(rank, klass)));
}

inline SolvKeyGroup::Key SolvKeyGroup::mul(const Key& a, const Key& b) const {
  return SolvableElement::make_key(a.elem->mul(*b.elem));
}

inline SolvKeyGroup::Key SolvKeyGroup::inv(const Key& a) const {
  return SolvableElement::make_key(a.elem->inverse());
}

namespace detail {

// sum_{t=0}^{e-1} base^t for e > 0, -(base^-1 + ... + base^e) for e < 0:
// the Fox derivative of a generator power.
inline SolvRing geometric_sum(const SolvKeyGroup& g, const SolvableElement& base, const Int& e) {
  SolvRing out = SolvRing::zero(g);
  if (e == 0) return out;
  Int n = e < 0 ? Int(-e) : e;
  if (n > 100000) throw Error("exponent too large for Fox expansion");
  if (e > 0) {
    SolvableElement cur = SolvableElement::identity(base.context());
    for (Int t = 0; t < n; ++t) {
      out.add_term(SolvableElement::make_key(cur), 1);
      if (t + 1 < n) cur = cur.mul(base);
    }
  } else {
    SolvableElement binv = base.inverse();
    SolvableElement cur = binv;
    for (Int t = 0; t < n; ++t) {
      out.add_term(SolvableElement::make_key(cur), -1);
      if (t + 1 < n) cur = cur.mul(binv);
    }
  }
  return out;
}

inline void check_generator_word(const Word& w, int rank) {
  for (const Letter& l : w.letters()) {
    if (l.sym.kind != SymbolKind::Generator) {
      throw DomainError("word contains variables");
    }
    if (l.sym.index < 1 || l.sym.index > rank) throw DomainError("out-of-range generator");
  }
}

}  // namespace detail

// Normal form of the image of w in S_{r,d}.
inline SolvableElement embed(const Word& w, const GroupContext& ctx) {
  detail::check_generator_word(w, ctx.rank);
  if (ctx.klass == 1) {
    SolvableElement out = SolvableElement::identity(ctx);
    std::vector<Int> exps = exponent_vector(w, ctx.rank);
    for (int i = 0; i < ctx.rank; ++i) {
      if (exps[i] != 0) out = out.mul(SolvableElement::generator(ctx, i + 1).pow(exps[i]));
    }
    return out;
  }
  GroupContext sub = ctx.sub();
  SolvKeyGroup g{ctx.rank, sub.klass};
  std::vector<SolvableElement> gens;
  gens.reserve(static_cast<std::size_t>(ctx.rank));
  for (int i = 1; i <= ctx.rank; ++i) gens.push_back(SolvableElement::generator(sub, i));

  SolvableElement prefix = SolvableElement::identity(sub);
  std::vector<SolvRing> coords(static_cast<std::size_t>(ctx.rank), SolvRing::zero(g));
  for (const Letter& l : w.letters()) {
    int i = l.sym.index - 1;
    SolvRing step = detail::geometric_sum(g, gens[i], l.exp);
    SolvRing pref = SolvRing::monomial(g, SolvableElement::make_key(prefix));
    coords[i] = coords[i] + pref * step;
    prefix = prefix.mul(gens[i].pow(l.exp));
  }
  // the final prefix is the image of w one class down
  return SolvableElement::compose(ctx, std::move(prefix), std::move(coords));
}

// Left Fox derivative of w with respect to z_j, a value in Z[S_{r,d-1}].
inline SolvRing fox(const Word& w, int j, const GroupContext& ctx) {
  if (ctx.klass < 2) throw DomainError("fox: class-1 group has no Fox target");
  if (j < 1 || j > ctx.rank) throw DomainError("fox: bad axis");
  return embed(w, ctx).coords()[j - 1];
}

// Ring map Z[S_{r,k}] -> Z[Z^r] induced by abelianization of keys.
// Exact (a bijection on keys) when the keys have class 1.
inline LaurentElement abelianize_ring(const SolvRing& x) {
  AbelianGroup ag{x.group().rank};
  LaurentElement out(ag);
  for (const auto& [k, c] : x.terms()) out.add_term(k.elem->abelianized(), c);
  return out;
}

// Inverse of abelianize_ring for class-1 keys.
inline SolvRing laurent_to_ring(const LaurentElement& x, const SolvKeyGroup& g) {
  if (g.klass != 1) throw DomainError("laurent_to_ring: class-1 keys only");
  if (x.group().rank != g.rank) throw DomainError("laurent_to_ring: rank mismatch");
  GroupContext kctx(g.rank, 1);
  SolvRing out(g);
  for (const auto& [k, c] : x.terms()) {
    SolvableElement e = SolvableElement::identity(kctx);
    for (int i = 0; i < g.rank; ++i) {
      if (k[i] != 0) e = e.mul(SolvableElement::generator(kctx, i + 1).pow(k[i]));
    }
    out.add_term(SolvableElement::make_key(std::move(e)), c);
  }
  return out;
}

inline LaurentElement fox_abelian(const Word& w, int j, const GroupContext& ctx) {
  return abelianize_ring(fox(w, j, ctx));
}

// Substitutes h_i for the symbol with index i and multiplies out.
// Symbols are positional: variables and generators alike pick h by index.
inline SolvableElement evaluate(const Word& w, const std::vector<SolvableElement>& h) {
  if (h.empty()) throw DomainError("evaluate: empty substitution tuple");
  const GroupContext& ctx = h[0].context();
  for (const SolvableElement& e : h) {
    if (!(e.context() == ctx)) throw DomainError("context mismatch");
  }
  SolvableElement acc = SolvableElement::identity(ctx);
  for (const Letter& l : w.letters()) {
    if (l.sym.index < 1 || l.sym.index > static_cast<int>(h.size())) {
      throw DomainError("unbound symbol with index " + std::to_string(l.sym.index));
    }
    acc = acc.mul(h[l.sym.index - 1].pow(l.exp));
  }
  return acc;
}

// Both sides of the chain rule
//   d_j(c(h_1,...,h_n)) = sum_i d_i(c)[h*] d_j(h_i)
// evaluated in Z[S_{r,d-1}], where d_i(c)[h*] substitutes the images of
// the h_i one class down into the derivative of c.  True iff they agree
// for every axis j.
inline bool chain_rule_check(const Word& c, const std::vector<SolvableElement>& h) {
  if (h.empty()) throw DomainError("chain_rule_check: empty tuple");
  const GroupContext& ctx = h[0].context();
  if (ctx.klass < 2) throw DomainError("chain_rule_check: class >= 2 only");
  int n = static_cast<int>(h.size());
  for (const Letter& l : c.letters()) {
    if (l.sym.kind != SymbolKind::Generator || l.sym.index > n) {
      throw DomainError("chain_rule_check: arity mismatch");
    }
  }
  SolvableElement lhs = evaluate(c, h);

  GroupContext sub = ctx.sub();
  SolvKeyGroup g{ctx.rank, sub.klass};
  std::vector<SolvRing> dsub(static_cast<std::size_t>(n), SolvRing::zero(g));
  SolvableElement prefix = SolvableElement::identity(sub);
  for (const Letter& l : c.letters()) {
    int i = l.sym.index - 1;
    const SolvableElement& image = h[i].top();
    SolvRing step = detail::geometric_sum(g, image, l.exp);
    SolvRing pref = SolvRing::monomial(g, SolvableElement::make_key(prefix));
    dsub[i] = dsub[i] + pref * step;
    prefix = prefix.mul(image.pow(l.exp));
  }

  for (int j = 0; j < ctx.rank; ++j) {
    SolvRing rhs = SolvRing::zero(g);
    for (int i = 0; i < n; ++i) {
      rhs = rhs + dsub[i] * h[i].coords()[j];
    }
    if (!(lhs.coords()[j] == rhs)) return false;
  }
  return true;
}

// Largest n with a in G^(n): the greatest k for which the image of a in
// S_{r,k} is trivial.  nullopt when a is the identity of S_{r,d}.
inline std::optional<int> derived_depth(const SolvableElement& a) {
  if (a.is_identity()) return std::nullopt;
  const SolvableElement* img = &a;
  std::vector<const SolvableElement*> chain;  // class d, d-1, ..., 1
  chain.push_back(img);
  while (img->klass() > 1) {
    img = &img->top();
    chain.push_back(img);
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i]->is_identity()) return chain[i]->klass();
  }
  return 0;
}

// c^alpha for c in G^(d-1): the Fox coordinates are multiplied by alpha.
inline SolvableElement module_power(const SolvableElement& c, const SolvRing& alpha) {
  if (c.klass() < 2) throw DomainError("module_power: class >= 2 only");
  if (!c.top().is_identity()) {
    throw DomainError("module_power: element does not lie in G^(d-1)");
  }
  if (!alpha.group().compatible(c.ring_group())) {
    throw DomainError("module_power: mismatched coefficient ring");
  }
  std::vector<SolvRing> coords;
  coords.reserve(c.coords().size());
  for (const SolvRing& x : c.coords()) coords.push_back(alpha * x);
  return SolvableElement::compose(c.context(), SolvableElement::identity(c.context().sub()),
                                  std::move(coords));
}

// Rank over the fraction field of Z[Z^r] of the matrix of Fox coordinate
// vectors, by fraction-free elimination.  Metabelian case (d = 2) only.
inline int module_rank(const std::vector<SolvableElement>& cs) {
  if (cs.empty()) throw DomainError("module_rank: empty family");
  const GroupContext& ctx = cs[0].context();
  if (ctx.klass != 2) throw DomainError("module_rank: metabelian case only");
  int r = ctx.rank;
  std::vector<std::vector<LaurentElement>> rows;
  for (const SolvableElement& c : cs) {
    if (!(c.context() == ctx)) throw DomainError("context mismatch");
    if (!c.top().is_identity()) throw DomainError("module_rank: element outside G'");
    std::vector<LaurentElement> row;
    row.reserve(static_cast<std::size_t>(r));
    for (const SolvRing& x : c.coords()) row.push_back(abelianize_ring(x));
    rows.push_back(std::move(row));
  }
  std::vector<bool> used(rows.size(), false);
  int rank = 0;
  for (int col = 0; col < r; ++col) {
    int pivot = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!used[i] && !rows[i][col].is_zero()) {
        pivot = static_cast<int>(i);
        break;
      }
    }
    if (pivot < 0) continue;
    used[pivot] = true;
    ++rank;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (used[i] || rows[i][col].is_zero()) continue;
      LaurentElement f = rows[pivot][col];
      LaurentElement gq = rows[i][col];
      for (int j = 0; j < r; ++j) {
        rows[i][j] = f * rows[i][j] - gq * rows[pivot][j];
      }
    }
  }
  return rank;
}

// An endomorphism of S_{r,d} given by generator images.  Image words are
// kept alongside the normal forms so the map can be applied to words and
// composed with itself; optional witnesses express each image as a word
// in a subgroup's generators (variables x_k refer to the k-th generator).
struct Retraction {
  GroupContext ctx;
  std::vector<Word> image_words;
  std::vector<SolvableElement> images;
  std::vector<std::optional<Word>> witnesses;

  static Retraction from_words(const GroupContext& ctx, std::vector<Word> words) {
    if (static_cast<int>(words.size()) != ctx.rank) {
      throw DomainError("retraction needs one image per generator");
    }
    Retraction rho{ctx, std::move(words), {}, {}};
    rho.images.reserve(rho.image_words.size());
    for (const Word& w : rho.image_words) rho.images.push_back(embed(w, ctx));
    rho.witnesses.assign(rho.image_words.size(), std::nullopt);
    return rho;
  }

  SolvableElement apply(const Word& w) const { return evaluate(w, images); }
};

}  // namespace solvkit
