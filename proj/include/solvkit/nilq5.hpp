#pragma once

// The class-5 quotient of the free metabelian group M_r.  Elements are
// represented by their abelianized exponents plus Fox coordinates
// truncated to degree <= 3 in the shifted variables y_i = a_i - 1;
// equality of these data decides equality mod gamma_5 M_r.  Weight-4
// basic commutators give integer coordinates on gamma_4 / gamma_5.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "solvkit/common.hpp"
#include "solvkit/lattice.hpp"
#include "solvkit/magnus.hpp"

namespace solvkit {

// Monomial tables for polynomials in y_1..y_r truncated to total
// degree <= 3.  Slots are sorted by (degree, lex).
class NilContext {
 public:
  static constexpr int kMaxDegree = 3;

  explicit NilContext(int rank) : rank_(rank) {
    if (rank < 1) throw DomainError("rank must be positive");
    std::vector<int> cur;
    for (int deg = 0; deg <= kMaxDegree; ++deg) enumerate(deg, rank, cur);
    for (std::size_t s = 0; s < monomials_.size(); ++s) {
      slot_of_[monomials_[s]] = static_cast<int>(s);
    }
    prod_.assign(monomials_.size() * monomials_.size(), -1);
    std::vector<int> sum(static_cast<std::size_t>(rank));
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
      for (std::size_t j = 0; j < monomials_.size(); ++j) {
        int total = 0;
        for (int t = 0; t < rank; ++t) {
          sum[t] = monomials_[i][t] + monomials_[j][t];
          total += sum[t];
        }
        if (total <= kMaxDegree) {
          prod_[i * monomials_.size() + j] = slot_of_.at(sum);
        }
      }
    }
    axis_pow_.assign(static_cast<std::size_t>(rank) * (kMaxDegree + 1), -1);
    for (int i = 0; i < rank; ++i) {
      for (int k = 0; k <= kMaxDegree; ++k) {
        std::vector<int> m(static_cast<std::size_t>(rank), 0);
        m[i] = k;
        axis_pow_[static_cast<std::size_t>(i) * (kMaxDegree + 1) + k] = slot_of_.at(m);
      }
    }
  }

  int rank() const { return rank_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const std::vector<int>& monomial(int slot) const { return monomials_[slot]; }
  int degree(int slot) const {
    int d = 0;
    for (int e : monomials_[slot]) d += e;
    return d;
  }
  int prod_slot(int i, int j) const { return prod_[static_cast<std::size_t>(i) * monomials_.size() + j]; }
  int axis_power_slot(int axis0, int k) const {
    return axis_pow_[static_cast<std::size_t>(axis0) * (kMaxDegree + 1) + k];
  }
  int slot(const std::vector<int>& m) const {
    auto it = slot_of_.find(m);
    return it == slot_of_.end() ? -1 : it->second;
  }

 private:
  void enumerate(int remaining, int parts, std::vector<int>& cur) {
    if (parts == 1) {
      cur.push_back(remaining);
      monomials_.push_back(cur);
      cur.pop_back();
      return;
    }
    for (int h = 0; h <= remaining; ++h) {
      cur.push_back(h);
      enumerate(remaining - h, parts - 1, cur);
      cur.pop_back();
    }
  }

  int rank_;
  std::vector<std::vector<int>> monomials_;
  std::map<std::vector<int>, int> slot_of_;
  std::vector<int> prod_;
  std::vector<int> axis_pow_;
};

using NilCtxPtr = std::shared_ptr<const NilContext>;

inline NilCtxPtr nil_context(int rank) { return std::make_shared<const NilContext>(rank); }

class TruncPoly {
 public:
  explicit TruncPoly(NilCtxPtr ctx) : ctx_(std::move(ctx)), c_(ctx_->size(), 0) {}

  static TruncPoly one(NilCtxPtr ctx) {
    TruncPoly p(std::move(ctx));
    p.c_[0] = 1;
    return p;
  }

  const NilContext& ctx() const { return *ctx_; }
  const Int& operator[](int slot) const { return c_[slot]; }
  Int& operator[](int slot) { return c_[slot]; }

  bool is_zero() const {
    for (const Int& v : c_) {
      if (v != 0) return false;
    }
    return true;
  }

  // Smallest total degree with a nonzero coefficient; 4 when zero.
  int low_degree() const {
    for (std::size_t s = 0; s < c_.size(); ++s) {
      if (c_[s] != 0) return ctx_->degree(static_cast<int>(s));
    }
    return NilContext::kMaxDegree + 1;
  }

  friend bool operator==(const TruncPoly& a, const TruncPoly& b) {
    return a.ctx_->rank() == b.ctx_->rank() && a.c_ == b.c_;
  }

  TruncPoly& operator+=(const TruncPoly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TruncPoly& operator-=(const TruncPoly& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend TruncPoly operator+(TruncPoly a, const TruncPoly& b) { return a += b; }
  friend TruncPoly operator-(TruncPoly a, const TruncPoly& b) { return a -= b; }

  TruncPoly operator-() const {
    TruncPoly out(ctx_);
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = -c_[i];
    return out;
  }

  TruncPoly scaled(const Int& s) const {
    TruncPoly out(ctx_);
    if (s == 0) return out;
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = c_[i] * s;
    return out;
  }

  friend TruncPoly operator*(const TruncPoly& a, const TruncPoly& b) {
    TruncPoly out(a.ctx_);
    int n = static_cast<int>(a.c_.size());
    for (int i = 0; i < n; ++i) {
      if (a.c_[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (b.c_[j] == 0) continue;
        int k = a.ctx_->prod_slot(i, j);
        if (k >= 0) out.c_[k] += a.c_[i] * b.c_[j];
      }
    }
    return out;
  }

 private:
  NilCtxPtr ctx_;
  std::vector<Int> c_;
};

// prod_i (1+y_i)^{e_i} truncated; inverses expand as the generalized
// binomial series.
inline TruncPoly binom_expand(const NilCtxPtr& ctx, const std::vector<Int>& exps) {
  TruncPoly out = TruncPoly::one(ctx);
  for (int i = 0; i < ctx->rank(); ++i) {
    if (exps[i] == 0) continue;
    TruncPoly factor(ctx);
    for (int k = 0; k <= NilContext::kMaxDegree; ++k) {
      factor[ctx->axis_power_slot(i, k)] = binomial(exps[i], k);
    }
    out = out * factor;
  }
  return out;
}

class NilElement {
 public:
  static NilElement identity(NilCtxPtr ctx) { return NilElement(std::move(ctx)); }

  static NilElement generator(const NilCtxPtr& ctx, int i) {
    if (i < 1 || i > ctx->rank()) throw DomainError("out-of-range generator");
    NilElement e(ctx);
    e.exps_[i - 1] = 1;
    e.coords_[i - 1] = TruncPoly::one(ctx);
    return e;
  }

  const std::vector<Int>& exps() const { return exps_; }
  const std::vector<TruncPoly>& coords() const { return coords_; }
  int rank() const { return static_cast<int>(exps_.size()); }
  const NilCtxPtr& ctx() const { return ctx_; }

  bool is_identity() const {
    for (const Int& e : exps_) {
      if (e != 0) return false;
    }
    for (const TruncPoly& p : coords_) {
      if (!p.is_zero()) return false;
    }
    return true;
  }

  NilElement mul(const NilElement& o) const {
    require_same(o);
    NilElement out(ctx_);
    TruncPoly action = binom_expand(ctx_, exps_);
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      out.exps_[i] = exps_[i] + o.exps_[i];
      out.coords_[i] = coords_[i] + action * o.coords_[i];
    }
    return out;
  }

  NilElement inverse() const {
    NilElement out(ctx_);
    std::vector<Int> neg(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i) neg[i] = -exps_[i];
    TruncPoly action = binom_expand(ctx_, neg);
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      out.exps_[i] = neg[i];
      out.coords_[i] = -(action * coords_[i]);
    }
    return out;
  }

  NilElement pow(const Int& e) const {
    if (e == 0) return identity(ctx_);
    if (e < 0) return inverse().pow(-e);
    NilElement base = *this;
    NilElement acc = identity(ctx_);
    Int n = e;
    while (n > 0) {
      if ((n & 1) != 0) acc = acc.mul(base);
      n >>= 1;
      if (n > 0) base = base.mul(base);
    }
    return acc;
  }

  friend bool operator==(const NilElement& a, const NilElement& b) {
    return a.exps_ == b.exps_ && a.coords_ == b.coords_;
  }

  static NilElement compose(const NilCtxPtr& ctx, std::vector<Int> exps,
                            std::vector<TruncPoly> coords) {
    if (static_cast<int>(exps.size()) != ctx->rank() ||
        static_cast<int>(coords.size()) != ctx->rank()) {
      throw DomainError("compose(): malformed parts");
    }
    NilElement out(ctx);
    out.exps_ = std::move(exps);
    out.coords_ = std::move(coords);
    return out;
  }

  // Truncated fundamental identity: sum_j coords_j y_j == T(exps) - 1
  // modulo degree >= 4.
  bool fundamental_identity_holds() const {
    TruncPoly lhs(ctx_);
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      TruncPoly yj(ctx_);
      yj[ctx_->axis_power_slot(static_cast<int>(j), 1)] = 1;
      lhs += coords_[j] * yj;
    }
    TruncPoly rhs = binom_expand(ctx_, exps_);
    rhs[0] -= 1;
    return lhs == rhs;
  }

 private:
  explicit NilElement(NilCtxPtr ctx)
      : ctx_(std::move(ctx)),
        exps_(static_cast<std::size_t>(ctx_->rank()), 0),
        coords_(static_cast<std::size_t>(ctx_->rank()), TruncPoly(ctx_)) {}

  void require_same(const NilElement& o) const {
    if (ctx_->rank() != o.ctx_->rank()) throw DomainError("rank mismatch");
  }

  NilCtxPtr ctx_;
  std::vector<Int> exps_;
  std::vector<TruncPoly> coords_;
};

inline NilElement nil_commutator(const NilElement& a, const NilElement& b) {
  return a.mul(b).mul(a.inverse()).mul(b.inverse());
}

// Truncation of a metabelian normal form: substitute a_i = 1 + y_i into
// every Fox coordinate and drop degrees > 3.
inline NilElement nil_project(const SolvableElement& a, const NilCtxPtr& ctx) {
  if (a.klass() != 2) throw DomainError("nil_project: class-2 elements only");
  if (ctx->rank() != a.rank()) throw DomainError("rank mismatch");
  std::vector<Int> exps = a.top().exps();
  std::vector<TruncPoly> coords;
  coords.reserve(a.coords().size());
  for (const SolvRing& x : a.coords()) {
    TruncPoly p(ctx);
    for (const auto& [key, c] : x.terms()) {
      p += binom_expand(ctx, key.elem->abelianized()).scaled(c);
    }
    coords.push_back(std::move(p));
  }
  return NilElement::compose(ctx, std::move(exps), std::move(coords));
}

inline NilElement nil_project(const SolvableElement& a) {
  return nil_project(a, nil_context(a.rank()));
}

// Weight-w basic commutators [z_{i1},...,z_{iw}] with i1 > i2 <= i3 <= ... <= iw,
// in lexicographic order of their index tuples.
inline std::vector<std::vector<int>> basic_commutators(int rank, int weight) {
  if (weight < 2 || weight > 4) throw DomainError("basic_commutators: weight 2..4 only");
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(weight));
  for (int i1 = 1; i1 <= rank; ++i1) {
    for (int i2 = 1; i2 < i1; ++i2) {
      t[0] = i1;
      t[1] = i2;
      // nondecreasing tail starting at i2
      std::function<void(int, int)> tail = [&](int pos, int lo) {
        if (pos == weight) {
          out.push_back(t);
          return;
        }
        for (int v = lo; v <= rank; ++v) {
          t[pos] = v;
          tail(pos + 1, v);
        }
      };
      tail(2, i2);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline NilElement nil_basic_commutator(const NilCtxPtr& ctx, const std::vector<int>& idx) {
  NilElement e = nil_commutator(NilElement::generator(ctx, idx[0]), NilElement::generator(ctx, idx[1]));
  for (std::size_t p = 2; p < idx.size(); ++p) {
    e = nil_commutator(e, NilElement::generator(ctx, idx[p]));
  }
  return e;
}

// Integer coordinates on gamma_4 / gamma_5 relative to the weight-4
// basic commutators.  The linear system (degree-3 truncated coordinates
// against the precomputed coordinates of every basic commutator) is
// factored once and reused.
class BcSolver {
 public:
  explicit BcSolver(int rank)
      : ctx_(nil_context(rank)), basis_(basic_commutators(rank, 4)) {
    for (int s = 0; s < ctx_->size(); ++s) {
      if (ctx_->degree(s) == 3) deg3_.push_back(s);
    }
    int rows = rank * static_cast<int>(deg3_.size());
    IntMatrix B(rows, static_cast<int>(basis_.size()));
    for (std::size_t col = 0; col < basis_.size(); ++col) {
      NilElement e = nil_basic_commutator(ctx_, basis_[col]);
      int row = 0;
      for (int j = 0; j < rank; ++j) {
        for (int s : deg3_) B.at(row++, static_cast<int>(col)) = e.coords()[j][s];
      }
    }
    snf_ = std::make_unique<SmithDecomposition>(smith_normal_form(B));
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (snf_->D.at(static_cast<int>(i), static_cast<int>(i)) == 0) {
        throw Error("basic commutators do not span gamma_4/gamma_5 (internal)");
      }
    }
  }

  const NilCtxPtr& ctx() const { return ctx_; }
  const std::vector<std::vector<int>>& basis() const { return basis_; }

  std::map<std::vector<int>, Int> coordinates(const NilElement& a) const {
    for (const Int& e : a.exps()) {
      if (e != 0) throw DomainError("bc_coordinates: nontrivial abelianization");
    }
    for (const TruncPoly& p : a.coords()) {
      if (p.low_degree() < 3) {
        throw DomainError("bc_coordinates: element not in gamma_4 mod gamma_5");
      }
    }
    std::vector<Int> b;
    b.reserve(a.coords().size() * deg3_.size());
    for (int j = 0; j < ctx_->rank(); ++j) {
      for (int s : deg3_) b.push_back(a.coords()[j][s]);
    }
    auto sol = solve_integer(*snf_, b);
    if (!sol) throw Error("basic-commutator coordinate system inconsistent (internal)");
    std::map<std::vector<int>, Int> out;
    for (std::size_t i = 0; i < basis_.size(); ++i) out[basis_[i]] = sol->x[i];
    return out;
  }

 private:
  NilCtxPtr ctx_;
  std::vector<std::vector<int>> basis_;
  std::vector<int> deg3_;
  std::unique_ptr<SmithDecomposition> snf_;
};

// [z_{i1}^{k1}, z_{i2}^{k2}, z_{i3}^{k3}, z_{i4}^{k4}] ==
// [z_{i1}, z_{i2}, z_{i3}, z_{i4}]^{k1 k2 k3 k4} in the quotient.
inline bool power_identity_check(const NilCtxPtr& ctx, const std::array<Int, 4>& k,
                                 const std::array<int, 4>& idx) {
  NilElement lhs = nil_commutator(NilElement::generator(ctx, idx[0]).pow(k[0]),
                                  NilElement::generator(ctx, idx[1]).pow(k[1]));
  lhs = nil_commutator(lhs, NilElement::generator(ctx, idx[2]).pow(k[2]));
  lhs = nil_commutator(lhs, NilElement::generator(ctx, idx[3]).pow(k[3]));
  NilElement rhs = nil_basic_commutator(ctx, {idx[0], idx[1], idx[2], idx[3]});
  return lhs == rhs.pow(k[0] * k[1] * k[2] * k[3]);
}

// Closed forms for the coefficients of [z_i,z_1,z_1,z_i], [z_i,z_1,z_1,z_1]
// and [z_i,z_1,z_i,z_i] in the expansion of [prod z^m, prod z^k, prod z^k,
// prod z^m].
inline std::array<Int, 3> eq19_coefficients(const std::vector<Int>& k, const std::vector<Int>& m,
                                            int i) {
  if (i < 2) throw DomainError("eq19_coefficients: index must exceed 1");
  if (static_cast<int>(k.size()) < i || static_cast<int>(m.size()) < i) {
    throw DomainError("eq19_coefficients: vectors shorter than index");
  }
  const Int& k1 = k[0];
  const Int& ki = k[static_cast<std::size_t>(i) - 1];
  const Int& m1 = m[0];
  const Int& mi = m[static_cast<std::size_t>(i) - 1];
  Int delta = k1 * mi - ki * m1;
  return {delta * (k1 * mi + ki * m1), delta * k1 * m1, delta * ki * mi};
}

// Evaluates [prod z_j^{m_j}, prod z_j^{k_j}, prod z_j^{k_j}, prod z_j^{m_j}]
// in the quotient, extracts the basic-commutator coordinates on {z_1, z_i}
// and compares with the closed forms.
inline bool eq19_oracle_check(const BcSolver& solver, const std::vector<Int>& k,
                              const std::vector<Int>& m, int i) {
  const NilCtxPtr& ctx = solver.ctx();
  int r = ctx->rank();
  if (static_cast<int>(k.size()) != r || static_cast<int>(m.size()) != r) {
    throw DomainError("eq19_oracle_check: vector length must equal the rank");
  }
  NilElement u = NilElement::identity(ctx);
  NilElement v = NilElement::identity(ctx);
  for (int j = 1; j <= r; ++j) {
    u = u.mul(NilElement::generator(ctx, j).pow(m[j - 1]));
    v = v.mul(NilElement::generator(ctx, j).pow(k[j - 1]));
  }
  NilElement e = nil_commutator(nil_commutator(nil_commutator(u, v), v), u);
  auto coords = solver.coordinates(e);
  auto alpha = eq19_coefficients(k, m, i);
  return coords.at({i, 1, 1, i}) == alpha[0] && coords.at({i, 1, 1, 1}) == alpha[1] &&
         coords.at({i, 1, i, i}) == alpha[2];
}

struct Lemma7Result {
  std::vector<std::array<long, 4>> solutions;  // (a, b, c, d) in scan order
  bool confirmed;                              // solution set == {(+-1,0,0,+-1)}
};

// Exhaustive scan of g1 = z1^a z2^b, g2 = z1^c z2^d with |a|,|b|,|c|,|d| <= B
// for solutions of [g1,g2,g2,g1] == [z1,z2,z2,z1] mod gamma_5 M_2.
inline Lemma7Result lemma7_scan(int bound) {
  if (bound < 1) throw DomainError("lemma7_scan: bound must be >= 1");
  NilCtxPtr ctx = nil_context(2);
  NilElement z1 = NilElement::generator(ctx, 1);
  NilElement z2 = NilElement::generator(ctx, 2);
  NilElement target = nil_basic_commutator(ctx, {1, 2, 2, 1});

  std::vector<NilElement> p1, p2;  // powers of z1, z2 for -B..B
  for (int t = -bound; t <= bound; ++t) {
    p1.push_back(z1.pow(t));
    p2.push_back(z2.pow(t));
  }
  auto at = [&](const std::vector<NilElement>& p, int t) -> const NilElement& {
    return p[static_cast<std::size_t>(t + bound)];
  };

  Lemma7Result result{{}, true};
  for (int a = -bound; a <= bound; ++a) {
    for (int b = -bound; b <= bound; ++b) {
      NilElement g1 = at(p1, a).mul(at(p2, b));
      for (int c = -bound; c <= bound; ++c) {
        for (int d = -bound; d <= bound; ++d) {
          NilElement g2 = at(p1, c).mul(at(p2, d));
          NilElement lhs = nil_commutator(nil_commutator(nil_commutator(g1, g2), g2), g1);
          if (lhs == target) {
            result.solutions.push_back({a, b, c, d});
          }
        }
      }
    }
  }
  std::size_t expected = 0;
  for (const auto& s : result.solutions) {
    bool pattern = s[1] == 0 && s[2] == 0 && (s[0] == 1 || s[0] == -1) && (s[3] == 1 || s[3] == -1);
    if (!pattern) result.confirmed = false;
    else ++expected;
  }
  if (expected != 4) result.confirmed = false;
  return result;
}

inline std::string lemma7_report(const Lemma7Result& result, int bound) {
  std::string out;
  for (const auto& s : result.solutions) {
    out += "(" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]) +
           "," + std::to_string(s[3]) + ")\n";
  }
  out += "LEMMA7-QUOTIENT: ";
  out += result.confirmed ? "CONFIRMED" : "VIOLATED";
  out += " bound=" + std::to_string(bound) + "\n";
  return out;
}

struct Eq19ScanResult {
  long checked = 0;
  std::vector<std::pair<std::vector<Int>, std::vector<Int>>> failures;
  bool confirmed() const { return failures.empty(); }
};

// Full-grid oracle check |k_j|, |m_j| <= B.  The grid is partitioned
// across threads; results are merged in partition order.
inline Eq19ScanResult scan_eq19(int rank, int bound, int i, unsigned threads = 0) {
  if (bound < 1) throw DomainError("scan_eq19: bound must be >= 1");
  if (rank < 2) throw DomainError("scan_eq19: rank must be >= 2");
  if (i < 2 || i > rank) throw DomainError("scan_eq19: index out of range");
  BcSolver solver(rank);
  long side = 2L * bound + 1;
  long per_vec = 1;
  for (int t = 0; t < rank; ++t) per_vec *= side;
  long total = per_vec * per_vec;

  auto decode = [&](long code) {
    std::pair<std::vector<Int>, std::vector<Int>> km;
    km.first.resize(static_cast<std::size_t>(rank));
    km.second.resize(static_cast<std::size_t>(rank));
    for (int t = 0; t < rank; ++t) {
      km.first[t] = static_cast<long>(code % side) - bound;
      code /= side;
    }
    for (int t = 0; t < rank; ++t) {
      km.second[t] = static_cast<long>(code % side) - bound;
      code /= side;
    }
    return km;
  };

  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min<unsigned>(threads, 8);
  std::vector<Eq19ScanResult> parts(threads);
  auto worker = [&](unsigned tid) {
    Eq19ScanResult& mine = parts[tid];
    for (long code = tid; code < total; code += threads) {
      auto [k, m] = decode(code);
      ++mine.checked;
      if (!eq19_oracle_check(solver, k, m, i)) {
        mine.failures.emplace_back(k, m);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();

  Eq19ScanResult out;
  for (const auto& p : parts) {
    out.checked += p.checked;
    out.failures.insert(out.failures.end(), p.failures.begin(), p.failures.end());
  }
  std::sort(out.failures.begin(), out.failures.end());  // thread-count independent
  return out;
}

}  // namespace solvkit
