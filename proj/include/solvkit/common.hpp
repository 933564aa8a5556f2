#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace solvkit {

// All exponents, coefficients and matrix entries are exact integers.
using Int = boost::multiprecision::cpp_int;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input text; `position` is a byte offset into the source string.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Violated precondition: out-of-range generator, zero vector, context
// mismatch, ...
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

inline Int gcd(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

struct ExtGcd {
  Int g;  // gcd(a, b) >= 0
  Int x;  // a*x + b*y == g
  Int y;
};

inline ExtGcd extended_gcd(Int a, Int b) {
  Int old_r = std::move(a), r = std::move(b);
  Int old_x = 1, x = 0;
  Int old_y = 0, y = 1;
  while (r != 0) {
    Int q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_x -= q * x;
    std::swap(old_x, x);
    old_y -= q * y;
    std::swap(old_y, y);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_x = -old_x;
    old_y = -old_y;
  }
  return {old_r, old_x, old_y};
}

// gcd g of all entries together with coefficients m such that <m, v> == g.
inline std::pair<Int, std::vector<Int>> bezout(const std::vector<Int>& v) {
  Int g = 0;
  std::vector<Int> m(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (g == 0) {
      g = v[i] < 0 ? Int(-v[i]) : v[i];
      m[i] = v[i] < 0 ? -1 : 1;
      continue;
    }
    ExtGcd e = extended_gcd(g, v[i]);
    for (std::size_t j = 0; j < i; ++j) m[j] *= e.x;
    m[i] = e.y;
    g = e.g;
  }
  return {g, m};
}

// Generalized binomial coefficient C(n, k); n may be negative or huge,
// k is a small machine integer.  Exact: the running product of j
// consecutive integers is divisible by j!.
inline Int binomial(const Int& n, int k) {
  if (k < 0) return 0;
  Int result = 1;
  for (int t = 0; t < k; ++t) {
    result *= n - t;
    result /= t + 1;
  }
  return result;
}

inline long to_long(const Int& n, const char* what = "value") {
  if (n < std::numeric_limits<long>::min() ||
      n > std::numeric_limits<long>::max()) {
    throw DomainError(std::string(what) + " out of machine range");
  }
  return static_cast<long>(n);
}

inline std::string to_string(const Int& n) { return n.str(); }

}  // namespace solvkit
