#pragma once

// Integer-lattice algebra on abelianizations: Smith normal form with
// unimodular transforms, row-lattice rank, primitivity and
// direct-factor tests, unimodular completion, exact linear solving.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "solvkit/common.hpp"

namespace solvkit {

class IntMatrix {
 public:
  IntMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0) {
    if (rows < 1 || cols < 1) throw DomainError("matrix dimensions must be positive");
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty() || rows[0].empty()) {
      throw DomainError("matrix dimensions must be positive");
    }
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i) {
      if (static_cast<int>(rows[i].size()) != m.cols()) {
        throw DomainError("ragged rows");
      }
      for (int j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw DomainError("matrix shape mismatch");
    IntMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
      for (int k = 0; k < cols_; ++k) {
        if (at(i, k) == 0) continue;
        for (int j = 0; j < o.cols_; ++j) out.at(i, j) += at(i, k) * o.at(k, j);
      }
    }
    return out;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  void swap_rows(int i, int j) {
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
  }
  void swap_cols(int i, int j) {
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
  }
  void scale_row(int i, const Int& s) {
    for (int c = 0; c < cols_; ++c) at(i, c) *= s;
  }
  // row i += q * row j
  void add_row(int i, int j, const Int& q) {
    for (int c = 0; c < cols_; ++c) at(i, c) += q * at(j, c);
  }
  // col i += q * col j
  void add_col(int i, int j, const Int& q) {
    for (int r = 0; r < rows_; ++r) at(r, i) += q * at(r, j);
  }

 private:
  int rows_, cols_;
  std::vector<Int> a_;
};

// Rows of comma-separated integers, one row per line.
inline std::string format_matrix(const IntMatrix& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += m.at(i, j).str();
    }
    out += '\n';
  }
  return out;
}

inline IntMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<Int>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<Int> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t b = cell.find_first_not_of(" \t\r");
      std::size_t e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw ParseError("empty matrix entry", 0);
      try {
        row.emplace_back(cell.substr(b, e - b + 1));
      } catch (const std::exception&) {
        throw ParseError("bad matrix entry '" + cell + "'", 0);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix", 0);
  return IntMatrix::from_rows(rows);
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline Int determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw DomainError("determinant of non-square matrix");
  int n = m.rows();
  Int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i) {
        if (m.at(i, k) != 0) {
          p = i;
          break;
        }
      }
      if (p < 0) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
      }
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

struct SmithDecomposition {
  IntMatrix U;  // m x m unimodular
  IntMatrix D;  // m x r diagonal, nonnegative, d1 | d2 | ...
  IntMatrix V;  // r x r unimodular; U*A*V == D
};

// Deterministic SNF: the pivot is always the nonzero entry of minimal
// absolute value in the remaining submatrix, ties broken by lowest
// (row, col); sign flips are folded into U.
inline SmithDecomposition smith_normal_form(const IntMatrix& A) {
  int m = A.rows(), r = A.cols();
  SmithDecomposition s{IntMatrix::identity(m), A, IntMatrix::identity(r)};
  IntMatrix& D = s.D;
  IntMatrix& U = s.U;
  IntMatrix& V = s.V;
  int n = std::min(m, r);
  for (int t = 0; t < n; ++t) {
    for (;;) {
      int pi = -1, pj = -1;
      Int best = 0;
      for (int i = t; i < m; ++i) {
        for (int j = t; j < r; ++j) {
          const Int& v = D.at(i, j);
          if (v == 0) continue;
          Int av = v < 0 ? Int(-v) : v;
          if (pi < 0 || av < best) {
            best = av;
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) return s;  // remaining submatrix is zero
      if (pi != t) {
        D.swap_rows(t, pi);
        U.swap_rows(t, pi);
      }
      if (pj != t) {
        D.swap_cols(t, pj);
        V.swap_cols(t, pj);
      }
      if (D.at(t, t) < 0) {
        D.scale_row(t, -1);
        U.scale_row(t, -1);
      }
      bool dirty = false;
      for (int i = t + 1; i < m; ++i) {
        if (D.at(i, t) == 0) continue;
        Int q = D.at(i, t) / D.at(t, t);
        if (q != 0) {
          D.add_row(i, t, -q);
          U.add_row(i, t, -q);
        }
        if (D.at(i, t) != 0) dirty = true;
      }
      for (int j = t + 1; j < r; ++j) {
        if (D.at(t, j) == 0) continue;
        Int q = D.at(t, j) / D.at(t, t);
        if (q != 0) {
          D.add_col(j, t, -q);
          V.add_col(j, t, -q);
        }
        if (D.at(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      // pivot row/column clean: enforce that d_t divides the rest
      bool fixed = true;
      for (int i = t + 1; i < m && fixed; ++i) {
        for (int j = t + 1; j < r && fixed; ++j) {
          if (D.at(i, j) % D.at(t, t) != 0) {
            D.add_row(t, i, 1);
            U.add_row(t, i, 1);
            fixed = false;
          }
        }
      }
      if (fixed) break;
    }
  }
  return s;
}

// Rank of the subgroup of Z^r generated by the rows.
inline int rab(const IntMatrix& A) {
  SmithDecomposition s = smith_normal_form(A);
  int n = std::min(A.rows(), A.cols());
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (s.D.at(i, i) != 0) ++rank;
  }
  return rank;
}

// gcd of entries is 1.  The zero vector is rejected.
inline bool is_primitive(const std::vector<Int>& v) {
  Int g = 0;
  for (const Int& e : v) g = gcd(g, e);
  if (g == 0) throw DomainError("is_primitive: zero vector");
  return g == 1;
}

// The row span is a direct summand of Z^r iff every nonzero diagonal
// entry of the SNF equals 1.
inline bool is_direct_factor(const IntMatrix& A) {
  SmithDecomposition s = smith_normal_form(A);
  int n = std::min(A.rows(), A.cols());
  for (int i = 0; i < n; ++i) {
    const Int& d = s.D.at(i, i);
    if (d != 0 && d != 1) return false;
  }
  return true;
}

// Adjugate-based inverse of a unimodular matrix.
inline IntMatrix unimodular_inverse(const IntMatrix& M) {
  if (M.rows() != M.cols()) throw DomainError("inverse of non-square matrix");
  int n = M.rows();
  Int det = determinant(M);
  if (det != 1 && det != -1) throw DomainError("matrix is not unimodular");
  IntMatrix inv(n, n);
  if (n == 1) {
    inv.at(0, 0) = det;
    return inv;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      IntMatrix minor(n - 1, n - 1);
      for (int a = 0, ai = 0; a < n; ++a) {
        if (a == i) continue;
        for (int b = 0, bj = 0; b < n; ++b) {
          if (b == j) continue;
          minor.at(ai, bj) = M.at(a, b);
          ++bj;
        }
        ++ai;
      }
      Int c = determinant(minor);
      if ((i + j) % 2) c = -c;
      inv.at(j, i) = c * det;  // det is its own inverse here
    }
  }
  return inv;
}

// An r x r unimodular matrix whose first row is v; v must be primitive.
inline IntMatrix unimodular_complete(const std::vector<Int>& v) {
  if (!is_primitive(v)) throw DomainError("unimodular_complete: vector is not primitive");
  int r = static_cast<int>(v.size());
  IntMatrix row(1, r);
  for (int j = 0; j < r; ++j) row.at(0, j) = v[j];
  SmithDecomposition s = smith_normal_form(row);
  // U (1x1, = +-1) * v * V = e1, so v = U^-1 e1 V^-1 = +-(first row of V^-1).
  IntMatrix B = unimodular_inverse(s.V);
  if (s.U.at(0, 0) == -1) {
    B.scale_row(0, -1);
    if (r > 1) {
      B.scale_row(1, -1);
    }
  }
  for (int j = 0; j < r; ++j) {
    if (B.at(0, j) != v[j]) throw Error("unimodular_complete: internal check failed");
  }
  return B;
}

// Exact solution of A*x == b over the integers via the SNF.  Returns
// nullopt when no integer solution exists.  `unique` is set when the
// solution is the only one (A has full column rank).
struct IntegerSolution {
  std::vector<Int> x;
  bool unique;
};

inline std::optional<IntegerSolution> solve_integer(const SmithDecomposition& s,
                                                    const std::vector<Int>& b) {
  int m = s.D.rows(), r = s.D.cols();
  if (static_cast<int>(b.size()) != m) throw DomainError("solve_integer: size mismatch");
  std::vector<Int> c(m, 0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) c[i] += s.U.at(i, j) * b[j];
  }
  std::vector<Int> y(r, 0);
  bool unique = true;
  int n = std::min(m, r);
  for (int i = 0; i < n; ++i) {
    const Int& d = s.D.at(i, i);
    if (d == 0) {
      if (c[i] != 0) return std::nullopt;
      unique = false;
    } else {
      if (c[i] % d != 0) return std::nullopt;
      y[i] = c[i] / d;
    }
  }
  for (int i = n; i < m; ++i) {
    if (c[i] != 0) return std::nullopt;
  }
  if (r > m) unique = false;
  IntegerSolution sol;
  sol.x.assign(r, 0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) sol.x[i] += s.V.at(i, j) * y[j];
  }
  sol.unique = unique;
  return sol;
}

inline std::optional<IntegerSolution> solve_integer(const IntMatrix& A,
                                                    const std::vector<Int>& b) {
  return solve_integer(smith_normal_form(A), b);
}

}  // namespace solvkit
