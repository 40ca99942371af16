#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace eisen {

using Rat = mpq_class;

/// Sparse rational vector, entries sorted by index, no zero entries.
struct SparseVec {
  std::vector<std::pair<long, Rat>> e;

  bool empty() const { return e.empty(); }
  void add_term(long idx, const Rat& c);  // accumulate, keeps order
  SparseVec& operator+=(const SparseVec& o);
  SparseVec scaled(const Rat& c) const;
  void negate();
};

/// Dense rational matrix, row-major.
class QMat {
 public:
  QMat() : rows_(0), cols_(0) {}
  QMat(long rows, long cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static QMat identity(long n);

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  Rat& at(long r, long c) { return a_[r * cols_ + c]; }
  const Rat& at(long r, long c) const { return a_[r * cols_ + c]; }

  bool operator==(const QMat& o) const;
  QMat operator*(const QMat& o) const;
  QMat operator-(const QMat& o) const;
  QMat operator+(const QMat& o) const;
  QMat transposed() const;
  void add_scaled_identity(const Rat& c);  // this += c * I
  bool is_zero() const;

  /// Column c as a sparse vector.
  SparseVec col_sparse(long c) const;
  void set_col(long c, const SparseVec& v);

  /// Scale columns so every entry is integral and each column primitive.
  void make_columns_integral();

 private:
  long rows_, cols_;
  std::vector<Rat> a_;
};

/// Reduced row echelon form. Returns pivot column indices; the matrix is
/// modified in place.
std::vector<long> rref(QMat& m);

long rank(QMat m);

/// Basis of the right kernel of a, as columns (integral, primitive).
QMat kernel_basis(const QMat& a);

/// Columns of a spanning its column space (integral, primitive).
QMat column_space_basis(const QMat& a);

/// Given a full-column-rank basis matrix b (n x d) and the images a_of_b
/// (n x d) of its columns under an operator that stabilizes span(b),
/// return the d x d matrix r with b * r == a_of_b. Throws std::logic_error
/// if span(b) is not stable.
QMat restrict_operator(const QMat& b, const QMat& a_of_b);

/// Row-reduce the sparse rows over Q. On return, `pivot_of_col[c]` is the
/// row index whose pivot is column c (or -1), and each returned row is
/// normalized with pivot coefficient 1. Designed for very sparse inputs
/// (the Manin relation matrices have at most three entries per row).
struct SparseRref {
  std::vector<SparseVec> rows;
  std::vector<long> pivot_of_col;  // size = ncols
  long rank = 0;
};
SparseRref sparse_rref(std::vector<SparseVec> rows, long ncols);

}  // namespace eisen
