#include "eisen/linalg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace eisen {

void SparseVec::add_term(long idx, const Rat& c) {
  if (c == 0) return;
  auto it = std::lower_bound(
      e.begin(), e.end(), idx,
      [](const std::pair<long, Rat>& p, long i) { return p.first < i; });
  if (it != e.end() && it->first == idx) {
    it->second += c;
    if (it->second == 0) e.erase(it);
  } else {
    e.insert(it, {idx, c});
  }
}

SparseVec& SparseVec::operator+=(const SparseVec& o) {
  if (o.e.empty()) return *this;
  std::vector<std::pair<long, Rat>> merged;
  merged.reserve(e.size() + o.e.size());
  std::size_t i = 0, j = 0;
  while (i < e.size() || j < o.e.size()) {
    if (j == o.e.size() || (i < e.size() && e[i].first < o.e[j].first)) {
      merged.push_back(e[i++]);
    } else if (i == e.size() || o.e[j].first < e[i].first) {
      merged.push_back(o.e[j++]);
    } else {
      Rat s = e[i].second + o.e[j].second;
      if (s != 0) merged.emplace_back(e[i].first, s);
      ++i;
      ++j;
    }
  }
  e = std::move(merged);
  return *this;
}

SparseVec SparseVec::scaled(const Rat& c) const {
  SparseVec out;
  if (c == 0) return out;
  out.e.reserve(e.size());
  for (const auto& [i, v] : e) out.e.emplace_back(i, v * c);
  return out;
}

void SparseVec::negate() {
  for (auto& [i, v] : e) v = -v;
}

QMat QMat::identity(long n) {
  QMat m(n, n);
  for (long i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool QMat::operator==(const QMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

QMat QMat::operator*(const QMat& o) const {
  if (cols_ != o.rows_) throw std::logic_error("QMat: shape mismatch in mul");
  QMat out(rows_, o.cols_);
  for (long i = 0; i < rows_; ++i) {
    for (long k = 0; k < cols_; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (long j = 0; j < o.cols_; ++j) {
        const Rat& y = o.at(k, j);
        if (y != 0) out.at(i, j) += x * y;
      }
    }
  }
  return out;
}

QMat QMat::operator-(const QMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::logic_error("QMat: shape mismatch in sub");
  QMat out(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
  return out;
}

QMat QMat::operator+(const QMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::logic_error("QMat: shape mismatch in add");
  QMat out(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
  return out;
}

QMat QMat::transposed() const {
  QMat out(cols_, rows_);
  for (long i = 0; i < rows_; ++i)
    for (long j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

void QMat::add_scaled_identity(const Rat& c) {
  if (rows_ != cols_) throw std::logic_error("QMat: not square");
  for (long i = 0; i < rows_; ++i) at(i, i) += c;
}

bool QMat::is_zero() const {
  for (const Rat& x : a_)
    if (x != 0) return false;
  return true;
}

SparseVec QMat::col_sparse(long c) const {
  SparseVec v;
  for (long r = 0; r < rows_; ++r)
    if (at(r, c) != 0) v.e.emplace_back(r, at(r, c));
  return v;
}

void QMat::set_col(long c, const SparseVec& v) {
  for (long r = 0; r < rows_; ++r) at(r, c) = 0;
  for (const auto& [r, x] : v.e) at(r, c) = x;
}

void QMat::make_columns_integral() {
  for (long j = 0; j < cols_; ++j) {
    mpz_class den = 1, num_gcd = 0;
    for (long i = 0; i < rows_; ++i) {
      const Rat& x = at(i, j);
      if (x != 0) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(),
                          x.get_den().get_mpz_t());
    }
    for (long i = 0; i < rows_; ++i) {
      Rat& x = at(i, j);
      if (x == 0) continue;
      x *= den;
      x.canonicalize();
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(),
              x.get_num().get_mpz_t());
    }
    if (num_gcd > 1)
      for (long i = 0; i < rows_; ++i) {
        Rat& x = at(i, j);
        if (x != 0) {
          x /= num_gcd;
          x.canonicalize();
        }
      }
  }
}

namespace {
// bit size of a rational, used to pick small pivots
std::size_t rat_size(const Rat& x) {
  return mpz_sizeinbase(x.get_num().get_mpz_t(), 2) +
         mpz_sizeinbase(x.get_den().get_mpz_t(), 2);
}
}  // namespace

std::vector<long> rref(QMat& m) {
  std::vector<long> pivots;
  long row = 0;
  for (long col = 0; col < m.cols() && row < m.rows(); ++col) {
    long best = -1;
    std::size_t best_size = 0;
    for (long r = row; r < m.rows(); ++r) {
      if (m.at(r, col) == 0) continue;
      std::size_t s = rat_size(m.at(r, col));
      if (best == -1 || s < best_size) {
        best = r;
        best_size = s;
      }
    }
    if (best == -1) continue;
    if (best != row)
      for (long c = col; c < m.cols(); ++c)
        std::swap(m.at(row, c), m.at(best, c));
    Rat inv = 1 / m.at(row, col);
    for (long c = col; c < m.cols(); ++c)
      if (m.at(row, c) != 0) m.at(row, c) *= inv;
    for (long r = 0; r < m.rows(); ++r) {
      if (r == row) continue;
      Rat f = m.at(r, col);
      if (f == 0) continue;
      for (long c = col; c < m.cols(); ++c) {
        const Rat& x = m.at(row, c);
        if (x != 0) m.at(r, c) -= f * x;
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

long rank(QMat m) { return static_cast<long>(rref(m).size()); }

QMat kernel_basis(const QMat& a) {
  QMat m = a;
  std::vector<long> pivots = rref(m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (long p : pivots) is_pivot[p] = true;
  std::vector<long> free_cols;
  for (long c = 0; c < a.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  QMat k(a.cols(), static_cast<long>(free_cols.size()));
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    long f = free_cols[j];
    k.at(f, j) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      k.at(pivots[r], j) = -m.at(static_cast<long>(r), f);
  }
  k.make_columns_integral();
  return k;
}

QMat column_space_basis(const QMat& a) {
  QMat m = a;
  std::vector<long> pivots = rref(m);
  QMat b(a.rows(), static_cast<long>(pivots.size()));
  for (std::size_t j = 0; j < pivots.size(); ++j)
    for (long i = 0; i < a.rows(); ++i) b.at(i, j) = a.at(i, pivots[j]);
  b.make_columns_integral();
  return b;
}

QMat restrict_operator(const QMat& b, const QMat& a_of_b) {
  QMat m = b;
  std::vector<long> piv_cols = rref(m);
  if (static_cast<long>(piv_cols.size()) != b.cols())
    throw std::logic_error("restrict_operator: basis not full rank");
  // pivot rows of b form an invertible d x d block; find them via the
  // transpose rref
  std::vector<long> piv_rows;
  {
    QMat bt = b.transposed();
    piv_rows = rref(bt);
  }
  long d = b.cols();
  QMat block(d, d), rhs(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      block.at(i, j) = b.at(piv_rows[i], j);
      rhs.at(i, j) = a_of_b.at(piv_rows[i], j);
    }
  // solve block * r = rhs
  QMat aug(d, 2 * d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      aug.at(i, j) = block.at(i, j);
      aug.at(i, d + j) = rhs.at(i, j);
    }
  std::vector<long> p = rref(aug);
  if (static_cast<long>(p.size()) != d || p.back() != d - 1)
    throw std::logic_error("restrict_operator: singular pivot block");
  QMat r(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) r.at(i, j) = aug.at(i, d + j);
  if (!(b * r == a_of_b))
    throw std::logic_error("restrict_operator: subspace not stable");
  return r;
}

SparseRref sparse_rref(std::vector<SparseVec> in_rows, long ncols) {
  SparseRref out;
  out.pivot_of_col.assign(ncols, -1);

  // col -> set of row ids currently containing it
  std::vector<std::set<long>> col_rows(ncols);
  std::vector<SparseVec> rows = std::move(in_rows);
  std::vector<bool> processed(rows.size(), false);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r].e) col_rows[c].insert(r);

  while (true) {
    // pick the unprocessed nonempty row with fewest entries
    long best = -1;
    std::size_t best_n = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (processed[r] || rows[r].empty()) continue;
      if (best == -1 || rows[r].e.size() < best_n) {
        best = static_cast<long>(r);
        best_n = rows[r].e.size();
      }
    }
    if (best == -1) break;

    // pivot on the column of this row with fewest other occurrences
    long pcol = -1;
    std::size_t pcnt = 0;
    for (const auto& [c, v] : rows[best].e) {
      std::size_t n = col_rows[c].size();
      if (pcol == -1 || n < pcnt) {
        pcol = c;
        pcnt = n;
      }
    }

    // normalize pivot row
    {
      Rat inv = 1;
      for (const auto& [c, v] : rows[best].e)
        if (c == pcol) {
          inv = 1 / v;
          break;
        }
      if (inv != 1)
        for (auto& [c, v] : rows[best].e) v *= inv;
    }
    processed[best] = true;
    out.pivot_of_col[pcol] = best;

    // eliminate pcol from every other row containing it
    std::vector<long> touch(col_rows[pcol].begin(), col_rows[pcol].end());
    for (long r : touch) {
      if (r == best) continue;
      Rat f = 0;
      for (const auto& [c, v] : rows[r].e)
        if (c == pcol) {
          f = v;
          break;
        }
      if (f == 0) continue;
      for (const auto& [c, v] : rows[r].e) col_rows[c].erase(r);
      rows[r] += rows[best].scaled(-f);
      for (const auto& [c, v] : rows[r].e) col_rows[c].insert(r);
    }
  }

  // eager elimination keeps every pivot column confined to its own row,
  // so the result is already fully reduced
  out.rows = std::move(rows);
  for (long c = 0; c < ncols; ++c)
    if (out.pivot_of_col[c] != -1) ++out.rank;
  return out;
}

}  // namespace eisen
