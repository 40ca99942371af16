#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "eisen/arith.hpp"
#include "eisen/linalg.hpp"
#include "eisen/p1.hpp"

namespace eisen {

/// Genus of X_0(N) for square-free N, by the index/elliptic-point/cusp
/// count formula.
long genus(const SquareFreeLevel& n);

/// Dimension of the new part of S_2(Gamma_0(N)), by recursion on divisors.
long new_dimension(const SquareFreeLevel& n);

class ModularSymbolSpace;
using SpacePtr = std::shared_ptr<const ModularSymbolSpace>;

/// A rational newform: one-dimensional rational eigenspace of the
/// star-fixed new cuspidal subspace. Value type; eigenvalues are computed
/// on demand and cached (thread-safe).
class Newform {
 public:
  long level() const;
  int label() const;
  const std::map<long, int>& up_signs() const;
  /// Hecke eigenvalue a(n), n >= 1. Multiplicative; a(1) = 1.
  mpz_class a(long n) const;
  /// a(p) for prime p, straight from the symbol engine.
  mpz_class a_prime(long p) const;

 private:
  friend class ModularSymbolSpace;
  struct Data;
  std::shared_ptr<Data> d_;
  mpz_class prime_power_(long p, long k) const;
};

struct NewformScan {
  std::vector<Newform> forms;
  long nonrational_dim = 0;  // star-fixed new dimension skipped as non-rational
};

/// Weight-2 modular symbols for Gamma_0(N), square-free N: Manin-symbol
/// presentation, boundary map, cuspidal/new subspaces, Hecke and
/// Atkin-Lehner actions, rational newform extraction. Immutable after
/// construction except for internal memo tables (mutex-guarded).
class ModularSymbolSpace : public std::enable_shared_from_this<ModularSymbolSpace> {
 public:
  static SpacePtr build(const SquareFreeLevel& n);

  const SquareFreeLevel& level() const { return level_; }
  long ambient_dim() const { return ambient_dim_; }
  long cuspidal_dim() const { return cuspidal_basis_.cols(); }
  const QMat& cuspidal_basis() const { return cuspidal_basis_; }

  /// Matrix of T_n (U_p when p | N) on the cuspidal subspace.
  QMat hecke_matrix(long n) const;
  /// Matrix of the Atkin-Lehner involution w_p, p | N, on the cuspidal
  /// subspace.
  QMat atkin_lehner_matrix(long p) const;
  /// Basis of the new cuspidal subspace, columns in ambient coordinates.
  const QMat& new_subspace() const;
  /// Basis of the star-fixed part of the new cuspidal subspace.
  const QMat& star_fixed_new_subspace() const;

  /// All rational newforms at this level, deterministically labelled.
  /// Memoized.
  const NewformScan& rational_newforms() const;

  // Ambient-space operators (dimension ambient_dim x ambient_dim).
  QMat hecke_ambient(long n) const;
  QMat star_ambient() const;
  QMat atkin_lehner_ambient(long p) const;

  // Internals used by Newform's eigenvalue accessor.
  const P1& p1() const { return p1_; }
  const SparseVec& symbol_to_basis(long p1_index) const {
    return sym_to_basis_[p1_index];
  }

 private:
  explicit ModularSymbolSpace(const SquareFreeLevel& n);

  // {oo, num/den} expanded over the ambient basis
  SparseVec path_from_infinity(long num, long den) const;
  // degeneracy map to level N/p; mult = 1 or p
  QMat degeneracy_ambient(long p, long mult) const;
  SparseVec symbol_vec(long u, long v) const;
  Newform make_newform(const QMat& eigvec_ambient) const;

  SquareFreeLevel level_;
  P1 p1_;
  long ambient_dim_ = 0;
  std::vector<SparseVec> sym_to_basis_;  // by P^1 index
  std::vector<long> basis_syms_;         // P^1 index of each basis generator
  std::vector<Sl2> basis_lifts_;
  std::vector<long> cusp_divisors_;
  QMat cuspidal_basis_;  // ambient_dim x 2g

  mutable std::mutex mu_;
  mutable std::optional<QMat> new_basis_;
  mutable std::optional<QMat> star_new_basis_;
  mutable std::optional<NewformScan> newforms_;
  mutable std::optional<QMat> star_cache_;
};

/// Process-wide registry of spaces; builds on first use. Deterministic.
SpacePtr space_for_level(long n);

/// Sturm-style prime bound psi(N)/6, rounded up.
long sturm_prime_bound(const SquareFreeLevel& n);

}  // namespace eisen
