#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eisen {

struct NotSquareFree : std::domain_error {
  explicit NotSquareFree(long n)
      : std::domain_error("not square-free: " + std::to_string(n)) {}
};

bool is_prime(long n);

/// Primes p with p < bound, ascending.
std::vector<long> primes_below(long bound);

/// Smallest prime strictly greater than n.
long next_prime(long n);

/// A square-free positive integer, kept as its sorted list of prime factors.
/// The empty list is the level 1.
struct SquareFreeLevel {
  std::vector<long> primes;  // strictly increasing
  mpz_class value;           // product of primes

  static SquareFreeLevel from_primes(std::vector<long> ps);

  bool contains(long p) const;
  std::size_t count() const { return primes.size(); }
  /// value as a machine integer; throws std::overflow_error if it does not fit.
  long small_value() const;
};

SquareFreeLevel factor_squarefree(long n);

struct PhiPsi {
  mpz_class phi;  // product of (p - 1)
  mpz_class psi;  // product of (p + 1)
};
PhiPsi phi_psi(const SquareFreeLevel& n);

/// floor(log) style helpers over machine ints with exact semantics.
long mod_nonneg(long a, long n);
long inv_mod(long a, long n);  // throws std::domain_error if not invertible
long pow_mod(long base, long exp, long mod);

/// True iff q mod p is an ell-th power in (Z/pZ)^*. Vacuously true when
/// ell does not divide p - 1. Requires q != p, both prime.
bool is_lth_power_residue(long q, long p, long ell);

/// ell^v where ell^v exactly divides n (n >= 1).
mpz_class ell_part(const mpz_class& n, long ell);

/// v such that ell^v exactly divides n.
long ell_valuation(const mpz_class& n, long ell);

/// n with every factor of 2 and 3 removed.
mpz_class strip_two_three(const mpz_class& n);

}  // namespace eisen
