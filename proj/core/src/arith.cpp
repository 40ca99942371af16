#include "eisen/arith.hpp"

#include <algorithm>
#include <numeric>

namespace eisen {

bool is_prime(long n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (long d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<long> primes_below(long bound) {
  std::vector<long> out;
  if (bound <= 2) return out;
  std::vector<bool> sieve(static_cast<std::size_t>(bound), true);
  for (long i = 2; i < bound; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (long j = i * i; j < bound; j += i) sieve[j] = false;
  }
  return out;
}

long next_prime(long n) {
  long m = n < 1 ? 2 : n + 1;
  while (!is_prime(m)) ++m;
  return m;
}

SquareFreeLevel SquareFreeLevel::from_primes(std::vector<long> ps) {
  std::sort(ps.begin(), ps.end());
  SquareFreeLevel out;
  out.value = 1;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!is_prime(ps[i]))
      throw std::domain_error("not prime: " + std::to_string(ps[i]));
    if (i > 0 && ps[i] == ps[i - 1])
      throw std::domain_error("repeated prime: " + std::to_string(ps[i]));
    out.value *= ps[i];
  }
  out.primes = std::move(ps);
  return out;
}

bool SquareFreeLevel::contains(long p) const {
  return std::binary_search(primes.begin(), primes.end(), p);
}

long SquareFreeLevel::small_value() const {
  if (!value.fits_slong_p()) throw std::overflow_error("level too large");
  return value.get_si();
}

SquareFreeLevel factor_squarefree(long n) {
  if (n < 1) throw std::domain_error("factor_squarefree: n must be positive");
  std::vector<long> ps;
  long m = n;
  for (long d = 2; d * d <= m; ++d) {
    if (m % d != 0) continue;
    m /= d;
    if (m % d == 0) throw NotSquareFree(n);
    ps.push_back(d);
  }
  if (m > 1) ps.push_back(m);
  return SquareFreeLevel::from_primes(std::move(ps));
}

PhiPsi phi_psi(const SquareFreeLevel& n) {
  PhiPsi out{1, 1};
  for (long p : n.primes) {
    out.phi *= p - 1;
    out.psi *= p + 1;
  }
  return out;
}

long mod_nonneg(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

namespace {
// returns gcd, sets x with a*x == gcd (mod n)
long xgcd_coeff(long a, long n, long& x) {
  long r0 = a, r1 = n, x0 = 1, x1 = 0;
  while (r1 != 0) {
    long q = r0 / r1;
    long r2 = r0 - q * r1;
    long x2 = x0 - q * x1;
    r0 = r1;
    r1 = r2;
    x0 = x1;
    x1 = x2;
  }
  x = x0;
  return r0;
}
}  // namespace

long inv_mod(long a, long n) {
  a = mod_nonneg(a, n);
  long x;
  long g = xgcd_coeff(a, n, x);
  if (g != 1 && g != -1)
    throw std::domain_error("not invertible: " + std::to_string(a) + " mod " +
                            std::to_string(n));
  if (g == -1) x = -x;
  return mod_nonneg(x, n);
}

long pow_mod(long base, long exp, long mod) {
  mpz_class b(base), m(mod), r;
  mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exp),
              m.get_mpz_t());
  return r.get_si();
}

bool is_lth_power_residue(long q, long p, long ell) {
  if (q == p) throw std::domain_error("is_lth_power_residue: q == p");
  long g = std::gcd(ell, p - 1);
  return pow_mod(mod_nonneg(q, p), (p - 1) / g, p) == 1;
}

mpz_class ell_part(const mpz_class& n, long ell) {
  if (n <= 0) throw std::domain_error("ell_part: n must be positive");
  mpz_class out = 1, m = n;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(ell))) {
    m /= ell;
    out *= ell;
  }
  return out;
}

long ell_valuation(const mpz_class& n, long ell) {
  if (n == 0) throw std::domain_error("ell_valuation of zero");
  long v = 0;
  mpz_class m = n;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(ell))) {
    m /= ell;
    ++v;
  }
  return v;
}

mpz_class strip_two_three(const mpz_class& n) {
  mpz_class m = abs(n);
  while (m != 0 && mpz_divisible_ui_p(m.get_mpz_t(), 2)) m /= 2;
  while (m != 0 && mpz_divisible_ui_p(m.get_mpz_t(), 3)) m /= 3;
  return m;
}

}  // namespace eisen
