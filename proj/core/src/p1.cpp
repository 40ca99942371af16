#include "eisen/p1.hpp"

#include <mutex>
#include <numeric>
#include <stdexcept>

#include "eisen/arith.hpp"

namespace eisen {

P1::P1(long n) : n_(n) {
  if (n < 1) throw std::domain_error("P1: level must be positive");
  if (n == 1) {
    reps_.emplace_back(0, 0);
    table_[0] = 0;
    return;
  }
  // one orbit per divisor g of n: representatives (g : v), v determined
  // modulo n/g
  std::vector<long> divisors;
  for (long g = 1; g <= n; ++g)
    if (n % g == 0) divisors.push_back(g);
  for (long g : divisors) {
    long m = n / g;
    for (long w = 0; w < m; ++w) {
      // lift w to v with gcd(v, g) = 1 so that (g : v) is a valid point
      long v = w;
      while (std::gcd(v, g) != 1) v += m;
      auto can = normalize(g, v);
      long long key = static_cast<long long>(can.first) * n_ + can.second;
      if (table_.find(key) == table_.end()) {
        table_[key] = static_cast<long>(reps_.size());
        reps_.push_back(can);
      }
    }
  }
}

std::pair<long, long> P1::normalize(long u, long v) const {
  if (n_ == 1) return {0, 0};
  u = mod_nonneg(u, n_);
  v = mod_nonneg(v, n_);
  if (u == 0) {
    if (std::gcd(v, n_) != 1) return {0, -1};
    return {0, 1};
  }
  long g = std::gcd(u, n_);
  if (std::gcd(g, v) != 1) return {0, -1};
  // s with s*u == g (mod n); adjust s to a unit mod n
  long s = 0;
  {
    long r0 = u, r1 = n_, x0 = 1, x1 = 0;
    while (r1 != 0) {
      long q = r0 / r1;
      long r2 = r0 - q * r1;
      long x2 = x0 - q * x1;
      r0 = r1;
      r1 = r2;
      x0 = x1;
      x1 = x2;
    }
    if (r0 != g) throw std::logic_error("P1: gcd mismatch");
    s = mod_nonneg(x0, n_);
  }
  long step = n_ / g;
  while (std::gcd(s, n_) != 1) s = (s + step) % n_;
  long vv = static_cast<long>((static_cast<long long>(s) * v) % n_);
  // remaining freedom: units t with t == 1 (mod n/g); minimize v
  long vmin = vv;
  if (g > 1) {
    long t = 1;
    for (long k = 1; k < g; ++k) {
      t = (t + step) % n_;
      if (std::gcd(t, n_) != 1) continue;
      long cand = static_cast<long>((static_cast<long long>(t) * vv) % n_);
      if (cand < vmin) vmin = cand;
    }
  }
  return {g, vmin};
}

long P1::index(long u, long v) const {
  auto can = normalize(u, v);
  if (can.second == -1) return -1;
  long long key = static_cast<long long>(can.first) * n_ + can.second;
  auto it = table_.find(key);
  return it == table_.end() ? -1 : it->second;
}

Sl2 lift_to_sl2(long c, long d, long n) {
  if (n == 1) return {1, 0, 0, 1};
  c = mod_nonneg(c, n);
  d = mod_nonneg(d, n);
  if (c == 0 && d == 0) throw std::domain_error("lift_to_sl2: (0,0)");
  if (c == 0) {
    // (0 : d) with d a unit; scale to (0 : 1)
    if (std::gcd(d, n) != 1) throw std::domain_error("lift_to_sl2: invalid");
    return {1, 0, 0, 1};
  }
  if (d == 0) d = n;
  while (std::gcd(c, d) != 1) d += n;
  // solve a*d - b*c = 1
  long r0 = d, r1 = c, x0 = 1, x1 = 0;
  while (r1 != 0) {
    long q = r0 / r1;
    long r2 = r0 - q * r1;
    long x2 = x0 - q * x1;
    r0 = r1;
    r1 = r2;
    x0 = x1;
    x1 = x2;
  }
  // r0 = gcd = +-1 = x0*d + y*c
  long a = x0 * r0;  // make a*d ≡ 1 adjusted by sign of gcd
  long b = (a * d - 1) / c;
  Sl2 g{a, b, c, d};
  if (g.a * g.d - g.b * g.c != 1) throw std::logic_error("lift_to_sl2: det");
  return g;
}

namespace {
std::vector<Mat2> build_merel(long n) {
  std::vector<Mat2> out;
  for (long a = 1; a <= n; ++a) {
    long q = n / a;
    if (q * a == n) {
      long d = q;
      for (long b = 0; b < a; ++b) out.push_back({a, b, 0, d});
      for (long c = 1; c < d; ++c) out.push_back({a, 0, c, d});
    }
    for (long d = q + 1; d <= n; ++d) {
      long bc = a * d - n;
      for (long c = bc / a + 1; c < d; ++c) {
        if (bc % c == 0) out.push_back({a, bc / c, c, d});
      }
    }
  }
  return out;
}
}  // namespace

const std::vector<Mat2>& merel_family(long n) {
  static std::unordered_map<long, std::vector<Mat2>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_merel(n)).first;
  return it->second;
}

}  // namespace eisen
