#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eisen {

/// The projective line P^1(Z/NZ) with canonical representatives and
/// constant-time index lookup. N = 1 has the single element (0:0).
class P1 {
 public:
  explicit P1(long n);

  long level() const { return n_; }
  long size() const { return static_cast<long>(reps_.size()); }
  const std::pair<long, long>& rep(long i) const { return reps_[i]; }

  /// Canonical representative of (u:v); second component is -1 when
  /// gcd(u, v, N) > 1 (not a point of P^1).
  std::pair<long, long> normalize(long u, long v) const;

  /// Index of (u:v), or -1 when not a point of P^1.
  long index(long u, long v) const;

 private:
  long n_;
  std::vector<std::pair<long, long>> reps_;
  std::unordered_map<long long, long> table_;
};

struct Sl2 {
  long a, b, c, d;  // det = 1
};

/// A matrix in SL_2(Z) whose bottom row is congruent to (c, d) mod N.
/// (c, d) must satisfy gcd(c, d, N) = 1.
Sl2 lift_to_sl2(long c, long d, long n);

struct Mat2 {
  long a, b, c, d;
};

/// Merel's family of integral matrices of determinant n: the Hecke
/// operator T_n acts on weight-2 Manin symbols by x |-> sum x*h over the
/// family. Cached; thread-safe.
const std::vector<Mat2>& merel_family(long n);

}  // namespace eisen
