#include "eisen/modsym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace eisen {

long genus(const SquareFreeLevel& n) {
  if (n.value == 1) return 0;
  PhiPsi pp = phi_psi(n);
  long mu = pp.psi.get_si();  // index of Gamma_0(N), N square-free
  long nu2 = 1, nu3 = 1;
  for (long p : n.primes) {
    nu2 *= (p == 2) ? 1 : (p % 4 == 1 ? 2 : 0);
    nu3 *= (p == 3) ? 1 : (p % 3 == 1 ? 2 : 0);
  }
  long cusps = 1L << n.primes.size();
  long twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
  if (twelve_g % 12 != 0) throw std::logic_error("genus: formula not integral");
  return twelve_g / 12;
}

namespace {
std::vector<long> divisors_of(const SquareFreeLevel& n) {
  std::vector<long> divs{1};
  for (long p : n.primes) {
    std::size_t sz = divs.size();
    for (std::size_t i = 0; i < sz; ++i) divs.push_back(divs[i] * p);
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

long floor_div(long a, long b) {
  long q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

long hasse_floor(long q) {
  long fl = static_cast<long>(std::floor(2.0 * std::sqrt(double(q))));
  while ((fl + 1) * (fl + 1) <= 4 * q) ++fl;
  while (fl * fl > 4 * q) --fl;
  return fl;
}

QMat vstack(const std::vector<QMat>& blocks) {
  long rows = 0, cols = 0;
  for (const QMat& b : blocks) {
    rows += b.rows();
    cols = std::max(cols, b.cols());
  }
  QMat out(rows, cols);
  long r0 = 0;
  for (const QMat& b : blocks) {
    for (long i = 0; i < b.rows(); ++i)
      for (long j = 0; j < b.cols(); ++j) out.at(r0 + i, j) = b.at(i, j);
    r0 += b.rows();
  }
  return out;
}

// y == a * v for rational column vectors; throws if the line is not stable.
Rat eigen_ratio(const QMat& y, const QMat& v) {
  long j = -1;
  for (long i = 0; i < v.rows(); ++i)
    if (v.at(i, 0) != 0) {
      j = i;
      break;
    }
  if (j < 0) throw std::logic_error("eigen_ratio: zero vector");
  Rat a = y.at(j, 0) / v.at(j, 0);
  for (long i = 0; i < v.rows(); ++i)
    if (y.at(i, 0) != a * v.at(i, 0))
      throw std::logic_error("eigen_ratio: line not stable");
  return a;
}

QMat single_column(const QMat& m, long j) {
  QMat out(m.rows(), 1);
  for (long i = 0; i < m.rows(); ++i) out.at(i, 0) = m.at(i, j);
  return out;
}
}  // namespace

long new_dimension(const SquareFreeLevel& n) {
  long total = genus(n);
  for (long d : divisors_of(n)) {
    if (d == n.value) continue;
    SquareFreeLevel m = factor_squarefree(d);
    long mult = 1L << (n.primes.size() - m.primes.size());
    total -= mult * new_dimension(m);
  }
  return total;
}

long sturm_prime_bound(const SquareFreeLevel& n) {
  PhiPsi pp = phi_psi(n);
  mpz_class b = (pp.psi + 5) / 6;  // ceil(psi/6)
  return b.get_si();
}

// ---------------------------------------------------------------------------
// Newform

struct Newform::Data {
  SpacePtr space;
  int label = 0;
  std::map<long, int> up_signs;
  QMat v;                    // ambient eigenvector, integral
  std::vector<Rat> phi_sym;  // dual eigenfunctional paired with each symbol
  long x0_sym = -1;
  Rat phi_x0;
  mutable std::mutex mu;
  mutable std::map<long, mpz_class> prime_cache;
};

long Newform::level() const { return d_->space->level().small_value(); }
int Newform::label() const { return d_->label; }
const std::map<long, int>& Newform::up_signs() const { return d_->up_signs; }

mpz_class Newform::a_prime(long p) const {
  if (!is_prime(p)) throw std::domain_error("a_prime: not a prime");
  {
    std::lock_guard<std::mutex> lock(d_->mu);
    auto it = d_->prime_cache.find(p);
    if (it != d_->prime_cache.end()) return it->second;
  }
  const ModularSymbolSpace& sp = *d_->space;
  const P1& p1 = sp.p1();
  auto [c0, d0] = p1.rep(d_->x0_sym);
  Rat acc = 0;
  for (const Mat2& h : merel_family(p)) {
    long idx = p1.index(c0 * h.a + d0 * h.c, c0 * h.b + d0 * h.d);
    if (idx >= 0) acc += d_->phi_sym[idx];
  }
  Rat val = acc / d_->phi_x0;
  if (val.get_den() != 1)
    throw std::logic_error("a_prime: non-integral eigenvalue");
  mpz_class a = val.get_num();
  if (!sp.level().contains(p)) {
    if (a * a > 4 * p) throw std::logic_error("a_prime: Hasse bound violated");
  } else if (a != 1 && a != -1) {
    throw std::logic_error("a_prime: U_p eigenvalue not a unit");
  }
  std::lock_guard<std::mutex> lock(d_->mu);
  d_->prime_cache.emplace(p, a);
  return a;
}

mpz_class Newform::prime_power_(long p, long k) const {
  mpz_class ap = a_prime(p);
  if (d_->space->level().contains(p)) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), ap.get_mpz_t(), static_cast<unsigned long>(k));
    return out;
  }
  // a(p^k) = a(p) a(p^{k-1}) - p a(p^{k-2})
  mpz_class prev = 1, cur = ap;
  for (long i = 2; i <= k; ++i) {
    mpz_class next = ap * cur - p * prev;
    prev = cur;
    cur = next;
  }
  return k == 0 ? mpz_class(1) : cur;
}

mpz_class Newform::a(long n) const {
  if (n < 1) throw std::domain_error("Newform::a: n must be positive");
  mpz_class out = 1;
  long m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    long k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    out *= prime_power_(p, k);
  }
  if (m > 1) out *= prime_power_(m, 1);
  return out;
}

// ---------------------------------------------------------------------------
// ModularSymbolSpace

ModularSymbolSpace::ModularSymbolSpace(const SquareFreeLevel& n)
    : level_(n), p1_(n.small_value()) {
  long nsym = p1_.size();
  long nn = p1_.level();
  if (nn == 1) {
    sym_to_basis_.assign(nsym, SparseVec{});
    cuspidal_basis_ = QMat(0, 0);
    cusp_divisors_ = {1};
    return;
  }

  // two-term relations x + x.sigma = 0: pair symbols, sigma-fixed ones die
  constexpr long kZero = -2, kUnset = -1;
  std::vector<long> gen_of(nsym, kUnset);
  std::vector<int> sign_of(nsym, 0);
  std::vector<long> gen_sym;
  for (long i = 0; i < nsym; ++i) {
    if (gen_of[i] != kUnset) continue;
    auto [c, d] = p1_.rep(i);
    long j = p1_.index(d, -c);
    if (j < 0) throw std::logic_error("modsym: sigma image invalid");
    if (j == i) {
      gen_of[i] = kZero;
      continue;
    }
    long id = static_cast<long>(gen_sym.size());
    gen_sym.push_back(i);
    gen_of[i] = id;
    sign_of[i] = 1;
    gen_of[j] = id;
    sign_of[j] = -1;
  }
  long ngen = static_cast<long>(gen_sym.size());

  // three-term relations over tau-orbits
  std::vector<char> seen(nsym, 0);
  std::vector<SparseVec> rows;
  auto tau_index = [&](long i) {
    auto [c, d] = p1_.rep(i);
    return p1_.index(d, -c - d);
  };
  for (long i = 0; i < nsym; ++i) {
    if (seen[i]) continue;
    long i1 = tau_index(i);
    long i2 = tau_index(i1);
    if (tau_index(i2) != i) throw std::logic_error("modsym: tau not order 3");
    SparseVec row;
    if (i1 == i) {
      seen[i] = 1;
      if (gen_of[i] != kZero) row.add_term(gen_of[i], 3);
    } else {
      seen[i] = seen[i1] = seen[i2] = 1;
      for (long x : {i, i1, i2})
        if (gen_of[x] != kZero) row.add_term(gen_of[x], sign_of[x]);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  SparseRref red = sparse_rref(std::move(rows), ngen);

  std::vector<long> basis_id(ngen, -1);
  for (long g = 0; g < ngen; ++g)
    if (red.pivot_of_col[g] == -1) {
      basis_id[g] = static_cast<long>(basis_syms_.size());
      basis_syms_.push_back(gen_sym[g]);
    }
  ambient_dim_ = static_cast<long>(basis_syms_.size());

  std::vector<SparseVec> gen_to_basis(ngen);
  for (long g = 0; g < ngen; ++g) {
    if (basis_id[g] != -1) {
      gen_to_basis[g].e.emplace_back(basis_id[g], 1);
      continue;
    }
    const SparseVec& row = red.rows[red.pivot_of_col[g]];
    for (const auto& [c, coef] : row.e) {
      if (c == g) continue;
      if (basis_id[c] == -1)
        throw std::logic_error("modsym: unreduced relation row");
      gen_to_basis[g].add_term(basis_id[c], -coef);
    }
  }
  sym_to_basis_.resize(nsym);
  for (long i = 0; i < nsym; ++i) {
    if (gen_of[i] == kZero) continue;
    sym_to_basis_[i] = sign_of[i] == 1 ? gen_to_basis[gen_of[i]]
                                       : gen_to_basis[gen_of[i]].scaled(-1);
  }

  long g2 = genus(level_);
  long ncusp = 1L << level_.primes.size();
  if (ambient_dim_ != 2 * g2 + ncusp - 1)
    throw std::logic_error("modsym: presentation dimension mismatch");

  for (long s : basis_syms_) {
    auto [c, d] = p1_.rep(s);
    basis_lifts_.push_back(lift_to_sl2(c, d, nn));
  }

  // boundary map; cusp classes of a square-free level are its divisors
  cusp_divisors_ = divisors_of(level_);
  std::unordered_map<long, long> divpos;
  for (std::size_t i = 0; i < cusp_divisors_.size(); ++i)
    divpos[cusp_divisors_[i]] = static_cast<long>(i);
  QMat bd(static_cast<long>(cusp_divisors_.size()), ambient_dim_);
  for (long k = 0; k < ambient_dim_; ++k) {
    const Sl2& g = basis_lifts_[k];
    bd.at(divpos[std::gcd(std::abs(g.c), nn)], k) += 1;  // cusp a/c
    bd.at(divpos[std::gcd(std::abs(g.d), nn)], k) -= 1;  // cusp b/d
  }
  cuspidal_basis_ = kernel_basis(bd);
  if (cuspidal_basis_.cols() != 2 * g2)
    throw std::logic_error("modsym: cuspidal dimension mismatch");
}

SpacePtr ModularSymbolSpace::build(const SquareFreeLevel& n) {
  return space_for_level(n.small_value());
}

SpacePtr space_for_level(long n) {
  static std::map<long, SpacePtr> registry;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = registry.find(n);
  if (it != registry.end()) return it->second;
  SquareFreeLevel lvl = factor_squarefree(n);
  SpacePtr sp(new ModularSymbolSpace(lvl));
  registry.emplace(n, sp);
  return sp;
}

SparseVec ModularSymbolSpace::symbol_vec(long u, long v) const {
  long idx = p1_.index(u, v);
  return idx < 0 ? SparseVec{} : sym_to_basis_[idx];
}

SparseVec ModularSymbolSpace::path_from_infinity(long num, long den) const {
  SparseVec out;
  if (den == 0) return out;
  long g = std::gcd(std::abs(num), std::abs(den));
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long qm2 = 1, qm1 = 0;  // q_{-2}, q_{-1}
  long x = num, y = den;
  long sign = -1;  // (-1)^{j-1} at j = 0
  while (true) {
    long a = floor_div(x, y);
    long r = x - a * y;
    long qj = a * qm1 + qm2;
    out += symbol_vec(qj, sign * qm1);
    qm2 = qm1;
    qm1 = qj;
    sign = -sign;
    x = y;
    y = r;
    if (y == 0) break;
  }
  return out;
}

QMat ModularSymbolSpace::hecke_ambient(long n) const {
  QMat out(ambient_dim_, ambient_dim_);
  const std::vector<Mat2>& fam = merel_family(n);
  for (long k = 0; k < ambient_dim_; ++k) {
    auto [c, d] = p1_.rep(basis_syms_[k]);
    SparseVec col;
    for (const Mat2& h : fam) {
      long idx = p1_.index(c * h.a + d * h.c, c * h.b + d * h.d);
      if (idx >= 0) col += sym_to_basis_[idx];
    }
    out.set_col(k, col);
  }
  return out;
}

QMat ModularSymbolSpace::star_ambient() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (star_cache_) return *star_cache_;
  QMat out(ambient_dim_, ambient_dim_);
  for (long k = 0; k < ambient_dim_; ++k) {
    auto [c, d] = p1_.rep(basis_syms_[k]);
    out.set_col(k, symbol_vec(-c, d));
  }
  star_cache_ = out;
  return out;
}

QMat ModularSymbolSpace::atkin_lehner_ambient(long q) const {
  long nn = level_.small_value();
  if (!level_.contains(q))
    throw std::domain_error("atkin_lehner: prime does not divide level");
  long m = nn / q;
  // W = [q*u, -v; N, q] with u*q + v*m = 1, det = q
  long u = inv_mod(q, m);           // u*q == 1 (mod m)
  long v = (1 - u * q) / m;         // exact
  QMat out(ambient_dim_, ambient_dim_);
  for (long k = 0; k < ambient_dim_; ++k) {
    const Sl2& g = basis_lifts_[k];
    // alpha = g.0 = b/d, beta = g.oo = a/c
    long an = q * u * g.b - v * g.d, ad = nn * g.b + q * g.d;
    long bn = q * u * g.a - v * g.c, bd_ = nn * g.a + q * g.c;
    SparseVec col = path_from_infinity(bn, bd_);
    SparseVec neg = path_from_infinity(an, ad);
    neg.negate();
    col += neg;
    out.set_col(k, col);
  }
  return out;
}

QMat ModularSymbolSpace::degeneracy_ambient(long p, long mult) const {
  long nn = level_.small_value();
  SpacePtr target = space_for_level(nn / p);
  QMat out(target->ambient_dim(), ambient_dim_);
  for (long k = 0; k < ambient_dim_; ++k) {
    if (mult == 1) {
      auto [c, d] = p1_.rep(basis_syms_[k]);
      out.set_col(k, target->symbol_vec(c, d));
    } else {
      const Sl2& g = basis_lifts_[k];
      SparseVec col = target->path_from_infinity(mult * g.a, g.c);
      SparseVec neg = target->path_from_infinity(mult * g.b, g.d);
      neg.negate();
      col += neg;
      out.set_col(k, col);
    }
  }
  return out;
}

QMat ModularSymbolSpace::hecke_matrix(long n) const {
  if (n < 1) throw std::domain_error("hecke_matrix: n must be positive");
  if (cuspidal_dim() == 0) return QMat(0, 0);
  QMat a = hecke_ambient(n);
  return restrict_operator(cuspidal_basis_, a * cuspidal_basis_);
}

QMat ModularSymbolSpace::atkin_lehner_matrix(long p) const {
  if (cuspidal_dim() == 0) return QMat(0, 0);
  QMat a = atkin_lehner_ambient(p);
  return restrict_operator(cuspidal_basis_, a * cuspidal_basis_);
}

const QMat& ModularSymbolSpace::new_subspace() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (new_basis_) return *new_basis_;
  if (level_.primes.size() <= 1 || cuspidal_dim() == 0) {
    // prime or trivial level: everything is new
    new_basis_ = cuspidal_basis_;
    return *new_basis_;
  }
  std::vector<QMat> blocks;
  for (long p : level_.primes) {
    for (long mult : {1L, p}) {
      QMat dmap = degeneracy_ambient(p, mult);
      blocks.push_back(dmap * cuspidal_basis_);
    }
  }
  QMat stacked = vstack(blocks);
  QMat k = kernel_basis(stacked);
  QMat basis = cuspidal_basis_ * k;
  basis.make_columns_integral();
  if (basis.cols() != 2 * new_dimension(level_))
    throw std::logic_error("modsym: new subspace dimension mismatch");
  new_basis_ = std::move(basis);
  return *new_basis_;
}

const QMat& ModularSymbolSpace::star_fixed_new_subspace() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (star_new_basis_) return *star_new_basis_;
  const QMat& bn = new_subspace();
  if (bn.cols() == 0) {
    star_new_basis_ = QMat(ambient_dim_, 0);
    return *star_new_basis_;
  }
  QMat s = star_ambient();
  QMat t = restrict_operator(bn, s * bn);
  t.add_scaled_identity(-1);
  QMat k = kernel_basis(t);
  QMat basis = bn * k;
  basis.make_columns_integral();
  star_new_basis_ = std::move(basis);
  return *star_new_basis_;
}

Newform ModularSymbolSpace::make_newform(const QMat& v) const {
  auto data = std::make_shared<Newform::Data>();
  data->space = shared_from_this();
  data->v = v;

  // U_p signs straight from the ambient action on the eigenvector
  for (long p : level_.primes) {
    QMat up = hecke_ambient(p);
    Rat eps = eigen_ratio(up * v, v);
    if (eps != 1 && eps != -1)
      throw std::logic_error("newform: U_p eigenvalue not a unit");
    data->up_signs[p] = eps == 1 ? 1 : -1;
  }

  // dual eigenfunctional: intersect transposed eigenspaces until the
  // common space is a line
  std::optional<QMat> dual;
  auto intersect = [&](const QMat& op, const Rat& eig) {
    QMat at = op.transposed();
    if (!dual) {
      at.add_scaled_identity(-eig);
      dual = kernel_basis(at);
    } else {
      QMat m = at * (*dual) - dual->scaled_by(eig);
      QMat k = kernel_basis(m);
      QMat next = (*dual) * k;
      next.make_columns_integral();
      dual = std::move(next);
    }
  };
  intersect(star_ambient(), 1);
  for (long p : level_.primes)
    if (dual->cols() > 1) intersect(hecke_ambient(p), data->up_signs[p]);
  for (long q = 2; dual->cols() > 1; q = next_prime(q)) {
    if (level_.contains(q)) continue;
    if (q > 4 * sturm_prime_bound(level_) + 100)
      throw std::logic_error("newform: dual eigenfunctional not isolated");
    QMat aq = hecke_ambient(q);
    Rat a = eigen_ratio(aq * v, v);
    intersect(aq, a);
  }
  if (dual->cols() != 1)
    throw std::logic_error("newform: dual space dimension " +
                           std::to_string(dual->cols()));

  data->phi_sym.assign(p1_.size(), Rat(0));
  for (long i = 0; i < p1_.size(); ++i) {
    Rat acc = 0;
    for (const auto& [j, c] : sym_to_basis_[i].e) acc += c * dual->at(j, 0);
    data->phi_sym[i] = acc;
  }
  for (long k = 0; k < ambient_dim_; ++k) {
    if (dual->at(k, 0) != 0) {
      data->x0_sym = basis_syms_[k];
      data->phi_x0 = dual->at(k, 0);
      break;
    }
  }
  if (data->x0_sym < 0) throw std::logic_error("newform: zero functional");

  Newform f;
  f.d_ = std::move(data);
  return f;
}

const NewformScan& ModularSymbolSpace::rational_newforms() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (newforms_) return *newforms_;

  NewformScan scan;
  const QMat& w = star_fixed_new_subspace();
  std::vector<QMat> pieces;
  std::vector<QMat> lines;
  if (w.cols() == 1)
    lines.push_back(w);
  else if (w.cols() > 1)
    pieces.push_back(w);

  long sturm = sturm_prime_bound(level_);
  long beyond = 0;
  for (long q = 2; !pieces.empty(); q = next_prime(q)) {
    if (level_.contains(q)) continue;
    if (q > sturm && ++beyond > 5) break;
    QMat aq = hecke_ambient(q);
    std::vector<QMat> next;
    for (const QMat& b : pieces) {
      QMat t = restrict_operator(b, aq * b);
      std::vector<long> found;
      long dim_found = 0;
      for (long a = -hasse_floor(q); a <= hasse_floor(q); ++a) {
        QMat shifted = t;
        shifted.add_scaled_identity(-a);
        QMat k = kernel_basis(shifted);
        if (k.cols() == 0) continue;
        found.push_back(a);
        dim_found += k.cols();
        QMat sub = b * k;
        sub.make_columns_integral();
        if (sub.cols() == 1)
          lines.push_back(std::move(sub));
        else
          next.push_back(std::move(sub));
      }
      if (found.empty()) {
        next.push_back(b);
        continue;
      }
      if (dim_found < t.rows()) {
        QMat prod = QMat::identity(t.rows());
        for (long a : found) {
          QMat shifted = t;
          shifted.add_scaled_identity(-a);
          prod = prod * shifted;
        }
        QMat rest = column_space_basis(prod);
        QMat sub = b * rest;
        sub.make_columns_integral();
        if (sub.cols() != t.rows() - dim_found)
          throw std::logic_error("modsym: split remainder dimension");
        next.push_back(std::move(sub));
      }
    }
    pieces = std::move(next);
  }
  for (const QMat& b : pieces) scan.nonrational_dim += b.cols();

  for (const QMat& line : lines) scan.forms.push_back(make_newform(line));

  // deterministic labels: sort by the eigenvalue sequence a_2, a_3, a_5, ...
  std::sort(scan.forms.begin(), scan.forms.end(),
            [](const Newform& f, const Newform& g) {
              for (long p = 2; p < 10000; p = next_prime(p)) {
                mpz_class af = f.a(p), ag = g.a(p);
                if (af != ag) return af < ag;
              }
              return false;
            });
  for (std::size_t i = 0; i < scan.forms.size(); ++i)
    scan.forms[i].d_->label = static_cast<int>(i);

  newforms_ = std::move(scan);
  return *newforms_;
}

}  // namespace eisen
