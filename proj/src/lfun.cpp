#include "cmh/lfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "cmh/errors.hpp"

namespace cmh {

namespace {

unsigned long powmod(unsigned long b, unsigned long e, unsigned long m) {
  unsigned long r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

unsigned euler_phi(unsigned n) {
  unsigned r = n;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

// One cyclic factor of (Z/f)^x: a modulus q | f and a discrete log table.
struct Component {
  unsigned q;
  unsigned order;
  std::vector<int> dlog;
};

std::vector<Component> unit_group_components(unsigned f) {
  std::vector<Component> comps;
  unsigned n = f;
  for (unsigned p = 2; p <= n; ++p) {
    if (n % p) continue;
    unsigned q = 1;
    while (n % p == 0) {
      n /= p;
      q *= p;
    }
    if (p == 2) {
      if (q == 2) continue;
      Component sign{q, 2, std::vector<int>(q, -1)};
      for (unsigned a = 1; a < q; a += 2) sign.dlog[a] = (a % 4 == 1) ? 0 : 1;
      comps.push_back(std::move(sign));
      if (q >= 8) {
        Component five{q, q / 4, std::vector<int>(q, -1)};
        unsigned long v = 1;
        for (unsigned e = 0; e < q / 4; ++e) {
          five.dlog[v] = static_cast<int>(e);
          five.dlog[q - v] = static_cast<int>(e);
          v = v * 5 % q;
        }
        comps.push_back(std::move(five));
      }
      continue;
    }
    const unsigned ord = euler_phi(q);
    unsigned gen = 2;
    for (;; ++gen) {
      if (gen % p == 0) continue;
      bool primitive = true;
      for (unsigned r = 2; r <= ord && primitive; ++r) {
        if (ord % r) continue;
        bool prime = true;
        for (unsigned s = 2; s * s <= r; ++s)
          if (r % s == 0) prime = false;
        if (prime && powmod(gen, ord / r, q) == 1) primitive = false;
      }
      if (primitive) break;
    }
    Component c{q, ord, std::vector<int>(q, -1)};
    unsigned long v = 1;
    for (unsigned e = 0; e < ord; ++e) {
      c.dlog[v] = static_cast<int>(e);
      v = v * gen % q;
    }
    comps.push_back(std::move(c));
  }
  return comps;
}

unsigned compute_conductor(const DirichletCharacter& chi) {
  const unsigned f = chi.modulus;
  for (unsigned d = 1; d <= f; ++d) {
    if (f % d) continue;
    bool ok = true;
    for (unsigned a = 1; a < f && ok; a += d)
      if (std::gcd(a, f) == 1 && chi.exps[a] != 0) ok = false;
    if (ok) return d;
  }
  return f;
}

const std::vector<mpq_class>& bernoulli_table(size_t n) {
  static std::mutex mu;
  static std::vector<mpq_class> table{mpq_class(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= n) {
    const size_t m = table.size();
    mpq_class s = 0;
    mpz_class binom = 1;  // C(m+1, k)
    for (size_t k = 0; k < m; ++k) {
      s += mpq_class(binom) * table[k];
      binom = binom * static_cast<unsigned long>(m + 1 - k) / static_cast<unsigned long>(k + 1);
    }
    mpq_class b = -s / mpq_class(static_cast<unsigned long>(m + 1));
    b.canonicalize();
    table.push_back(b);
  }
  return table;
}

Ball rational_ball(long num, long den, Prec prec) { return Ball::from_mpq(mpq_class(num, den), prec); }

// sum_a chi(a) v[a] as a complex ball, grouping equal character values.
CBall character_sum(const DirichletCharacter& chi, const std::map<unsigned, Ball>& v, Prec prec) {
  std::map<int, Ball> by_exp;
  for (const auto& [a, val] : v) {
    int e = chi.exp_at(a);
    auto it = by_exp.find(e);
    if (it == by_exp.end())
      by_exp.emplace(e, val);
    else
      it->second += val;
  }
  CBall acc(prec);
  for (const auto& [e, val] : by_exp)
    acc += CBall::root_of_unity(e, static_cast<long>(chi.value_order), prec) * val;
  return acc;
}

// Upper bound for |L(s, chi)| on |s| <= 1/2.
double l_bound_half_disk(unsigned f) {
  double s = 0;
  for (unsigned a = 1; a <= f; ++a)
    if (std::gcd(a, f) == 1) s += std::sqrt(static_cast<double>(f) / a) + 7.0;
  return std::sqrt(static_cast<double>(f)) * s * 1.01 + 1.0;
}

// zeta(+h, a/f) and zeta(-h, a/f) for all units a, shared by the characters mod f.
using HurwitzTables = std::pair<std::map<unsigned, Ball>, std::map<unsigned, Ball>>;

const HurwitzTables& hurwitz_pair(unsigned f, const Ball& h, Prec wp);

}  // namespace

// ---------------------------------------------------------------- CyclotomicNumber

CyclotomicNumber::CyclotomicNumber(unsigned n, const std::vector<mpq_class>& dense)
    : n_(n), poly_(QPoly(dense).mod(cyclotomic_polynomial(n))) {}

mpq_class CyclotomicNumber::rational() const {
  if (!is_rational()) throw DomainError("cyclotomic number is not rational");
  return poly_.is_zero() ? mpq_class(0) : poly_.coeffs()[0];
}

CBall CyclotomicNumber::to_cball(Prec prec) const {
  CBall acc(prec);
  for (size_t k = 0; k < poly_.coeffs().size(); ++k) {
    const mpq_class& c = poly_.coeffs()[k];
    if (c == 0) continue;
    acc += CBall::root_of_unity(static_cast<long>(k), static_cast<long>(n_), prec) * Ball::from_mpq(c, prec);
  }
  return acc;
}

std::string CyclotomicNumber::to_string() const {
  if (is_rational()) return rational().get_str();
  std::ostringstream os;
  bool first = true;
  for (size_t k = 0; k < poly_.coeffs().size(); ++k) {
    mpq_class c = poly_.coeffs()[k];
    if (c == 0) continue;
    if (c < 0) {
      os << (first ? "-" : " - ");
      c = -c;
    } else if (!first) {
      os << " + ";
    }
    first = false;
    if (k == 0) {
      os << c.get_str();
      continue;
    }
    if (c != 1) os << c.get_str() << "*";
    os << "z" << n_;
    if (k > 1) os << "^" << k;
  }
  return os.str();
}

// ---------------------------------------------------------------- characters

bool DirichletCharacter::is_trivial() const {
  for (int e : exps)
    if (e > 0) return false;
  return true;
}

unsigned DirichletCharacter::order() const {
  unsigned g = value_order;
  for (int e : exps)
    if (e > 0) g = std::gcd(g, static_cast<unsigned>(e));
  return value_order / g;
}

std::string DirichletCharacter::label() const {
  return "chi_" + std::to_string(modulus) + "." + std::to_string(index);
}

std::vector<DirichletCharacter> enumerate_characters(unsigned f) {
  if (f == 0) throw DomainError("character modulus must be positive");
  static std::mutex mu;
  static std::map<unsigned, std::vector<DirichletCharacter>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(f); it != cache.end()) return it->second;
  }
  const auto comps = unit_group_components(f);
  unsigned n = 1;
  unsigned long total = 1;
  for (const auto& c : comps) {
    n = std::lcm(n, c.order);
    total *= c.order;
  }
  std::vector<DirichletCharacter> out;
  for (unsigned long idx = 0; idx < total; ++idx) {
    std::vector<unsigned> digits(comps.size());
    unsigned long rest = idx;
    for (size_t i = comps.size(); i-- > 0;) {
      digits[i] = static_cast<unsigned>(rest % comps[i].order);
      rest /= comps[i].order;
    }
    DirichletCharacter chi;
    chi.modulus = f;
    chi.value_order = n;
    chi.index = static_cast<unsigned>(idx);
    chi.exps.assign(f, -1);
    for (unsigned a = 0; a < f; ++a) {
      if (std::gcd(a, f) != 1) continue;
      unsigned long e = 0;
      for (size_t i = 0; i < comps.size(); ++i)
        e += static_cast<unsigned long>(digits[i]) * static_cast<unsigned long>(comps[i].dlog[a % comps[i].q]) *
             (n / comps[i].order);
      chi.exps[a] = static_cast<int>(e % n);
    }
    if (f == 1) chi.exps[0] = 0;
    chi.conductor = compute_conductor(chi);
    chi.odd = f > 2 && chi.exps[f - 1] != 0;
    out.push_back(std::move(chi));
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(f, out);
  return out;
}

DirichletCharacter primitive_character(const DirichletCharacter& chi) {
  const unsigned d = chi.conductor;
  const unsigned f = chi.modulus;
  if (d == f) return chi;
  // value of chi at residues mod d, as fractions e / N
  std::vector<mpq_class> target(d, -1);
  for (unsigned b = 0; b < d; ++b) {
    if (std::gcd(b, d) != 1 && d != 1) continue;
    unsigned a = b;
    while (std::gcd(a, f) != 1) a += d;
    target[b] = mpq_class(chi.exps[a], chi.value_order);
    target[b].canonicalize();
  }
  for (const auto& cand : enumerate_characters(d)) {
    bool match = true;
    for (unsigned b = 0; b < d && match; ++b) {
      if (cand.exps[b] < 0) continue;
      mpq_class v(cand.exps[b], cand.value_order);
      v.canonicalize();
      if (v != target[b]) match = false;
    }
    if (match) return cand;
  }
  throw DomainError("no primitive character matches " + chi.label());
}

std::vector<unsigned> subgroup_closure(unsigned f, const std::vector<unsigned>& generators) {
  std::set<unsigned> h{1 % f};
  for (unsigned g : generators) {
    if (std::gcd(g % f, f) != 1) throw DomainError("subgroup generator " + std::to_string(g) + " is not a unit");
  }
  std::vector<unsigned> frontier{1 % f};
  while (!frontier.empty()) {
    unsigned x = frontier.back();
    frontier.pop_back();
    for (unsigned g : generators) {
      unsigned y = static_cast<unsigned>(static_cast<unsigned long>(x) * (g % f) % f);
      if (h.insert(y).second) frontier.push_back(y);
    }
  }
  return {h.begin(), h.end()};
}

ExtensionDecomposition decompose_extension_character(unsigned f, const std::vector<unsigned>& generators) {
  if (f < 3) throw DomainError("conductor must be at least 3");
  ExtensionDecomposition dec;
  dec.f = f;
  dec.h_e = subgroup_closure(f, generators);
  if (std::find(dec.h_e.begin(), dec.h_e.end(), f - 1) != dec.h_e.end())
    throw DomainError("-1 lies in H_E: the fixed field is totally real, not CM");
  dec.d_E = 1;
  dec.d_F = 1;
  for (const auto& chi : enumerate_characters(f)) {
    bool trivial_on_h = std::all_of(dec.h_e.begin(), dec.h_e.end(), [&](unsigned h) { return chi.exps[h] == 0; });
    if (!trivial_on_h) continue;
    dec.d_E *= chi.conductor;
    if (chi.odd)
      dec.characters.push_back(primitive_character(chi));
    else
      dec.d_F *= chi.conductor;
  }
  dec.g = static_cast<int>(dec.characters.size());
  dec.d_rel = mpq_class(dec.d_E, dec.d_F * dec.d_F);
  dec.d_rel.canonicalize();
  return dec;
}

// ---------------------------------------------------------------- L-values

CyclotomicNumber l_at_zero(const DirichletCharacter& chi) {
  const unsigned f = chi.modulus;
  std::vector<mpq_class> dense(chi.value_order, 0);
  for (unsigned a = 1; a <= f; ++a) {
    if (std::gcd(a, f) != 1) continue;
    mpq_class term = mpq_class(1, 2) - mpq_class(a, f);
    term.canonicalize();
    dense[static_cast<size_t>(chi.exp_at(a))] += term;
  }
  return CyclotomicNumber(chi.value_order, dense);
}

LValue l_values(const DirichletCharacter& chi, Prec prec) {
  if (!chi.is_primitive()) throw DomainError(chi.label() + " is not primitive");
  const unsigned f = chi.modulus;
  const Prec wp = prec + 32;
  LValue out;
  out.chi = chi;
  out.l_at_0 = l_at_zero(chi);
  out.method = "LERCH";

  std::map<unsigned, Ball> lg;
  std::vector<mpq_class> count(chi.value_order, 0);
  for (unsigned a = 1; a <= f; ++a) {
    if (std::gcd(a, f) != 1) continue;
    lg.emplace(a, lngamma(Ball::from_mpq(mpq_class(a, f), wp)));
    count[static_cast<size_t>(chi.exp_at(a))] += 1;
  }
  // L'(0) = -log f L(0) + sum chi(a) (lnGamma(a/f) - log(2 pi)/2)
  CBall lp = character_sum(chi, lg, wp);
  if (f > 1) lp -= out.l_at_0.to_cball(wp) * log(Ball::from_si(f, wp));
  CyclotomicNumber s(chi.value_order, count);
  if (!s.is_zero()) lp -= s.to_cball(wp) * mul_2si(log(mul_2si(Ball::pi(wp), 1)), -1);
  out.l_prime_at_0 = lp;
  return out;
}

namespace {

const HurwitzTables& hurwitz_pair(unsigned f, const Ball& h, Prec wp) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, Prec>, HurwitzTables> cache;
  const auto key = std::make_pair(f, wp);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  HurwitzTables t;
  for (unsigned a = 1; a <= f; ++a) {
    if (std::gcd(a, f) != 1) continue;
    Ball x = Ball::from_mpq(mpq_class(a, f), wp);
    t.first.emplace(a, hurwitz_zeta(h, x, wp));
    t.second.emplace(a, hurwitz_zeta(-h, x, wp));
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace

Ball hurwitz_zeta(const Ball& s, const Ball& x, Prec prec) {
  if (!x.is_positive()) throw DomainError("hurwitz_zeta requires x > 0");
  const Ball one = Ball::from_si(1, prec);
  if ((s - one).contains_zero()) throw DomainError("hurwitz_zeta pole at s = 1");
  const long m = static_cast<long>(prec) / 6 + 10;
  const long n = m;
  Ball sum(prec);
  for (long k = 0; k < n; ++k) sum += exp(-(s * log(x + Ball::from_si(k, prec))));
  const Ball a = x + Ball::from_si(n, prec);
  const Ball la = log(a);
  sum += exp((one - s) * la) / (s - one);
  sum += mul_2si(exp(-(s * la)), -1);

  const auto& bern = bernoulli_table(static_cast<size_t>(2 * m));
  Ball rising = s;  // (s)_{2j-1}
  Ball power = exp(-((s + one) * la));  // a^{-s-2j+1}
  const Ball inv_a2 = exp(mul_2si(-la, 1));
  mpz_class fact = 2;  // (2j)!
  Ball rising_2m(prec);
  for (long j = 1; j <= m; ++j) {
    mpq_class c = bern[static_cast<size_t>(2 * j)] / mpq_class(fact);
    sum += Ball::from_mpq(c, prec) * rising * power;
    Ball next = rising * (s + Ball::from_si(2 * j - 1, prec));
    if (j == m) rising_2m = next;
    rising = next * (s + Ball::from_si(2 * j, prec));
    power *= inv_a2;
    fact *= (2 * j + 1) * (2 * j + 2);
  }
  // |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} * a^{-sigma-2M+1} / (sigma + 2M - 1)
  Ball sigma = Ball::from_real(s.lower(), prec);
  Ball denom = sigma + Ball::from_si(2 * m - 1, prec);
  if (!denom.is_positive()) throw DomainError("hurwitz_zeta: s too negative for the chosen expansion");
  Ball bound = mul_2si(abs(rising_2m), 2) / pow_ui(mul_2si(Ball::pi(prec), 1), static_cast<unsigned long>(2 * m)) *
               exp((-sigma - Ball::from_si(2 * m - 1, prec)) * la) / denom;
  sum.add_error(bound.abs_upper());
  return sum;
}

CBall l_prime_oracle(const DirichletCharacter& chi, Prec prec) {
  if (!chi.is_primitive()) throw DomainError(chi.label() + " is not primitive");
  if (chi.modulus > 1 && chi.is_trivial()) throw DomainError("trivial character of modulus > 1 is imprimitive");
  const unsigned f = chi.modulus;
  const double bound = l_bound_half_disk(f);
  const long hb = (static_cast<long>(prec) + static_cast<long>(std::ceil(std::log2(bound)))) / 2 + 12;
  const Prec wp = prec + static_cast<Prec>(hb) + 24;
  Ball h = Ball::from_si(1, wp);
  h = mul_2si(h, -hb);

  const auto& [zp, zm] = hurwitz_pair(f, h, wp);
  const Ball lf = log(Ball::from_si(f, wp));
  CBall lplus = character_sum(chi, zp, wp) * exp(-(h * lf));
  CBall lminus = character_sum(chi, zm, wp) * exp(h * lf);
  CBall d = (lplus - lminus) * (Ball::from_si(1, wp) / mul_2si(h, 1));
  // central-difference truncation: h^2 max|L| / (1/2 - h)^3 on |s| <= 1/2
  Ball half_minus_h = rational_ball(1, 2, wp) - h;
  Ball trunc = sqr(h) * Ball::from_mpq(mpq_class(bound), wp) / pow_ui(half_minus_h, 3);
  Real t = trunc.abs_upper();
  d.re().add_error(t);
  d.im().add_error(t);
  return d;
}

AveragedHeight averaged_faltings(const ExtensionDecomposition& dec, Prec prec, LPrimeMethod method) {
  const Prec wp = prec + 32;
  AveragedHeight out;
  out.label = "f=" + std::to_string(dec.f);
  out.d_F = dec.d_F;
  out.d_rel = dec.d_rel;
  out.method = method == LPrimeMethod::Lerch ? "LERCH" : "FINITE-DIFFERENCE";
  CBall sum(wp);
  for (const auto& chi : dec.characters) {
    if (!chi.odd) throw DomainError("even character in the decomposition: extension is not CM");
    CyclotomicNumber l0 = l_at_zero(chi);
    if (l0.is_zero()) throw DomainError("L(0, chi) vanishes for " + chi.label());
    CBall lp = method == LPrimeMethod::Lerch ? l_values(chi, prec).l_prime_at_0 : l_prime_oracle(chi, prec);
    sum += lp / l0.to_cball(wp);
  }
  if (!sum.im().contains_zero()) throw PrecisionError("L'/L sum has a nonzero imaginary part");
  out.log_derivative = sum.re();
  Ball log_disc = log(Ball::from_mpq(dec.d_rel * mpq_class(dec.d_F), wp));
  out.value = -mul_2si(out.log_derivative, -1) - mul_2si(log_disc, -2);
  return out;
}

Ball chowla_selberg_log_derivative(unsigned d, Prec prec) {
  const Prec wp = prec + 32;
  const Ball pi = Ball::pi(wp);
  if (d == 4) {
    // 4 lnGamma(1/4) - 2 log pi - 3 log 2
    return mul_2si(lngamma(rational_ball(1, 4, wp)), 2) - mul_2si(log(pi), 1) -
           Ball::from_si(3, wp) * log(Ball::from_si(2, wp));
  }
  if (d == 3) {
    // 6 lnGamma(1/3) - 3 log(2 pi) + log(3) / 2
    return Ball::from_si(6, wp) * lngamma(rational_ball(1, 3, wp)) -
           Ball::from_si(3, wp) * log(mul_2si(pi, 1)) + mul_2si(log(Ball::from_si(3, wp)), -1);
  }
  throw DomainError("closed form available only for d = 3, 4");
}

}  // namespace cmh
