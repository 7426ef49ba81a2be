#include "cmh/numfield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "cmh/errors.hpp"

namespace cmh {

namespace {

constexpr const char* kPolyPrefix = "poly:";
constexpr const char* kCyclotomicPrefix = "cyclotomic:";

CBall exact_point(const Real& re, const Real& im, Prec prec) {
  return {Ball::from_real(re, prec), Ball::from_real(im, prec)};
}

CBall mid_only(const CBall& z) {
  CBall out = z;
  out.re().set_radius_zero();
  out.im().set_radius_zero();
  return out;
}

using CLD = std::complex<long double>;

std::vector<CLD> aberth_initial(const ZPoly& poly) {
  const int n = poly.degree();
  std::vector<long double> a(static_cast<size_t>(n + 1));
  for (int i = 0; i <= n; ++i) a[static_cast<size_t>(i)] = poly.coeff(i).get_d();
  long double bound = 0;
  for (int i = 0; i < n; ++i) {
    long double q = std::fabs(a[static_cast<size_t>(i)] / a[static_cast<size_t>(n)]);
    if (q > 0) bound = std::max(bound, std::pow(q, 1.0L / static_cast<long double>(n - i)));
  }
  if (bound == 0) bound = 1;
  std::vector<CLD> z(static_cast<size_t>(n));
  const long double two_pi = 6.283185307179586476925286766559L;
  for (int k = 0; k < n; ++k)
    z[static_cast<size_t>(k)] = std::polar(bound, two_pi * k / n + 0.4L);

  auto eval = [&](CLD x, CLD& dp) {
    CLD v = a[static_cast<size_t>(n)];
    dp = 0;
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * x + v;
      v = v * x + a[static_cast<size_t>(i)];
    }
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    long double worst = 0;
    for (int i = 0; i < n; ++i) {
      CLD dp;
      CLD v = eval(z[static_cast<size_t>(i)], dp);
      if (dp == CLD(0)) continue;
      CLD ratio = v / dp;
      CLD s = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += CLD(1) / (z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)]);
      CLD w = ratio / (CLD(1) - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[static_cast<size_t>(i)] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0L, std::abs(z[static_cast<size_t>(i)])));
    }
    if (worst < 1e-17L) break;
  }
  return z;
}

// High-precision Aberth refinement on exact midpoints.
std::vector<CBall> aberth_refine(const ZPoly& poly, std::vector<CBall> z, Prec wp) {
  const int n = poly.degree();
  const ZPoly dpoly = poly.derivative();
  for (int iter = 0; iter < 400; ++iter) {
    bool small = true;
    for (int i = 0; i < n; ++i) {
      CBall& zi = z[static_cast<size_t>(i)];
      CBall v = mid_only(poly.eval(zi));
      CBall dv = mid_only(dpoly.eval(zi));
      if (dv.contains_zero()) continue;
      CBall ratio = mid_only(v / dv);
      CBall s(wp);
      bool ok = true;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        CBall d = zi - z[static_cast<size_t>(j)];
        if (d.contains_zero()) {
          ok = false;
          break;
        }
        s += mid_only(CBall::from_si(1, wp) / mid_only(d));
      }
      if (!ok) continue;
      CBall denom = mid_only(CBall::from_si(1, wp) - ratio * s);
      if (denom.contains_zero()) continue;
      CBall w = mid_only(ratio / denom);
      zi = mid_only(zi - w);
      Real step = abs(w).abs_upper();
      if (step.is_zero()) continue;
      Real scale = abs(zi).abs_upper();
      long e = mpfr_get_exp(step.get());
      long se = scale.is_zero() ? 0 : std::max<long>(0, mpfr_get_exp(scale.get()));
      if (e - se > -static_cast<long>(wp) + 8) small = false;
    }
    if (small) break;
  }
  return z;
}

struct Certified {
  std::vector<Real> radius;
  bool ok = false;
};

// Weierstrass inclusion: disks |x - z_i| <= n |W_i| cover the roots and
// each isolated disk contains exactly one.
Certified certify(const ZPoly& poly, const std::vector<CBall>& z, Prec wp) {
  const int n = poly.degree();
  Certified out;
  out.radius.reserve(static_cast<size_t>(n));
  const Ball lc = Ball::from_mpz(poly.leading(), wp);
  for (int i = 0; i < n; ++i) {
    CBall prod{lc, Ball(wp)};
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)];
    if (prod.contains_zero()) return out;
    CBall w = poly.eval(z[static_cast<size_t>(i)]) / prod;
    Real r = abs(w).abs_upper();
    Real scaled(kRadiusPrec);
    mpfr_mul_si(scaled.get(), r.get(), n, MPFR_RNDU);
    out.radius.push_back(std::move(scaled));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Real gap = abs(z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)]).abs_lower();
      Real sum(kRadiusPrec);
      mpfr_add(sum.get(), out.radius[static_cast<size_t>(i)].get(), out.radius[static_cast<size_t>(j)].get(),
               MPFR_RNDU);
      if (mpfr_cmp(gap.get(), sum.get()) <= 0) return out;
    }
  }
  out.ok = true;
  return out;
}

Ball with_radius(const Ball& mid, const Real& r) {
  Ball b = mid;
  b.set_radius_zero();
  b.add_error(r);
  return b;
}

void sort_by_argument(std::vector<CBall>& roots, std::vector<bool>& real) {
  const size_t n = roots.size();
  struct Key {
    long double arg;
    long double mod;
    size_t idx;
  };
  std::vector<Key> keys(n);
  const long double two_pi = 6.283185307179586476925286766559L;
  for (size_t i = 0; i < n; ++i) {
    long double re = mpfr_get_ld(roots[i].re().mid().get(), MPFR_RNDN);
    long double im = mpfr_get_ld(roots[i].im().mid().get(), MPFR_RNDN);
    long double a = (im == 0 && re > 0) ? 0.0L : std::atan2(im, re);
    if (a < 0) a += two_pi;
    keys[i] = {a, std::hypot(re, im), i};
  }
  std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) { return x.arg < y.arg; });
  // Arguments that agree to working accuracy form one ray; order it by modulus.
  constexpr long double kTie = 1e-14L;
  size_t start = 0;
  while (start < n) {
    size_t end = start + 1;
    while (end < n && keys[end].arg - keys[start].arg < kTie) ++end;
    std::sort(keys.begin() + static_cast<long>(start), keys.begin() + static_cast<long>(end),
              [](const Key& x, const Key& y) { return x.mod < y.mod; });
    start = end;
  }
  std::vector<CBall> sorted;
  std::vector<bool> sorted_real;
  for (const auto& k : keys) {
    sorted.push_back(roots[k.idx]);
    sorted_real.push_back(real[k.idx]);
  }
  roots = std::move(sorted);
  real = std::move(sorted_real);
}

std::vector<CBall> cyclotomic_roots(unsigned f, Prec prec) {
  std::vector<CBall> roots;
  for (unsigned k = 1; k < f; ++k)
    if (std::gcd(k, f) == 1) roots.push_back(CBall::root_of_unity(static_cast<long>(k), static_cast<long>(f), prec));
  return roots;
}

bool factor_search(const ZPoly& poly, int d, const std::vector<CBall>& roots) {
  const int n = poly.degree();
  std::vector<int> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  long budget = 2000000;
  auto near_integer = [&](const CBall& c) {
    if (!c.im().contains_zero() && std::fabs(c.im().mid_double()) > 1e-12) return false;
    double m = c.re().mid_double();
    return std::fabs(m - std::nearbyint(m)) < 1e-12 && c.re().rad_double() < 1e-3;
  };
  while (true) {
    if (--budget < 0) throw DomainError("irreducibility undecided within the factor-search budget");
    CBall trace(roots[0].prec());
    for (int i : idx) trace += roots[static_cast<size_t>(i)];
    if (near_integer(trace)) {
      std::vector<CBall> sub;
      for (int i : idx) sub.push_back(roots[static_cast<size_t>(i)]);
      auto coeffs = poly_from_roots(sub);
      bool all = std::all_of(coeffs.begin(), coeffs.end(), near_integer);
      if (all) {
        std::vector<mpz_class> c;
        for (auto& b : coeffs) {
          mpz_class v;
          mpfr_get_z(v.get_mpz_t(), b.re().mid().get(), MPFR_RNDN);
          c.push_back(v);
        }
        if (poly.exact_div(ZPoly(c))) return true;
      }
    }
    int k = d - 1;
    while (k >= 0 && idx[static_cast<size_t>(k)] == n - d + k) --k;
    if (k < 0) break;
    ++idx[static_cast<size_t>(k)];
    for (int j = k + 1; j < d; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  return false;
}

}  // namespace

bool is_irreducible(const ZPoly& poly) {
  const int n = poly.degree();
  if (n < 1) return false;
  if (n == 1) return true;
  if (poly.content() != 1) return false;
  if (discriminant(poly) == 0) return false;
  std::vector<bool> possible(static_cast<size_t>(n + 1), true);
  possible[0] = possible[static_cast<size_t>(n)] = false;
  int used = 0;
  for (unsigned long p : small_primes(80)) {
    auto pattern = factor_degrees_mod(poly, p);
    if (!pattern) continue;
    std::vector<bool> sums(static_cast<size_t>(n + 1), false);
    sums[0] = true;
    for (int deg : *pattern)
      for (int s = n; s >= deg; --s)
        if (sums[static_cast<size_t>(s - deg)]) sums[static_cast<size_t>(s)] = true;
    bool any = false;
    for (int s = 1; s < n; ++s) {
      possible[static_cast<size_t>(s)] = possible[static_cast<size_t>(s)] && sums[static_cast<size_t>(s)];
      any = any || possible[static_cast<size_t>(s)];
    }
    if (!any) return true;
    if (++used >= 40) break;
  }
  auto roots = isolate_roots(poly, 256);
  for (int d = 1; 2 * d <= n; ++d) {
    if (!possible[static_cast<size_t>(d)]) continue;
    if (factor_search(poly, d, roots)) return false;
  }
  return true;
}

NumberField make_field(const ZPoly& poly, std::string label) {
  if (poly.degree() < 1) throw DomainError("defining polynomial must have positive degree");
  if (!poly.is_monic()) throw DomainError("defining polynomial must be monic");
  if (!is_irreducible(poly)) throw ReducibleError("polynomial " + poly.to_string() + " is reducible over Q");
  return NumberField{poly, poly.degree(), std::move(label), std::nullopt};
}

NumberField cyclotomic_field(unsigned f) {
  if (f < 3) throw DomainError("cyclotomic conductor must be at least 3");
  ZPoly p = cyclotomic_polynomial(f);
  return NumberField{p, p.degree(), "cyclotomic:" + std::to_string(f), f};
}

NumberField parse_field(std::string_view spec) {
  auto starts_with = [&](std::string_view prefix) { return spec.substr(0, prefix.size()) == prefix; };
  if (starts_with(kPolyPrefix)) {
    ZPoly p = parse_zpoly(spec.substr(std::string_view(kPolyPrefix).size()));
    return make_field(p, "poly:" + p.to_string());
  }
  if (starts_with(kCyclotomicPrefix)) {
    std::string_view rest = spec.substr(std::string_view(kCyclotomicPrefix).size());
    if (rest.empty() || rest.size() > 6 ||
        !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError("cyclotomic conductor must be a decimal integer");
    return cyclotomic_field(static_cast<unsigned>(std::stoul(std::string(rest))));
  }
  throw ParseError("field spec must start with 'poly:' or 'cyclotomic:'");
}

std::vector<CBall> isolate_roots(const ZPoly& poly, Prec precision_bits, std::vector<bool>* is_real) {
  if (precision_bits < 64) throw DomainError("precision must be at least 64 bits");
  const int n = poly.degree();
  if (n < 1) throw DomainError("cannot isolate roots of a constant");
  const Prec wp = precision_bits + 32;

  std::vector<CBall> z;
  for (const auto& c : aberth_initial(poly)) {
    Real re(wp), im(wp);
    mpfr_set_ld(re.get(), c.real(), MPFR_RNDN);
    mpfr_set_ld(im.get(), c.imag(), MPFR_RNDN);
    z.push_back(exact_point(re, im, wp));
  }
  z = aberth_refine(poly, std::move(z), wp);

  Certified cert = certify(poly, z, wp);
  if (!cert.ok) throw PrecisionError("root enclosures not disjoint at " + std::to_string(precision_bits) + " bits");

  // Snap near-real roots onto the axis; a symmetric isolated disk holds a real root.
  std::vector<bool> real(static_cast<size_t>(n), false);
  bool snapped = false;
  for (int i = 0; i < n; ++i) {
    CBall& zi = z[static_cast<size_t>(i)];
    Real im_abs = zi.im().abs_upper();
    if (mpfr_cmp(im_abs.get(), cert.radius[static_cast<size_t>(i)].get()) <= 0) {
      zi.im() = Ball(wp);
      real[static_cast<size_t>(i)] = true;
      snapped = true;
    }
  }
  if (snapped) {
    cert = certify(poly, z, wp);
    if (!cert.ok) throw PrecisionError("real root enclosures not disjoint at " + std::to_string(precision_bits) + " bits");
  }

  std::vector<CBall> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const CBall& zi = z[static_cast<size_t>(i)];
    const Real& r = cert.radius[static_cast<size_t>(i)];
    Ball im = real[static_cast<size_t>(i)] ? Ball(wp) : with_radius(zi.im(), r);
    out.emplace_back(with_radius(zi.re(), r), im);
  }
  sort_by_argument(out, real);
  if (is_real) *is_real = std::move(real);
  return out;
}

EmbeddingSet isolate_embeddings(const NumberField& field, Prec precision_bits) {
  if (precision_bits < 64) throw DomainError("precision must be at least 64 bits");
  EmbeddingSet emb;
  emb.field = field;
  emb.precision_bits = precision_bits;
  if (field.conductor) {
    emb.roots = cyclotomic_roots(*field.conductor, precision_bits + 32);
    emb.is_real.assign(emb.roots.size(), false);
  } else {
    emb.roots = isolate_roots(field.defining_poly, precision_bits, &emb.is_real);
  }
  return emb;
}

mpz_class recognize_integer(const Ball& value) {
  mpz_class n;
  mpfr_get_z(n.get_mpz_t(), value.mid().get(), MPFR_RNDN);
  const bool unique = value.contains(n) && !value.contains(n + 1) && !value.contains(n - 1);
  if (unique) return n;
  const bool wide = mpfr_cmp_d(value.rad().get(), 0.125) >= 0;
  if (wide || value.contains(n))
    throw PrecisionError("integer recognition ambiguous: " + value.to_string(12));
  throw NonIntegralError("enclosure contains no integer: " + value.to_string(12));
}

mpz_class recognize_integer(const CBall& value) {
  Real im_extent = value.im().abs_upper();
  if (!value.im().contains_zero()) {
    if (mpfr_cmp_d(value.im().rad().get(), 0.125) >= 0)
      throw PrecisionError("imaginary part too wide for integer recognition");
    throw NonIntegralError("enclosure has nonzero imaginary part: " + value.im().to_string(12));
  }
  if (mpfr_cmp_d(im_extent.get(), 0.5) >= 0) throw PrecisionError("imaginary part too wide for integer recognition");
  return recognize_integer(value.re());
}

std::vector<CBall> poly_from_roots(const std::vector<CBall>& roots) {
  const Prec prec = roots.empty() ? 128 : roots[0].prec();
  std::vector<CBall> c{CBall::from_si(1, prec)};
  for (const auto& r : roots) {
    std::vector<CBall> next(c.size() + 1, CBall(prec));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * r;
    }
    c = std::move(next);
  }
  return c;
}

ZPoly recognize_zpoly(const std::vector<CBall>& coeffs) {
  std::vector<mpz_class> c;
  c.reserve(coeffs.size());
  for (const auto& b : coeffs) c.push_back(recognize_integer(b));
  return ZPoly(std::move(c));
}

std::vector<int> conjugation_pairing(const EmbeddingSet& emb) {
  const size_t n = emb.size();
  std::vector<int> partner(n, -1);
  for (size_t i = 0; i < n; ++i) {
    if (emb.is_real[i]) {
      partner[i] = static_cast<int>(i);
      continue;
    }
    CBall c = conj(emb.roots[i]);
    int found = -1;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || !c.overlaps(emb.roots[j])) continue;
      if (found >= 0) throw PrecisionError("conjugate enclosures not unique");
      found = static_cast<int>(j);
    }
    if (found < 0) throw PrecisionError("no enclosure matches a complex conjugate");
    partner[i] = found;
  }
  for (size_t i = 0; i < n; ++i)
    if (partner[static_cast<size_t>(partner[i])] != static_cast<int>(i))
      throw PrecisionError("conjugation pairing is not an involution");
  return partner;
}

}  // namespace cmh
