// Independent brute-force references used by the tests. Nothing here calls
// into the library's numeric code.
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace oracle {

using cld = std::complex<long double>;
using Mask = std::uint64_t;

inline long double arg0(cld z) {
  long double a = std::atan2(z.imag(), z.real());
  if (a < 0) a += 2 * 3.14159265358979323846264338327950288L;
  return a;
}

/// Roots sorted by argument in [0, 2pi), then modulus.
inline void sort_roots(std::vector<cld>& r) {
  std::sort(r.begin(), r.end(), [](cld a, cld b) {
    const long double da = arg0(a), db = arg0(b);
    if (std::fabs(da - db) > 1e-12L) return da < db;
    return std::abs(a) < std::abs(b);
  });
}

/// Durand-Kerner on a monic polynomial, coefficients constant term first.
inline std::vector<cld> roots(const std::vector<long>& coeffs) {
  const size_t n = coeffs.size() - 1;
  std::vector<cld> z(n);
  const cld seed(0.4L, 0.9L);
  for (size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<long double>(i));
  auto eval = [&](cld x) {
    cld v = 0;
    for (size_t k = coeffs.size(); k-- > 0;) v = v * x + static_cast<long double>(coeffs[k]);
    return v;
  };
  for (int it = 0; it < 2000; ++it) {
    long double change = 0;
    for (size_t i = 0; i < n; ++i) {
      cld den = 1;
      for (size_t j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const cld step = eval(z[i]) / den;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-18L) break;
  }
  sort_roots(z);
  return z;
}

/// Primitive f-th roots of unity exp(2 pi i k/f), k coprime to f ascending.
inline std::vector<cld> cyclotomic_roots(unsigned f) {
  std::vector<cld> z;
  for (unsigned k = 1; k < f; ++k)
    if (std::gcd(k, f) == 1) z.push_back(std::polar(1.0L, 2 * 3.14159265358979323846264338327950288L * k / f));
  return z;
}

/// prod_{i<j in psi} (r_i - r_j)^2.
inline cld subset_disc(const std::vector<cld>& r, Mask psi) {
  cld p = 1;
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = i + 1; j < r.size(); ++j)
      if (((psi >> i) & 1) && ((psi >> j) & 1)) p *= (r[i] - r[j]) * (r[i] - r[j]);
  return p;
}

/// |det V|^2 for the Vandermonde matrix of the roots in psi.
inline long double vandermonde_abs_sq(const std::vector<cld>& r, Mask psi) {
  std::vector<cld> x;
  for (size_t i = 0; i < r.size(); ++i)
    if ((psi >> i) & 1) x.push_back(r[i]);
  const size_t n = x.size();
  std::vector<std::vector<cld>> m(n, std::vector<cld>(n));
  for (size_t i = 0; i < n; ++i) {
    cld p = 1;
    for (size_t j = 0; j < n; ++j, p *= x[i]) m[i][j] = p;
  }
  cld det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    for (size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      const cld t = m[i][c] / m[c][c];
      for (size_t j = c; j < n; ++j) m[i][j] -= t * m[c][j];
    }
  }
  return std::norm(det);
}

/// Image of a mask of cyclotomic root indices under zeta -> zeta^a.
inline Mask cyclotomic_apply(unsigned f, unsigned a, Mask psi) {
  std::vector<unsigned> ks;
  for (unsigned k = 1; k < f; ++k)
    if (std::gcd(k, f) == 1) ks.push_back(k);
  Mask out = 0;
  for (size_t i = 0; i < ks.size(); ++i) {
    if (!((psi >> i) & 1)) continue;
    const unsigned img = (a * ks[i]) % f;
    const size_t pos = static_cast<size_t>(std::find(ks.begin(), ks.end(), img) - ks.begin());
    out |= Mask{1} << pos;
  }
  return out;
}

/// Norm over the Galois orbit of psi in Q(zeta_f), and the orbit size.
inline mpz_class cyclotomic_orbit_norm(unsigned f, Mask psi, int* orbit_size = nullptr) {
  const auto r = cyclotomic_roots(f);
  std::vector<Mask> seen;
  for (unsigned a = 1; a < f; ++a) {
    if (std::gcd(a, f) != 1) continue;
    const Mask img = cyclotomic_apply(f, a, psi);
    if (std::find(seen.begin(), seen.end(), img) == seen.end()) seen.push_back(img);
  }
  cld p = 1;
  for (Mask m : seen) p *= subset_disc(r, m);
  if (orbit_size) *orbit_size = static_cast<int>(seen.size());
  return mpz_class(static_cast<long>(std::llround(std::abs(p.real()))));
}

/// L(0, chi_D) = -(1/f) sum_{a<f} chi_D(a) a for the Kronecker character of
/// a negative fundamental discriminant D.
inline mpq_class kronecker_l0(long d) {
  const long f = -d;
  mpz_class dz(d);
  mpq_class s = 0;
  for (long a = 1; a < f; ++a) s += mpz_kronecker(dz.get_mpz_t(), mpz_class(a).get_mpz_t()) * a;
  s = -s / f;
  s.canonicalize();
  return s;
}

}  // namespace oracle
