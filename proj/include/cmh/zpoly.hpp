// Dense univariate polynomials with integer and rational coefficients.
#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmh/ball.hpp"

namespace cmh {

/// Integer polynomial, coefficients stored from the constant term upward.
/// The zero polynomial has no coefficients; otherwise the top one is nonzero.
class ZPoly {
 public:
  ZPoly() = default;
  explicit ZPoly(std::vector<mpz_class> coeffs);

  static ZPoly x_power(unsigned n);
  static ZPoly constant(const mpz_class& c);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }
  const mpz_class& leading() const { return coeffs_.back(); }
  const std::vector<mpz_class>& coeffs() const { return coeffs_; }
  mpz_class coeff(int i) const;

  ZPoly derivative() const;
  mpz_class content() const;

  friend ZPoly operator+(const ZPoly& a, const ZPoly& b);
  friend ZPoly operator-(const ZPoly& a, const ZPoly& b);
  friend ZPoly operator*(const ZPoly& a, const ZPoly& b);
  friend bool operator==(const ZPoly& a, const ZPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Exact quotient over Z; nullopt when b does not divide a in Z[x].
  std::optional<ZPoly> exact_div(const ZPoly& b) const;

  mpz_class eval(const mpz_class& x) const;
  CBall eval(const CBall& z) const;

  /// Human-readable form in the field-spec syntax, e.g. "x^4+5*x^2+3".
  std::string to_string() const;

 private:
  void normalize();
  std::vector<mpz_class> coeffs_;
};

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> m);
mpz_class resultant(const ZPoly& a, const ZPoly& b);
/// disc(p) = (-1)^{n(n-1)/2} Res(p, p') / lc(p).
mpz_class discriminant(const ZPoly& p);

/// The f-th cyclotomic polynomial.
ZPoly cyclotomic_polynomial(unsigned f);

/// Parses an integer polynomial in x: terms like 3, -x, 5x^2, 7*x^3.
ZPoly parse_zpoly(std::string_view text);

/// Multiset of irreducible factor degrees of p modulo `prime`, or nullopt
/// when p is not squarefree of full degree modulo that prime.
std::optional<std::vector<int>> factor_degrees_mod(const ZPoly& p, unsigned long prime);

std::vector<unsigned long> small_primes(unsigned long count);
/// Trial-division factorization of |n| for n within 64 bits.
std::vector<std::pair<mpz_class, int>> factor_integer(const mpz_class& n);
bool is_perfect_square(const mpq_class& q);

/// Rational polynomial, used for exact automorphism verification.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<mpq_class> coeffs);
  explicit QPoly(const ZPoly& p);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  /// Remainder modulo a monic integer polynomial.
  QPoly mod(const ZPoly& m) const;
  CBall eval(const CBall& z) const;

 private:
  void normalize();
  std::vector<mpq_class> coeffs_;
};

/// p(h(x)) mod m(x), exactly.
QPoly compose_mod(const ZPoly& p, const QPoly& h, const ZPoly& m);

}  // namespace cmh
