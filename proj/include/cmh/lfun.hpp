// Dirichlet characters, L-values at s = 0, and the averaged Faltings height
// of abelian CM fields.
#pragma once

#include <string>
#include <vector>

#include "cmh/ball.hpp"
#include "cmh/zpoly.hpp"

namespace cmh {

/// Element of Q(zeta_N) as a polynomial in zeta_N reduced modulo Phi_N.
class CyclotomicNumber {
 public:
  CyclotomicNumber() : n_(1) {}
  /// sum_k dense[k] zeta_N^k
  CyclotomicNumber(unsigned n, const std::vector<mpq_class>& dense);

  unsigned order() const { return n_; }
  const QPoly& poly() const { return poly_; }
  bool is_zero() const { return poly_.is_zero(); }
  bool is_rational() const { return poly_.degree() <= 0; }
  /// Requires is_rational().
  mpq_class rational() const;
  CBall to_cball(Prec prec) const;
  std::string to_string() const;

  friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    return a.n_ == b.n_ && a.poly_.coeffs() == b.poly_.coeffs();
  }

 private:
  unsigned n_;
  QPoly poly_;
};

/// Dirichlet character with values zeta_N^e stored as exponents e mod N.
struct DirichletCharacter {
  unsigned modulus = 1;
  /// Values lie in the N-th roots of unity, N = exponent of (Z/modulus)^x.
  unsigned value_order = 1;
  /// exps[a] for 0 <= a < modulus; -1 where gcd(a, modulus) > 1.
  std::vector<int> exps;
  unsigned conductor = 1;
  bool odd = false;
  /// Position in enumerate_characters(modulus).
  unsigned index = 0;

  bool is_primitive() const { return conductor == modulus; }
  bool is_trivial() const;
  /// Exact order of the character.
  unsigned order() const;
  /// Exponent of chi(a) for gcd(a, modulus) = 1.
  int exp_at(unsigned long a) const { return exps[a % modulus]; }
  std::string label() const;
};

/// All phi(f) characters mod f, enumerated by a mixed-radix counter over the
/// generators of (Z/f)^x (first generator most significant).
std::vector<DirichletCharacter> enumerate_characters(unsigned f);

/// The primitive character inducing chi.
DirichletCharacter primitive_character(const DirichletCharacter& chi);

/// Subgroup of (Z/f)^x generated by `generators` (sorted).
std::vector<unsigned> subgroup_closure(unsigned f, const std::vector<unsigned>& generators);

/// E = fixed field of H_E inside Q(zeta_f), F its maximal totally real subfield.
struct ExtensionDecomposition {
  unsigned f = 0;
  std::vector<unsigned> h_e;
  int g = 0;
  /// Primitive odd characters trivial on H_E; their L-functions multiply to zeta_E / zeta_F.
  std::vector<DirichletCharacter> characters;
  /// Conductor-discriminant formula.
  mpz_class d_E;
  mpz_class d_F;
  mpq_class d_rel;
};

/// Throws DomainError if -1 lies in H_E (E would be totally real) or a
/// generator is not a unit mod f.
ExtensionDecomposition decompose_extension_character(unsigned f, const std::vector<unsigned>& generators);

struct LValue {
  DirichletCharacter chi;
  CyclotomicNumber l_at_0;
  CBall l_prime_at_0;
  std::string method;
};

/// L(0, chi) exactly and L'(0, chi) by the log-Gamma (Lerch) formula.
LValue l_values(const DirichletCharacter& chi, Prec prec);

/// L(0, chi) alone, exactly.
CyclotomicNumber l_at_zero(const DirichletCharacter& chi);

/// L'(0, chi) by a certified central difference of the Hurwitz-zeta sum.
CBall l_prime_oracle(const DirichletCharacter& chi, Prec prec);

/// Hurwitz zeta(s, x) for real s and x > 0 by Euler-Maclaurin summation.
Ball hurwitz_zeta(const Ball& s, const Ball& x, Prec prec);

enum class LPrimeMethod { Lerch, FiniteDifference };

struct AveragedHeight {
  std::string label;
  /// 2^{-g} sum_Phi h(Phi)
  Ball value;
  /// L'/L(0, chi_{E/F}) as the sum over the decomposition.
  Ball log_derivative;
  mpz_class d_F;
  mpq_class d_rel;
  std::string method;
};

AveragedHeight averaged_faltings(const ExtensionDecomposition& dec, Prec prec,
                                 LPrimeMethod method = LPrimeMethod::Lerch);

/// Closed forms of L'/L(0, chi_{-d}) for d = 3, 4 via the reflection formula.
Ball chowla_selberg_log_derivative(unsigned d, Prec prec);

}  // namespace cmh
