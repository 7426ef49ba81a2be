// Discriminant invariants attached to subsets of embeddings, and certified
// checks of the identities relating them.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmh/cmtypes.hpp"

namespace cmh {

/// prod over unordered pairs {i, j} in psi of (r_i - r_j)^2, i.e. disc f_psi.
CBall element_disc(const CMStructure& cm, Mask psi);

struct SubsetDisc {
  Mask psi = 0;
  CBall element_disc;
  /// d_psi: product of element_disc over the Galois orbit of psi.
  std::optional<mpz_class> norm_to_Q;
  /// Orbit size of psi, 0 when no Galois action was supplied.
  int reflex_degree = 0;
};

/// `action` may be null (non-Galois E): only element_disc is filled.
SubsetDisc subset_disc(const CMStructure& cm, Mask psi, const GaloisAction* action);

struct FieldDiscs {
  mpz_class d_poly;
  mpz_class d_F;
  mpz_class d_E;
  /// d_E / d_F^2
  mpq_class d_rel;
  /// |d_poly| / d_E
  mpq_class index_sq;
  bool d_E_verified = false;
  bool d_F_verified = false;
  /// Where d_E came from: "conductor-discriminant", "squarefree", "supplied" or "UNVERIFIED-MAXIMALITY".
  std::string d_E_source;
  std::string d_F_source;
  /// Primes dividing index_sq; element-level and ideal-level values may differ there.
  std::vector<mpz_class> index_primes;
};

/// Throws DomainError if known_dE is inconsistent with the defining polynomial.
FieldDiscs field_discs(const CMStructure& cm, const std::optional<mpz_class>& known_dE = std::nullopt);

struct ReflexRelDisc {
  /// Union of the pairs in Sigma, as an embedding mask.
  Mask sigma = 0;
  /// d_{E/F,Sigma}
  mpz_class value;
  /// d_Sigma = d_{phi + conj phi}
  mpz_class d_sigma;
  /// Orbit size of Sigma, i.e. [E_Sigma : Q].
  int orbit_size = 0;
  /// d_{E/F,Sigma} / d_Sigma exactly, and as the certified orbit product of
  /// prod_{tau in phi}(tau pi - conj tau pi)^2 / disc f_{phi + conj phi}.
  mpq_class ratio;
  Ball ratio_ball;
  /// N_{F/Q}((pi - conj pi)^2) / d_rel; 1 when (pi - conj pi)^2 generates the relative discriminant.
  mpq_class correction;
};

/// `sigma` may be any mask; only the pairs it meets matter.
ReflexRelDisc reflex_rel_disc(const CMStructure& cm, const GaloisAction& action, Mask sigma, const FieldDiscs& discs);

struct QuaternionRamification {
  /// Rational primes with their residue degrees.
  std::vector<std::pair<mpz_class, int>> finite_primes;
  mpz_class d_B;
  int sigma_complement_size = 0;
};

/// Throws DomainError on a parity violation or a prime unramified in E/F.
QuaternionRamification quaternion_ramification(const FieldDiscs& discs,
                                               const std::vector<std::pair<mpz_class, int>>& finite_primes,
                                               int sigma_complement_size);

struct IdentityReport {
  std::string field;
  Mask phi = 0;
  Prec precision = 0;
  Ball log_A, log_T1, log_T2, log_T3;
  /// log A - log(T1 T2 T3)
  Ball residual;
  /// Upper bound for |residual|.
  double bound = 0;
  bool pass = false;
};

/// Per-embedding check of prod_{Phi > phi}|disc f_Phi disc f_conjPhi| = T1 T2 T3.
IdentityReport grand_identity_check(const CMStructure& cm, Mask phi, double tolerance = 1e-30);

struct VandermondeReport {
  Mask psi = 0;
  /// |det V|^2 by elimination on the Vandermonde matrix.
  Ball det_sq;
  /// |disc f_psi| as a product of squared differences.
  Ball disc_abs;
  bool pass = false;
};

VandermondeReport vandermonde_check(const CMStructure& cm, Mask psi);

/// log|disc f_{a+b}| - log|disc f_a disc f_b prod (r_i - r_j)^2|, a and b disjoint.
Ball multiplicativity_residual(const CMStructure& cm, Mask a, Mask b);

struct LogRelationReport {
  Mask phi = 0;
  Ball lhs, rhs, residual;
  bool pass = false;
};

/// Norm-level form of the grand identity for Galois E:
/// 2^{-k} sum_{Phi > phi} (L(Phi) + L(conj Phi))/4
///   = log d_F / 4 + (L_EFS - L(Sigma))/8 + (L(phi) + L(conj phi))/4,
/// where L(psi) = log d_psi / [E_psi : Q] and L_EFS = log d_{E/F,Sigma} / [E_Sigma : Q].
LogRelationReport log_relation_check(const CMStructure& cm, const GaloisAction& action, const FieldDiscs& discs,
                                     Mask phi, double tolerance = 1e-30);

}  // namespace cmh
