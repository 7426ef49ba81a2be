#include "cmh/disc.hpp"

#include <algorithm>

#include "cmh/errors.hpp"
#include "cmh/lfun.hpp"

namespace cmh {

namespace {

std::vector<int> members(Mask m, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask_has(m, i)) out.push_back(i);
  return out;
}

const CBall& root(const CMStructure& cm, int i) { return cm.embeddings.roots[static_cast<size_t>(i)]; }

CBall conj_gap_sq(const CMStructure& cm, int i) { return sqr(root(cm, i) - root(cm, cm.partner[static_cast<size_t>(i)])); }

// log|r_i - r_j| for all i < j.
struct LogGapTable {
  explicit LogGapTable(const CMStructure& cm) : n(cm.degree()) {
    table.assign(static_cast<size_t>(n * n), Ball(cm.embeddings.roots[0].prec()));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) table[static_cast<size_t>(i * n + j)] = log_abs(root(cm, i) - root(cm, j));
  }
  const Ball& at(int i, int j) const {
    return i < j ? table[static_cast<size_t>(i * n + j)] : table[static_cast<size_t>(j * n + i)];
  }
  /// log|disc f_psi|
  Ball log_disc(Mask psi) const {
    auto m = members(psi, n);
    Ball s(table.empty() ? 128 : table[0].prec());
    for (size_t a = 0; a < m.size(); ++a)
      for (size_t b = a + 1; b < m.size(); ++b) s += at(m[a], m[b]);
    return mul_2si(s, 1);
  }
  int n;
  std::vector<Ball> table;
};

Ball log_of(const mpz_class& v, Prec prec) { return log(Ball::from_mpz(abs(v), prec)); }

// Norm of disc f_Psi over the Galois orbit.
mpz_class orbit_norm(const CMStructure& cm, const GaloisAction& action, Mask psi, int* orbit_size) {
  auto images = orbit(action, psi);
  if (orbit_size) *orbit_size = static_cast<int>(images.size());
  CBall prod = CBall::from_si(1, cm.embeddings.roots[0].prec());
  for (Mask m : images) prod *= element_disc(cm, m);
  return abs(recognize_integer(prod));
}

}  // namespace

CBall element_disc(const CMStructure& cm, Mask psi) {
  const auto m = members(psi, cm.degree());
  CBall prod = CBall::from_si(1, cm.embeddings.roots[0].prec());
  for (size_t a = 0; a < m.size(); ++a)
    for (size_t b = a + 1; b < m.size(); ++b) prod *= sqr(root(cm, m[a]) - root(cm, m[b]));
  return prod;
}

SubsetDisc subset_disc(const CMStructure& cm, Mask psi, const GaloisAction* action) {
  if ((psi & ~full_mask(cm.degree())) != 0) throw DomainError("subset contains an embedding index out of range");
  SubsetDisc out;
  out.psi = psi;
  out.element_disc = element_disc(cm, psi);
  if (action) {
    int size = 0;
    out.norm_to_Q = orbit_norm(cm, *action, psi, &size);
    out.reflex_degree = size;
  }
  return out;
}

FieldDiscs field_discs(const CMStructure& cm, const std::optional<mpz_class>& known_dE) {
  FieldDiscs d;
  d.d_poly = discriminant(cm.field.defining_poly);
  const mpz_class abs_poly = abs(d.d_poly);
  auto squarefree = [](const mpz_class& v) {
    for (const auto& [p, e] : factor_integer(v))
      if (e > 1) return false;
    return true;
  };
  auto fundamental = [&](const mpz_class& v) {
    mpz_class r = ((v % 4) + 4) % 4;
    if (r == 1) return squarefree(v);
    if (r != 0) return false;
    mpz_class m = v / 4;
    mpz_class mr = ((m % 4) + 4) % 4;
    return (mr == 2 || mr == 3) && squarefree(m);
  };

  if (cm.field.conductor) {
    auto dec = decompose_extension_character(*cm.field.conductor, {});
    d.d_E = dec.d_E;
    d.d_F = dec.d_F;
    d.d_E_verified = d.d_F_verified = true;
    d.d_E_source = d.d_F_source = "conductor-discriminant";
  } else {
    d.d_F = abs(discriminant(cm.totally_real_poly));
    d.d_F_verified = d.d_F == 1 || squarefree(d.d_F);
    d.d_F_source = d.d_F_verified ? "squarefree" : "UNVERIFIED-MAXIMALITY";
    d.d_E = abs_poly;
    if (squarefree(abs_poly)) {
      d.d_E_verified = true;
      d.d_E_source = "squarefree";
    } else if (cm.degree() == 2 && fundamental(d.d_poly)) {
      d.d_E_verified = true;
      d.d_E_source = "fundamental";
    } else {
      d.d_E_source = "UNVERIFIED-MAXIMALITY";
    }
  }
  if (known_dE) {
    if (*known_dE == 0) throw DomainError("supplied d_E must be nonzero");
    mpq_class ratio(abs_poly, abs(*known_dE));
    ratio.canonicalize();
    if (!is_perfect_square(ratio))
      throw DomainError("supplied d_E inconsistent: |d_poly| / d_E = " + ratio.get_str() + " is not a rational square");
    d.d_E = abs(*known_dE);
    d.d_E_verified = true;
    d.d_E_source = "supplied";
  }
  d.index_sq = mpq_class(abs_poly, d.d_E);
  d.index_sq.canonicalize();
  if (!is_perfect_square(d.index_sq))
    throw DomainError("|d_poly| / d_E = " + d.index_sq.get_str() + " is not a rational square");
  d.d_rel = mpq_class(d.d_E, d.d_F * d.d_F);
  d.d_rel.canonicalize();
  for (const auto& part : {d.index_sq.get_num(), d.index_sq.get_den()})
    for (const auto& [p, e] : factor_integer(part)) d.index_primes.push_back(p);
  std::sort(d.index_primes.begin(), d.index_primes.end());
  return d;
}

ReflexRelDisc reflex_rel_disc(const CMStructure& cm, const GaloisAction& action, Mask sigma, const FieldDiscs& discs) {
  ReflexRelDisc out;
  out.sigma = pair_closure(cm, sigma);
  const Prec prec = cm.embeddings.roots[0].prec();

  auto images = orbit(action, out.sigma);
  out.orbit_size = static_cast<int>(images.size());
  CBall value = CBall::from_si(1, prec);
  CBall ratio = CBall::from_si(1, prec);
  for (Mask img : images) {
    CBall delta = CBall::from_si(1, prec);
    for (const auto& [a, b] : cm.pairs)
      if (mask_has(img, a)) delta *= conj_gap_sq(cm, a);
    value *= delta;
    ratio *= delta / element_disc(cm, img);
  }
  out.value = abs(recognize_integer(value));
  out.d_sigma = orbit_norm(cm, action, out.sigma, nullptr);
  out.ratio = mpq_class(out.value, out.d_sigma);
  out.ratio.canonicalize();
  out.ratio_ball = abs(ratio);

  CBall full = CBall::from_si(1, prec);
  for (const auto& [a, b] : cm.pairs) full *= conj_gap_sq(cm, a);
  out.correction = mpq_class(abs(recognize_integer(full))) / discs.d_rel;
  out.correction.canonicalize();
  return out;
}

QuaternionRamification quaternion_ramification(const FieldDiscs& discs,
                                               const std::vector<std::pair<mpz_class, int>>& finite_primes,
                                               int sigma_complement_size) {
  if (sigma_complement_size < 0) throw DomainError("|Sigma^c| must be nonnegative");
  if ((finite_primes.size() + static_cast<size_t>(sigma_complement_size)) % 2 != 0)
    throw DomainError("ramification set of B has odd cardinality " +
                      std::to_string(finite_primes.size() + static_cast<size_t>(sigma_complement_size)));
  QuaternionRamification q;
  q.sigma_complement_size = sigma_complement_size;
  q.d_B = 1;
  const mpz_class rel_num = discs.d_rel.get_num();
  for (const auto& [p, f] : finite_primes) {
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) throw DomainError(p.get_str() + " is not prime");
    if (f < 1) throw DomainError("residue degree must be positive");
    if (rel_num % p != 0) throw DomainError("prime " + p.get_str() + " is unramified in E/F");
    mpz_class norm;
    mpz_pow_ui(norm.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(f));
    q.d_B *= norm;
    q.finite_primes.emplace_back(p, f);
  }
  return q;
}

IdentityReport grand_identity_check(const CMStructure& cm, Mask phi, double tolerance) {
  if (classify(cm, phi) == TypeClass::Invalid || phi == 0)
    throw DomainError("grand identity requires a nonempty partial CM-type");
  const Prec prec = cm.embeddings.roots[0].prec();
  IdentityReport r;
  r.field = cm.field.label;
  r.phi = phi;
  r.precision = cm.embeddings.precision_bits;

  const LogGapTable gaps(cm);
  const Mask phibar = conjugate_mask(cm, phi);
  const int k = cm.g - mask_size(phi);

  Ball log_a(prec);
  for (const auto& comp : complements(cm, phi)) {
    const Mask full = phi | comp.mask;
    log_a += gaps.log_disc(full) + gaps.log_disc(conjugate_mask(cm, full));
  }

  // The three terms use direct complex products.
  CBall pair_prod = CBall::from_si(1, prec);
  for (const auto& [a, b] : cm.pairs) pair_prod *= conj_gap_sq(cm, a);
  CBall phi_prod = CBall::from_si(1, prec);
  for (int i : members(phi, cm.degree())) phi_prod *= conj_gap_sq(cm, i);

  auto scaled = [&](const Ball& x, int e) { return mul_2si(x, e); };
  r.log_A = log_a;
  r.log_T1 = scaled(log_abs(element_disc(cm, full_mask(cm.degree())) / pair_prod), k - 1);
  r.log_T2 = scaled(log_abs(phi_prod / element_disc(cm, phi | phibar)), k - 1);
  r.log_T3 = scaled(log_abs(element_disc(cm, phi) * element_disc(cm, phibar)), k);
  r.residual = r.log_A - (r.log_T1 + r.log_T2 + r.log_T3);
  r.bound = r.residual.abs_upper().to_double();
  r.pass = r.residual.contains_zero() && r.bound < tolerance;
  return r;
}

VandermondeReport vandermonde_check(const CMStructure& cm, Mask psi) {
  const auto m = members(psi, cm.degree());
  const size_t n = m.size();
  const Prec prec = cm.embeddings.roots[0].prec();
  VandermondeReport rep;
  rep.psi = psi;
  // rows (1, x, x^2, ...) for each x in psi
  std::vector<std::vector<CBall>> a(n, std::vector<CBall>(n, CBall(prec)));
  for (size_t i = 0; i < n; ++i) {
    CBall p = CBall::from_si(1, prec);
    for (size_t j = 0; j < n; ++j) {
      a[i][j] = p;
      p *= root(cm, m[i]);
    }
  }
  CBall det = CBall::from_si(1, prec);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    double best = -1;
    for (size_t r = c; r < n; ++r) {
      double v = abs2(a[r][c]).mid_double();
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    if (a[c][c].contains_zero()) throw PrecisionError("Vandermonde elimination hit a pivot containing zero");
    det *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      CBall factor = a[r][c] / a[c][c];
      for (size_t j = c; j < n; ++j) a[r][j] -= factor * a[c][j];
    }
  }
  rep.det_sq = abs2(det);
  rep.disc_abs = abs(element_disc(cm, psi));
  rep.pass = rep.det_sq.overlaps(rep.disc_abs);
  return rep;
}

Ball multiplicativity_residual(const CMStructure& cm, Mask a, Mask b) {
  if ((a & b) != 0) throw DomainError("multiplicativity check needs disjoint subsets");
  CBall cross = CBall::from_si(1, cm.embeddings.roots[0].prec());
  for (int i : members(a, cm.degree()))
    for (int j : members(b, cm.degree())) cross *= sqr(root(cm, i) - root(cm, j));
  return log_abs(element_disc(cm, a | b)) - log_abs(element_disc(cm, a) * element_disc(cm, b) * cross);
}

LogRelationReport log_relation_check(const CMStructure& cm, const GaloisAction& action, const FieldDiscs& discs,
                                     Mask phi, double tolerance) {
  if (classify(cm, phi) == TypeClass::Invalid) throw DomainError("log relation requires a partial CM-type");
  const Prec prec = cm.embeddings.roots[0].prec();
  auto nlog = [&](Mask psi) {
    if (mask_size(psi) <= 1) return Ball(prec);
    int size = 0;
    mpz_class d = orbit_norm(cm, action, psi, &size);
    return log_of(d, prec) / Ball::from_si(size, prec);
  };
  LogRelationReport rep;
  rep.phi = phi;
  const Mask phibar = conjugate_mask(cm, phi);
  const int k = cm.g - mask_size(phi);
  Ball lhs(prec);
  for (const auto& comp : complements(cm, phi)) {
    const Mask full = phi | comp.mask;
    lhs += nlog(full) + nlog(conjugate_mask(cm, full));
  }
  rep.lhs = mul_2si(lhs, -k - 2);
  Ball efs(prec);
  if (phi != 0) {
    auto rr = reflex_rel_disc(cm, action, phi, discs);
    efs = log_of(rr.value, prec) / Ball::from_si(rr.orbit_size, prec);
  }
  // log d_F at element level: (log|d_poly| - log N((pi - conj pi)^2)) / 2
  CBall full = CBall::from_si(1, prec);
  for (const auto& [a, b] : cm.pairs) full *= conj_gap_sq(cm, a);
  Ball log_df = mul_2si(log_of(discs.d_poly, prec) - log_of(abs(recognize_integer(full)), prec), -1);
  rep.rhs = mul_2si(log_df, -2) + mul_2si(efs - nlog(phi | phibar), -3) + mul_2si(nlog(phi) + nlog(phibar), -2);
  rep.residual = rep.lhs - rep.rhs;
  rep.pass = rep.residual.contains_zero() && rep.residual.abs_upper().to_double() < tolerance;
  return rep;
}

}  // namespace cmh
