#include "cmh/cmtypes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cmh/errors.hpp"

namespace cmh {

namespace {

bool squarefree(const ZPoly& p) { return p.degree() >= 1 && (p.degree() == 1 || discriminant(p) != 0); }

ZPoly symmetric_poly(const std::vector<CBall>& values) {
  return recognize_zpoly(poly_from_roots(values));
}

// ---------------------------------------------------------------- LLL

// Lattice reduction of integer row vectors with MPFR Gram-Schmidt data.
class Lll {
 public:
  Lll(std::vector<std::vector<mpz_class>> basis, Prec prec) : b_(std::move(basis)), prec_(prec) {}

  std::vector<std::vector<mpz_class>> reduce() {
    const size_t m = b_.size();
    if (m < 2) return b_;
    init_gram_schmidt();
    size_t k = 1;
    long guard = 0;
    while (k < m) {
      if (++guard > 2000000) throw PrecisionError("lattice reduction did not terminate");
      for (size_t j = k; j-- > 0;) size_reduce(k, j);
      // Lovasz condition with delta = 0.99
      Real t(prec_);
      mpfr_sqr(t.get(), mu_[k][k - 1].get(), MPFR_RNDN);
      mpfr_d_sub(t.get(), 0.99, t.get(), MPFR_RNDN);
      mpfr_mul(t.get(), t.get(), bn_[k - 1].get(), MPFR_RNDN);
      if (mpfr_cmp(bn_[k].get(), t.get()) >= 0) {
        ++k;
      } else {
        swap_rows(k);
        k = std::max<size_t>(1, k - 1);
      }
    }
    return b_;
  }

 private:
  Real dot_int(size_t i, size_t j) const {
    mpz_class s = 0;
    for (size_t c = 0; c < b_[i].size(); ++c) s += b_[i][c] * b_[j][c];
    Real r(prec_);
    mpfr_set_z(r.get(), s.get_mpz_t(), MPFR_RNDN);
    return r;
  }

  void init_gram_schmidt() {
    const size_t m = b_.size();
    mu_.assign(m, std::vector<Real>(m, Real(prec_)));
    bn_.assign(m, Real(prec_));
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < i; ++j) {
        Real r = dot_int(i, j);
        for (size_t l = 0; l < j; ++l) {
          Real t(prec_);
          mpfr_mul(t.get(), mu_[j][l].get(), mu_[i][l].get(), MPFR_RNDN);
          mpfr_mul(t.get(), t.get(), bn_[l].get(), MPFR_RNDN);
          mpfr_sub(r.get(), r.get(), t.get(), MPFR_RNDN);
        }
        mpfr_div(mu_[i][j].get(), r.get(), bn_[j].get(), MPFR_RNDN);
      }
      Real r = dot_int(i, i);
      for (size_t l = 0; l < i; ++l) {
        Real t(prec_);
        mpfr_sqr(t.get(), mu_[i][l].get(), MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), bn_[l].get(), MPFR_RNDN);
        mpfr_sub(r.get(), r.get(), t.get(), MPFR_RNDN);
      }
      if (mpfr_sgn(r.get()) <= 0) throw PrecisionError("degenerate lattice basis");
      bn_[i] = r;
    }
  }

  void size_reduce(size_t k, size_t j) {
    Real half(prec_);
    mpfr_abs(half.get(), mu_[k][j].get(), MPFR_RNDN);
    if (mpfr_cmp_d(half.get(), 0.5) <= 0) return;
    Real q(prec_);
    mpfr_round(q.get(), mu_[k][j].get());
    mpz_class qz;
    mpfr_get_z(qz.get_mpz_t(), q.get(), MPFR_RNDN);
    for (size_t c = 0; c < b_[k].size(); ++c) b_[k][c] -= qz * b_[j][c];
    for (size_t l = 0; l < j; ++l) {
      Real t(prec_);
      mpfr_mul(t.get(), q.get(), mu_[j][l].get(), MPFR_RNDN);
      mpfr_sub(mu_[k][l].get(), mu_[k][l].get(), t.get(), MPFR_RNDN);
    }
    mpfr_sub(mu_[k][j].get(), mu_[k][j].get(), q.get(), MPFR_RNDN);
  }

  void swap_rows(size_t k) {
    const size_t m = b_.size();
    Real mu(prec_), bnew(prec_), t(prec_);
    mpfr_set(mu.get(), mu_[k][k - 1].get(), MPFR_RNDN);
    mpfr_sqr(t.get(), mu.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), bn_[k - 1].get(), MPFR_RNDN);
    mpfr_add(bnew.get(), bn_[k].get(), t.get(), MPFR_RNDN);
    mpfr_mul(mu_[k][k - 1].get(), mu.get(), bn_[k - 1].get(), MPFR_RNDN);
    mpfr_div(mu_[k][k - 1].get(), mu_[k][k - 1].get(), bnew.get(), MPFR_RNDN);
    mpfr_mul(t.get(), bn_[k - 1].get(), bn_[k].get(), MPFR_RNDN);
    mpfr_div(bn_[k].get(), t.get(), bnew.get(), MPFR_RNDN);
    bn_[k - 1] = bnew;
    std::swap(b_[k], b_[k - 1]);
    for (size_t j = 0; j + 1 < k; ++j) std::swap(mu_[k][j], mu_[k - 1][j]);
    for (size_t i = k + 1; i < m; ++i) {
      Real old(prec_);
      mpfr_set(old.get(), mu_[i][k].get(), MPFR_RNDN);
      mpfr_mul(t.get(), mu.get(), old.get(), MPFR_RNDN);
      mpfr_sub(mu_[i][k].get(), mu_[i][k - 1].get(), t.get(), MPFR_RNDN);
      mpfr_mul(t.get(), mu_[k][k - 1].get(), mu_[i][k].get(), MPFR_RNDN);
      mpfr_add(mu_[i][k - 1].get(), old.get(), t.get(), MPFR_RNDN);
    }
  }

  std::vector<std::vector<mpz_class>> b_;
  Prec prec_;
  std::vector<std::vector<Real>> mu_;
  std::vector<Real> bn_;
};

mpz_class scaled_round(const Ball& x, long shift) {
  Real t(x.prec() + 64);
  mpfr_mul_2si(t.get(), x.mid().get(), shift, MPFR_RNDN);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), t.get(), MPFR_RNDN);
  return z;
}

// Candidate h in Q[x] with h(r0) = target, from an integer relation among
// 1, r0, ..., r0^{n-1}, target.
std::vector<QPoly> relation_candidates(const std::vector<CBall>& powers, const CBall& target, Prec prec) {
  const size_t n = powers.size();
  const long shift = static_cast<long>(prec) - 24;
  std::vector<std::vector<mpz_class>> basis;
  for (size_t k = 0; k <= n; ++k) {
    std::vector<mpz_class> row(n + 3, 0);
    row[k] = 1;
    const CBall& v = k < n ? powers[k] : target;
    row[n + 1] = scaled_round(v.re(), shift);
    row[n + 2] = scaled_round(v.im(), shift);
    basis.push_back(std::move(row));
  }
  auto reduced = Lll(std::move(basis), 2 * prec + 64).reduce();
  std::vector<QPoly> out;
  for (const auto& row : reduced) {
    if (row[n] == 0) continue;
    std::vector<mpq_class> c(n);
    for (size_t k = 0; k < n; ++k) {
      c[k] = mpq_class(-row[k], row[n]);
      c[k].canonicalize();
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<int> permutation_of(const QPoly& h, const std::vector<CBall>& roots) {
  std::vector<int> perm(roots.size(), -1);
  for (size_t i = 0; i < roots.size(); ++i) {
    CBall img = h.eval(roots[i]);
    for (size_t j = 0; j < roots.size(); ++j) {
      if (!img.overlaps(roots[j])) continue;
      if (perm[i] >= 0) throw PrecisionError("automorphism image matches several embeddings");
      perm[i] = static_cast<int>(j);
    }
    if (perm[i] < 0) throw PrecisionError("automorphism image matches no embedding");
  }
  return perm;
}

bool uniform_patterns(const ZPoly& p) {
  int seen = 0;
  for (unsigned long q : small_primes(120)) {
    auto pat = factor_degrees_mod(p, q);
    if (!pat) continue;
    if (std::adjacent_find(pat->begin(), pat->end(), std::not_equal_to<>()) != pat->end()) return false;
    if (++seen >= 60) break;
  }
  return true;
}

}  // namespace

int CMStructure::pair_of(int i) const {
  for (size_t k = 0; k < pairs.size(); ++k)
    if (pairs[k].first == i || pairs[k].second == i) return static_cast<int>(k);
  throw DomainError("embedding index out of range");
}

CMStructure cm_structure(const NumberField& field, Prec precision_bits) {
  if (field.degree % 2 != 0) throw NotCMError("odd-degree field has a real embedding");
  if (field.degree > kMaxDegree) throw DomainError("field degree exceeds 64");
  CMStructure cm;
  cm.field = field;
  cm.embeddings = isolate_embeddings(field, precision_bits);
  for (bool r : cm.embeddings.is_real)
    if (r) throw NotCMError("field has a real embedding");
  cm.partner = conjugation_pairing(cm.embeddings);
  cm.g = field.degree / 2;
  for (int i = 0; i < field.degree; ++i)
    if (i < cm.partner[static_cast<size_t>(i)]) cm.pairs.emplace_back(i, cm.partner[static_cast<size_t>(i)]);

  std::vector<CBall> traces, norms;
  for (const auto& [a, b] : cm.pairs) {
    const CBall& za = cm.embeddings.roots[static_cast<size_t>(a)];
    const CBall& zb = cm.embeddings.roots[static_cast<size_t>(b)];
    traces.push_back(za + zb);
    norms.push_back(za * zb);
  }
  ZPoly trace_poly, norm_poly;
  try {
    trace_poly = symmetric_poly(traces);
    norm_poly = symmetric_poly(norms);
  } catch (const NonIntegralError& e) {
    throw NotCMError(std::string("complex conjugation is not an automorphism: ") + e.what());
  }
  if (squarefree(trace_poly)) {
    cm.totally_real_poly = trace_poly;
    cm.totally_real_generator = "trace";
  } else if (squarefree(norm_poly)) {
    cm.totally_real_poly = norm_poly;
    cm.totally_real_generator = "norm";
  } else {
    for (long c = 1; c <= 64 && cm.totally_real_poly.is_zero(); ++c) {
      std::vector<CBall> shifted;
      const CBall cc = CBall::from_si(c, cm.embeddings.roots[0].prec());
      for (const auto& [a, b] : cm.pairs)
        shifted.push_back((cm.embeddings.roots[static_cast<size_t>(a)] + cc) *
                          (cm.embeddings.roots[static_cast<size_t>(b)] + cc));
      ZPoly q = symmetric_poly(shifted);
      if (squarefree(q)) {
        cm.totally_real_poly = q;
        cm.totally_real_generator = "norm of pi+" + std::to_string(c);
      }
    }
    if (cm.totally_real_poly.is_zero()) throw PrecisionError("no generator of the totally real subfield found");
  }
  return cm;
}

std::string to_string(TypeClass c) {
  switch (c) {
    case TypeClass::Full:
      return "FULL";
    case TypeClass::Partial:
      return "PARTIAL";
    default:
      return "INVALID";
  }
}

Mask conjugate_mask(const CMStructure& cm, Mask mask) {
  Mask out = 0;
  for (int i = 0; i < cm.degree(); ++i)
    if (mask_has(mask, i)) out |= Mask{1} << cm.partner[static_cast<size_t>(i)];
  return out;
}

Mask pair_closure(const CMStructure& cm, Mask mask) { return mask | conjugate_mask(cm, mask); }

TypeClass classify(const CMStructure& cm, Mask mask) {
  if ((mask & ~full_mask(cm.degree())) != 0) return TypeClass::Invalid;
  if ((mask & conjugate_mask(cm, mask)) != 0) return TypeClass::Invalid;
  return mask_size(mask) == cm.g ? TypeClass::Full : TypeClass::Partial;
}

CMType make_type(const CMStructure& cm, Mask mask) { return CMType{mask, classify(cm, mask)}; }

std::vector<CMType> enumerate_full_types(const CMStructure& cm) {
  return complements(cm, 0);
}

std::vector<CMType> complements(const CMStructure& cm, Mask phi) {
  if (classify(cm, phi) == TypeClass::Invalid) throw DomainError("complements require a partial CM-type");
  const Mask touched = pair_closure(cm, phi);
  std::vector<std::pair<int, int>> free;
  for (const auto& p : cm.pairs)
    if (!mask_has(touched, p.first)) free.push_back(p);
  const int k = static_cast<int>(free.size());
  if (k > 30) throw DomainError("too many complementary types to enumerate");
  std::vector<CMType> out;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << k); ++c) {
    Mask m = 0;
    for (int p = 0; p < k; ++p) {
      bool second = ((c >> (k - 1 - p)) & 1U) != 0;
      m |= Mask{1} << (second ? free[static_cast<size_t>(p)].second : free[static_cast<size_t>(p)].first);
    }
    out.push_back(make_type(cm, m));
  }
  return out;
}

std::optional<std::pair<int, int>> nearby(const CMStructure& cm, Mask phi1, Mask phi2) {
  if (classify(cm, phi1) != TypeClass::Full || classify(cm, phi2) != TypeClass::Full)
    throw DomainError("nearby requires two full CM-types");
  const Mask common = phi1 & phi2;
  if (mask_size(common) != cm.g - 1) return std::nullopt;
  return std::make_pair(__builtin_ctzll(phi1 & ~common), __builtin_ctzll(phi2 & ~common));
}

std::string format_type(const CMStructure& cm, Mask mask) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  auto emit = [&](int i) {
    if (!mask_has(mask, i)) return;
    if (!first) os << ",";
    os << i + 1;
    first = false;
  };
  for (const auto& [a, b] : cm.pairs) {
    emit(a);
    emit(b);
  }
  for (int i = 0; i < cm.degree(); ++i)
    if (cm.partner[static_cast<size_t>(i)] == i) emit(i);
  os << "}";
  return os.str();
}

Mask parse_type(std::string_view text, int degree) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (!s.empty() && s.front() == '{') {
    if (s.back() != '}') throw ParseError("unbalanced braces in CM-type");
    s = s.substr(1, s.size() - 2);
  }
  Mask m = 0;
  if (s.empty()) return m;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.size() > 3 || !std::all_of(item.begin(), item.end(), ::isdigit))
      throw ParseError("bad embedding index '" + item + "'");
    int idx = std::stoi(item);
    if (idx < 1 || idx > degree) throw DomainError("embedding index " + item + " out of range");
    if (mask_has(m, idx - 1)) throw ParseError("repeated embedding index " + item);
    m |= Mask{1} << (idx - 1);
  }
  return m;
}

Mask apply_perm(const std::vector<int>& perm, Mask mask) {
  Mask out = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    if (mask_has(mask, static_cast<int>(i))) out |= Mask{1} << perm[i];
  return out;
}

std::vector<Mask> orbit(const GaloisAction& action, Mask mask) {
  std::vector<Mask> out;
  std::set<Mask> seen;
  for (const auto& p : action.perms) {
    Mask img = apply_perm(p, mask);
    if (seen.insert(img).second) out.push_back(img);
  }
  return out;
}

int reflex_degree(const GaloisAction& action, Mask psi) {
  size_t stab = 0;
  for (const auto& p : action.perms)
    if (apply_perm(p, psi) == psi) ++stab;
  return static_cast<int>(action.order() / stab);
}

GaloisAction galois_action(const CMStructure& cm) {
  const int n = cm.degree();
  GaloisAction act;
  std::vector<int> id(static_cast<size_t>(n));
  std::iota(id.begin(), id.end(), 0);

  if (cm.field.conductor) {
    const unsigned f = *cm.field.conductor;
    std::vector<unsigned> exps;
    std::map<unsigned, int> index;
    for (unsigned k = 1; k < f; ++k)
      if (std::gcd(k, f) == 1) {
        index[k] = static_cast<int>(exps.size());
        exps.push_back(k);
      }
    for (unsigned a : exps) {
      std::vector<int> perm;
      for (unsigned k : exps) perm.push_back(index.at(static_cast<unsigned>((static_cast<unsigned long>(a) * k) % f)));
      act.perms.push_back(std::move(perm));
    }
    act.is_exact = true;
    act.method = "cyclotomic";
    return act;
  }

  if (n == 2) {
    act.perms = {id, cm.partner};
    act.is_exact = true;
    act.method = "quadratic";
    return act;
  }

  const ZPoly& p = cm.field.defining_poly;
  if (!uniform_patterns(p))
    throw NotGaloisError("E/Q is not Galois: a prime splits into factors of unequal degree");

  const auto& roots = cm.embeddings.roots;
  const Prec prec = cm.embeddings.precision_bits;
  std::vector<CBall> powers{CBall::from_si(1, roots[0].prec())};
  for (int k = 1; k < n; ++k) powers.push_back(powers.back() * roots[0]);
  std::set<std::vector<int>> found;
  for (int j = 0; j < n; ++j) {
    bool ok = false;
    for (const QPoly& h : relation_candidates(powers, roots[static_cast<size_t>(j)], prec)) {
      if (!compose_mod(p, h, p).is_zero()) continue;
      auto perm = permutation_of(h, roots);
      if (perm[0] != j) continue;
      found.insert(std::move(perm));
      ok = true;
      break;
    }
    if (!ok)
      throw PrecisionError("automorphism sending root 1 to root " + std::to_string(j + 1) + " not certified");
  }
  act.perms.assign(found.begin(), found.end());
  std::sort(act.perms.begin(), act.perms.end(), [&](const auto& a, const auto& b) {
    if (a == id) return b != id;
    if (b == id) return false;
    return a < b;
  });
  if (std::find(act.perms.begin(), act.perms.end(), cm.partner) == act.perms.end())
    throw PrecisionError("conjugation missing from the automorphism group");
  act.is_exact = true;
  act.method = "root-matching";
  return act;
}

}  // namespace cmh
