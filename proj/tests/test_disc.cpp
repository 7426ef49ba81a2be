#include "cmh/disc.hpp"
#include "cmh/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmh;

namespace {

std::vector<Mask> nonempty_partial(const CMStructure& cm) {
  std::vector<Mask> out;
  const Mask all = full_mask(cm.degree());
  for (Mask m = 1; m <= all; ++m)
    if (classify(cm, m) != TypeClass::Invalid) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("field discriminants") {
  struct Case {
    const char* spec;
    long d_E, d_F;
    mpq_class d_rel;
  };
  for (const Case& c : {Case{"cyclotomic:4", 4, 1, 4}, Case{"cyclotomic:5", 125, 5, 5},
                        Case{"cyclotomic:7", 16807, 49, 7}, Case{"cyclotomic:8", 256, 8, 4},
                        Case{"cyclotomic:12", 144, 12, 1}, Case{"poly:x^2+x+1", 3, 1, 3}}) {
    CAPTURE(c.spec);
    CMStructure cm = cm_structure(parse_field(c.spec), 256);
    FieldDiscs fd = field_discs(cm);
    CHECK(fd.d_E == c.d_E);
    CHECK(fd.d_F == c.d_F);
    CHECK(fd.d_rel == c.d_rel);
    CHECK(fd.d_E_verified);
  }
}

TEST_CASE("non-maximal order is flagged") {
  CMStructure cm = cm_structure(parse_field("poly:x^4+5*x^2+3"), 256);
  FieldDiscs fd = field_discs(cm);
  CHECK(fd.d_poly == 8112);
  CHECK(fd.d_F == 13);
  CHECK_FALSE(fd.d_E_verified);
  CHECK(fd.d_E_source == "UNVERIFIED-MAXIMALITY");
  CHECK_THROWS_AS(field_discs(cm, mpz_class(8113)), DomainError);
}

TEST_CASE("subset discriminants match the orbit oracle") {
  for (unsigned f : {5u, 7u, 8u, 12u}) {
    CMStructure cm = cm_structure(cyclotomic_field(f), 256);
    GaloisAction act = galois_action(cm);
    for (Mask psi = 1; psi <= full_mask(cm.degree()); ++psi) {
      if (mask_size(psi) < 2 || mask_size(psi) > 4) continue;
      SubsetDisc sd = subset_disc(cm, psi, &act);
      int size = 0;
      CHECK(*sd.norm_to_Q == oracle::cyclotomic_orbit_norm(f, psi, &size));
      CHECK(sd.reflex_degree == size);
    }
  }
}

TEST_CASE("reflex relative discriminants") {
  CMStructure cm = cm_structure(parse_field("cyclotomic:5"), 256);
  GaloisAction act = galois_action(cm);
  FieldDiscs fd = field_discs(cm);
  ReflexRelDisc one = reflex_rel_disc(cm, act, parse_type("{1}", 4), fd);
  CHECK(one.value == 5);
  CHECK(one.d_sigma == 5);
  ReflexRelDisc both = reflex_rel_disc(cm, act, parse_type("{1,2}", 4), fd);
  CHECK(both.value == 5);
  CHECK(both.orbit_size == 1);

  CMStructure qi = cm_structure(parse_field("cyclotomic:4"), 256);
  ReflexRelDisc r = reflex_rel_disc(qi, galois_action(qi), 1, field_discs(qi));
  CHECK(r.value == 4);
  CHECK(r.d_sigma == 4);
}

TEST_CASE("quaternion ramification") {
  CMStructure cm = cm_structure(parse_field("cyclotomic:5"), 256);
  FieldDiscs fd = field_discs(cm);
  auto q = quaternion_ramification(fd, {{5, 1}}, 1);
  CHECK(q.d_B == 5);
  CHECK_THROWS_AS(quaternion_ramification(fd, {{5, 1}}, 2), DomainError);
  CHECK_THROWS_AS(quaternion_ramification(fd, {{3, 1}}, 1), DomainError);
}

TEST_CASE("grand identity, Vandermonde and norm form on all partial types") {
  for (const char* spec : {"cyclotomic:4", "cyclotomic:5", "cyclotomic:7", "cyclotomic:8", "cyclotomic:12",
                           "poly:x^4+5*x^2+3"}) {
    CAPTURE(spec);
    CMStructure cm = cm_structure(parse_field(spec), 256);
    FieldDiscs fd = field_discs(cm);
    std::optional<GaloisAction> act;
    if (cm.field.conductor) act = galois_action(cm);
    std::vector<oracle::cld> roots;
    for (const auto& z : cm.embeddings.roots) roots.emplace_back(z.re().mid_double(), z.im().mid_double());
    for (Mask phi : nonempty_partial(cm)) {
      IdentityReport ir = grand_identity_check(cm, phi);
      CHECK(ir.pass);
      CHECK(ir.bound < 1e-30);
      const Mask sigma = pair_closure(cm, phi);
      VandermondeReport vr = vandermonde_check(cm, sigma);
      CHECK(vr.pass);
      const long double ref = oracle::vandermonde_abs_sq(roots, sigma);
      CHECK(std::fabs(vr.det_sq.mid_double() - static_cast<double>(ref)) < 1e-9 * (1 + static_cast<double>(ref)));
      if (act) CHECK(log_relation_check(cm, *act, fd, phi).pass);
    }
  }
}

TEST_CASE("multiplicativity of subset discriminants") {
  CMStructure cm = cm_structure(cyclotomic_field(7), 256);
  Ball r = multiplicativity_residual(cm, 0b000011, 0b001100);
  CHECK(r.contains_zero());
  CHECK(r.abs_upper().to_double() < 1e-60);
}

TEST_CASE("invalid subsets are rejected") {
  CMStructure cm = cm_structure(cyclotomic_field(5), 256);
  CHECK_THROWS_AS(grand_identity_check(cm, parse_type("{1,4}", 4)), DomainError);
  CHECK_THROWS_AS(grand_identity_check(cm, 0), DomainError);
  CHECK_THROWS_AS(subset_disc(cm, Mask{1} << 7, nullptr), DomainError);
}
