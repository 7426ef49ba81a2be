#include <random>
#include <set>

#include "cmh/cmtypes.hpp"
#include "cmh/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmh;

namespace {

std::vector<std::string> formatted_full_types(const CMStructure& cm) {
  std::vector<std::string> out;
  for (const auto& t : enumerate_full_types(cm)) out.push_back(format_type(cm, t.mask));
  return out;
}

}  // namespace

TEST_CASE("CM structure of Q(zeta_5)") {
  CMStructure cm = cm_structure(parse_field("cyclotomic:5"), 128);
  CHECK(cm.g == 2);
  CHECK(cm.partner == std::vector<int>{3, 2, 1, 0});
  CHECK(cm.totally_real_poly.to_string() == "x^2+x-1");
  CHECK(formatted_full_types(cm) == std::vector<std::string>{"{1,2}", "{1,3}", "{4,2}", "{4,3}"});
}

TEST_CASE("non-CM fields are rejected") {
  CHECK_THROWS_AS(cm_structure(parse_field("poly:x^3-2"), 128), NotCMError);
  CHECK_THROWS_AS(cm_structure(parse_field("poly:x^4-2"), 128), NotCMError);
  CHECK_THROWS_AS(cm_structure(parse_field("poly:x^4-x^2-1"), 128), NotCMError);
}

TEST_CASE("totally real subfield for a non-squarefree trace polynomial") {
  CMStructure cm = cm_structure(parse_field("poly:x^4+5*x^2+3"), 128);
  CHECK(cm.g == 2);
  CHECK(cm.totally_real_poly.to_string() == "x^2-5*x+3");
}

TEST_CASE("type classification and parsing") {
  CMStructure cm = cm_structure(parse_field("cyclotomic:5"), 128);
  CHECK(classify(cm, parse_type("{1,2}", 4)) == TypeClass::Full);
  CHECK(classify(cm, parse_type("{1}", 4)) == TypeClass::Partial);
  CHECK(classify(cm, parse_type("{1,4}", 4)) == TypeClass::Invalid);
  CHECK(classify(cm, parse_type("{}", 4)) == TypeClass::Partial);
  CHECK_THROWS_AS(parse_type("{5}", 4), DomainError);
  CHECK_THROWS_AS(parse_type("{1,1}", 4), ParseError);
  CHECK(conjugate_mask(cm, parse_type("{1,2}", 4)) == parse_type("{3,4}", 4));
  CHECK(complements(cm, parse_type("{1}", 4)).size() == 2);
  auto nb = nearby(cm, parse_type("{1,2}", 4), parse_type("{1,3}", 4));
  REQUIRE(nb);
  CHECK(nb->first == 1);
  CHECK(nb->second == 2);
}

TEST_CASE("Galois action of cyclotomic fields matches the exact model") {
  for (unsigned f : {5u, 7u, 8u, 12u, 15u}) {
    CMStructure cm = cm_structure(cyclotomic_field(f), 128);
    GaloisAction act = galois_action(cm);
    CHECK(act.order() == static_cast<size_t>(cm.degree()));
    std::set<Mask> lib, ref;
    for (const auto& p : act.perms) lib.insert(apply_perm(p, 0b11));
    for (unsigned a = 1; a < f; ++a)
      if (std::gcd(a, f) == 1) ref.insert(oracle::cyclotomic_apply(f, a, 0b11));
    CHECK(lib == ref);
  }
}

TEST_CASE("Galois action by root matching") {
  for (const char* spec : {"poly:x^4+1", "poly:x^4+5*x^2+5", "poly:x^8+1", "poly:x^4+3*x^2+1"}) {
    CMStructure cm = cm_structure(parse_field(spec), 128);
    GaloisAction act = galois_action(cm);
    CHECK(act.order() == static_cast<size_t>(cm.degree()));
    // Each automorphism commutes with complex conjugation on a CM field.
    for (const auto& p : act.perms)
      for (int i = 0; i < cm.degree(); ++i)
        CHECK(p[static_cast<size_t>(cm.partner[static_cast<size_t>(i)])] ==
              cm.partner[static_cast<size_t>(p[static_cast<size_t>(i)])]);
  }
  CHECK_THROWS_AS(galois_action(cm_structure(parse_field("poly:x^4+5*x^2+3"), 128)), NotGaloisError);
}

TEST_CASE("reflex degrees") {
  CMStructure cm = cm_structure(parse_field("cyclotomic:5"), 128);
  GaloisAction act = galois_action(cm);
  CHECK(reflex_degree(act, parse_type("{1,2}", 4)) == 4);
  CHECK(reflex_degree(act, parse_type("{1,4}", 4)) == 2);
  CHECK(reflex_degree(act, parse_type("{1,2,3,4}", 4)) == 1);
}

TEST_CASE("enumeration properties") {
  std::mt19937 rng(314);
  for (unsigned f : {7u, 9u, 16u, 20u}) {
    CMStructure cm = cm_structure(cyclotomic_field(f), 128);
    auto types = enumerate_full_types(cm);
    CHECK(types.size() == (size_t{1} << cm.g));
    std::set<Mask> seen;
    for (const auto& t : types) {
      CHECK(classify(cm, t.mask) == TypeClass::Full);
      CHECK(conjugate_mask(cm, conjugate_mask(cm, t.mask)) == t.mask);
      seen.insert(t.mask);
    }
    CHECK(seen.size() == types.size());
    std::uniform_int_distribution<size_t> pick(0, types.size() - 1);
    const Mask m = types[pick(rng)].mask;
    CHECK(parse_type(format_type(cm, m), cm.degree()) == m);
  }
}
