#include <random>

#include "cmh/errors.hpp"
#include "cmh/numfield.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmh;

namespace {

oracle::cld to_cld(const CBall& z) { return {z.re().mid_double(), z.im().mid_double()}; }

std::vector<long> small_coeffs(const ZPoly& p) {
  std::vector<long> out;
  for (const auto& c : p.coeffs()) out.push_back(c.get_si());
  return out;
}

}  // namespace

TEST_CASE("field specs") {
  NumberField k = parse_field("cyclotomic:5");
  CHECK(k.degree == 4);
  CHECK(k.conductor == 5u);
  CHECK(parse_field("poly:x^2+1").degree == 2);
  CHECK_THROWS_AS(parse_field("poly:x^2-1"), ReducibleError);
  CHECK_THROWS_AS(parse_field("cyclotomic:2"), DomainError);
  CHECK_THROWS_AS(parse_field("quadratic:5"), ParseError);
  CHECK_THROWS_AS(parse_field("poly:2*x^2+1"), DomainError);
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(parse_zpoly("x^4+5*x^2+3")));
  CHECK(is_irreducible(cyclotomic_polynomial(15)));
  CHECK_FALSE(is_irreducible(parse_zpoly("x^4+4")));
  CHECK_FALSE(is_irreducible(parse_zpoly("x^4-x^2+16") * parse_zpoly("x^2+3")));
  CHECK_FALSE(is_irreducible(parse_zpoly("x^6+2*x^3+1")));
}

TEST_CASE("embedding order and enclosure") {
  auto e = isolate_embeddings(parse_field("poly:x^2+1"), 128);
  REQUIRE(e.size() == 2);
  CHECK(e.roots[0].im().is_positive());
  CHECK(e.roots[1].im().is_negative());
  CHECK(e.roots[0].re().contains(0));

  auto z5 = isolate_embeddings(parse_field("cyclotomic:5"), 128);
  const auto ref = oracle::cyclotomic_roots(5);
  for (size_t i = 0; i < 4; ++i) CHECK(std::abs(to_cld(z5.roots[i]) - ref[i]) < 1e-15L);
}

TEST_CASE("roots agree with an independent solver") {
  for (const char* text : {"x^4+5*x^2+3", "x^3-2", "x^6+x^5+x^4+x^3+x^2+x+1", "x^4-x^3+2*x+7"}) {
    ZPoly p = parse_zpoly(text);
    auto r = isolate_roots(p, 192);
    auto ref = oracle::roots(small_coeffs(p));
    REQUIRE(r.size() == ref.size());
    for (size_t i = 0; i < r.size(); ++i) CHECK(std::abs(to_cld(r[i]) - ref[i]) < 1e-12L);
  }
}

TEST_CASE("real roots are self-paired") {
  auto e = isolate_embeddings(parse_field("poly:x^3-2"), 128);
  auto partner = conjugation_pairing(e);
  int fixed = 0;
  for (size_t i = 0; i < partner.size(); ++i) fixed += partner[i] == static_cast<int>(i);
  CHECK(fixed == 1);
}

TEST_CASE("integer recognition") {
  CHECK(recognize_integer(Ball::from_si(7, 128)) == 7);
  Ball near = Ball::from_mpq(mpq_class(1, 2), 128);
  near.add_error_2exp(-2);
  CHECK_THROWS_AS(recognize_integer(near), PrecisionError);
  Ball off = Ball::from_mpq(mpq_class(1, 3), 128);
  CHECK_THROWS_AS(recognize_integer(off), NonIntegralError);
}

TEST_CASE("polynomial reconstruction from roots") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> dist(-5, 5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<mpz_class> c;
    for (int i = 0; i < 4; ++i) c.emplace_back(dist(rng));
    c[0] = c[0] == 0 ? 1 : c[0];
    c.emplace_back(1);
    ZPoly p(c);
    if (discriminant(p) == 0) continue;
    CHECK(recognize_zpoly(poly_from_roots(isolate_roots(p, 128))) == p);
  }
}
