#include <random>

#include "cmh/errors.hpp"
#include "cmh/zpoly.hpp"
#include "doctest.h"

using namespace cmh;

namespace {

ZPoly random_poly(std::mt19937& rng, int degree, int range) {
  std::uniform_int_distribution<int> dist(-range, range);
  std::vector<mpz_class> c;
  for (int i = 0; i < degree; ++i) c.emplace_back(dist(rng));
  c.emplace_back(1);
  return ZPoly(c);
}

// Discriminant of a product of distinct linear factors.
mpz_class disc_from_roots(const std::vector<long>& r) {
  mpz_class d = 1;
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = i + 1; j < r.size(); ++j) d *= mpz_class(r[i] - r[j]) * (r[i] - r[j]);
  return d;
}

}  // namespace

TEST_CASE("parse and print round trip") {
  ZPoly p = parse_zpoly("x^4+5*x^2+3");
  CHECK(p.degree() == 4);
  CHECK(p.to_string() == "x^4+5*x^2+3");
  CHECK(parse_zpoly("-2x^3 + x - 7").to_string() == "-2*x^3+x-7");
  CHECK_THROWS_AS(parse_zpoly("x^^2"), ParseError);
  CHECK_THROWS_AS(parse_zpoly("y+1"), ParseError);
}

TEST_CASE("discriminants of known polynomials") {
  CHECK(discriminant(parse_zpoly("x^4+5*x^2+3")) == 8112);
  CHECK(discriminant(cyclotomic_polynomial(5)) == 125);
  CHECK(discriminant(parse_zpoly("-2*x^3+x-7")) == -5284);
  CHECK(discriminant(parse_zpoly("x^2+1")) == -4);
  CHECK(discriminant(parse_zpoly("x^2+x+1")) == -3);
}

TEST_CASE("discriminant matches root differences for split polynomials") {
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<long> dist(-9, 9);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<long> r;
    ZPoly p = ZPoly::constant(1);
    for (int i = 0; i < n; ++i) {
      r.push_back(dist(rng));
      p = p * ZPoly({mpz_class(-r.back()), mpz_class(1)});
    }
    CHECK(discriminant(p) == disc_from_roots(r));
  }
}

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic_polynomial(1).to_string() == "x-1");
  CHECK(cyclotomic_polynomial(4).to_string() == "x^2+1");
  CHECK(cyclotomic_polynomial(12).to_string() == "x^4-x^2+1");
  ZPoly prod = ZPoly::constant(1);
  for (unsigned d : {1u, 2u, 3u, 4u, 6u, 12u}) prod = prod * cyclotomic_polynomial(d);
  CHECK(prod == ZPoly::x_power(12) - ZPoly::constant(1));
}

TEST_CASE("exact division and evaluation") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    ZPoly a = random_poly(rng, 1 + trial % 5, 6);
    ZPoly b = random_poly(rng, 1 + trial % 3, 6);
    auto q = (a * b).exact_div(b);
    REQUIRE(q);
    CHECK(*q == a);
    CHECK((a * b).eval(mpz_class(3)) == a.eval(mpz_class(3)) * b.eval(mpz_class(3)));
  }
  CHECK_FALSE(parse_zpoly("x^2+1").exact_div(parse_zpoly("x+1")));
}

TEST_CASE("factor degrees modulo primes") {
  auto d = factor_degrees_mod(parse_zpoly("x^4+5*x^2+3"), 17);
  REQUIRE(d);
  std::vector<int> got = *d;
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<int>{1, 1, 2});
  // Phi_5 splits completely mod 11 and stays irreducible mod 2.
  CHECK(*factor_degrees_mod(cyclotomic_polynomial(5), 11) == std::vector<int>{1, 1, 1, 1});
  CHECK(*factor_degrees_mod(cyclotomic_polynomial(5), 2) == std::vector<int>{4});
}

TEST_CASE("integer factorization") {
  auto f = factor_integer(mpz_class(8112));
  std::vector<std::pair<mpz_class, int>> want{{2, 4}, {3, 1}, {13, 2}};
  CHECK(f == want);
  CHECK(is_perfect_square(mpq_class(49, 4)));
  CHECK_FALSE(is_perfect_square(mpq_class(48)));
}

TEST_CASE("compose_mod detects automorphisms") {
  // zeta -> zeta^2 is an automorphism of Q(zeta_5).
  ZPoly phi5 = cyclotomic_polynomial(5);
  QPoly h(std::vector<mpq_class>{0, 0, 1});
  CHECK(compose_mod(phi5, h, phi5).is_zero());
  QPoly notauto(std::vector<mpq_class>{1, 1});
  CHECK_FALSE(compose_mod(phi5, notauto, phi5).is_zero());
}
