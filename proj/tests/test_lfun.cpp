#include <numeric>

#include "cmh/errors.hpp"
#include "cmh/lfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmh;

namespace {

bool overlaps(const CBall& a, const CBall& b) { return a.re().overlaps(b.re()) && a.im().overlaps(b.im()); }

unsigned euler_phi(unsigned n) {
  unsigned c = 0;
  for (unsigned a = 1; a <= n; ++a) c += std::gcd(a, n) == 1;
  return c;
}

}  // namespace

TEST_CASE("character enumeration") {
  for (unsigned f : {3u, 4u, 8u, 15u, 16u, 24u, 40u}) {
    auto chars = enumerate_characters(f);
    CHECK(chars.size() == euler_phi(f));
    CHECK(chars.front().is_trivial());
    for (const auto& chi : chars) {
      // Multiplicativity on a few pairs of units.
      for (unsigned a = 1; a < f; ++a)
        for (unsigned b = 1; b < f; b += 3) {
          if (std::gcd(a, f) != 1 || std::gcd(b, f) != 1) continue;
          const int lhs = chi.exp_at(static_cast<unsigned long>(a) * b);
          const int rhs = (chi.exp_at(a) + chi.exp_at(b)) % static_cast<int>(chi.value_order);
          CHECK(lhs == rhs);
        }
      CHECK(f % chi.conductor == 0);
      const auto prim = primitive_character(chi);
      CHECK(prim.is_primitive());
      CHECK(prim.conductor == chi.conductor);
    }
  }
}

TEST_CASE("L(0) of quadratic characters is exact") {
  const auto q4 = decompose_extension_character(4, {});
  REQUIRE(q4.characters.size() == 1);
  CHECK(l_at_zero(q4.characters[0]).rational() == mpq_class(1, 2));
  const auto q3 = decompose_extension_character(3, {});
  CHECK(l_at_zero(q3.characters[0]).rational() == mpq_class(1, 3));
  for (long d : {-7L, -8L, -11L, -19L, -20L, -24L}) {
    std::vector<unsigned> gens;
    for (long a = 1; a < -d; ++a)
      if (mpz_kronecker(mpz_class(d).get_mpz_t(), mpz_class(a).get_mpz_t()) == 1) gens.push_back(static_cast<unsigned>(a));
    auto dec = decompose_extension_character(static_cast<unsigned>(-d), gens);
    REQUIRE(dec.characters.size() == 1);
    CHECK(l_at_zero(dec.characters[0]).rational() == oracle::kronecker_l0(d));
  }
}

TEST_CASE("odd characters have nonzero L(0), even nontrivial ones vanish") {
  for (const auto& chi : enumerate_characters(13)) {
    if (!chi.is_primitive()) continue;
    CHECK(l_at_zero(chi).is_zero() == !chi.odd);
  }
}

TEST_CASE("Lerch and finite-difference L'(0) agree") {
  for (unsigned f : {3u, 4u, 5u, 7u, 8u, 11u, 12u, 15u, 20u}) {
    for (const auto& chi : enumerate_characters(f)) {
      if (!chi.is_primitive()) continue;
      CAPTURE(chi.label());
      const LValue lv = l_values(chi, 192);
      CHECK(overlaps(lv.l_prime_at_0, l_prime_oracle(chi, 192)));
    }
  }
}

TEST_CASE("Hurwitz zeta special values") {
  const Prec prec = 192;
  // zeta(2, 1) = pi^2 / 6 and zeta(0, x) = 1/2 - x.
  Ball z2 = hurwitz_zeta(Ball::from_si(2, prec), Ball::from_si(1, prec), prec);
  Ball pi = Ball::pi(prec);
  CHECK((z2 - pi * pi / Ball::from_si(6, prec)).contains_zero());
  Ball z0 = hurwitz_zeta(Ball(prec), Ball::from_mpq(mpq_class(1, 3), prec), prec);
  CHECK((z0 - Ball::from_mpq(mpq_class(1, 6), prec)).contains_zero());
}

TEST_CASE("averaged height of imaginary quadratic fields") {
  const Prec prec = 256;
  for (unsigned d : {3u, 4u}) {
    auto dec = decompose_extension_character(d, {});
    AveragedHeight a = averaged_faltings(dec, prec, LPrimeMethod::Lerch);
    AveragedHeight b = averaged_faltings(dec, prec, LPrimeMethod::FiniteDifference);
    CHECK(a.value.overlaps(b.value));
    CHECK(a.log_derivative.overlaps(chowla_selberg_log_derivative(d, prec)));
  }
  auto qi = averaged_faltings(decompose_extension_character(4, {}), prec);
  CHECK(std::fabs(qi.value.mid_double() + 0.7381679829868094) < 1e-14);
}

TEST_CASE("decomposition errors") {
  CHECK_THROWS_AS(decompose_extension_character(5, {4}), DomainError);
  CHECK_THROWS_AS(decompose_extension_character(8, {2}), DomainError);
  CHECK_THROWS_AS(decompose_extension_character(2, {}), DomainError);
  auto sub = decompose_extension_character(7, {2});
  CHECK(sub.g == 1);
  CHECK(sub.d_E == 7);
}

TEST_CASE("cyclotomic number arithmetic") {
  CyclotomicNumber z(4, {mpq_class(3, 5), mpq_class(1, 5)});
  CHECK(z.to_string() == "3/5 + 1/5*z4");
  CHECK_FALSE(z.is_rational());
  CBall v = z.to_cball(128);
  CHECK(std::fabs(v.re().mid_double() - 0.6) < 1e-15);
  CHECK(std::fabs(v.im().mid_double() - 0.2) < 1e-15);
}
