#include "cmh/report.hpp"
#include "doctest.h"

using namespace cmh;

TEST_CASE("run configuration") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.precision_bits = 32;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.precision_bits = 512;
  cfg.escalation_cap = 256;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("precision escalation") {
  RunConfig cfg;
  cfg.precision_bits = 64;
  cfg.escalation_cap = 1024;
  int calls = 0;
  Prec used = with_escalation(cfg, [&](Prec p) {
    ++calls;
    if (p < 512) throw PrecisionError("too coarse");
    return p;
  });
  CHECK(used == 512);
  CHECK(calls == 4);
  CHECK_THROWS_AS(with_escalation(cfg, [](Prec) -> int { throw PrecisionError("never"); }), PrecisionError);
}

TEST_CASE("identity report over Q(zeta_5)") {
  RunConfig cfg;
  CommandResult r = identity_grand("cyclotomic:5", std::nullopt, true, cfg);
  CHECK(r.cert.ok());
  CHECK(r.results["reports"].size() == 8);
  CHECK(r.cert.max_bound < 1e-30);
}

TEST_CASE("scan rows") {
  RunConfig cfg;
  auto rows = scan_cyclotomic_rows(12, cfg);
  std::vector<unsigned> fs;
  for (const auto& row : rows) {
    fs.push_back(row.f);
    CHECK(row.error.empty());
    CHECK(row.identity_pass);
  }
  CHECK(fs == std::vector<unsigned>{3, 4, 5, 7, 8, 9, 11, 12});
  CHECK(scan_cyclotomic_rows(2, cfg).empty());
  CHECK_THROWS_AS(scan_cyclotomic_rows(101, cfg), DomainError);
}

TEST_CASE("abelian decomposition of quadratic polynomials") {
  auto dec = abelian_decomposition(parse_field("poly:x^2+x+2"), 128);
  CHECK(dec.d_E == 7);
  CHECK(dec.g == 1);
  CHECK_THROWS_AS(abelian_decomposition(parse_field("poly:x^4+5*x^2+3"), 128), DomainError);
}

TEST_CASE("verify_thm1 command") {
  RunConfig cfg;
  Thm1Target t;
  t.symbolic_g = 3;
  CommandResult r = verify_thm1(t, "both", cfg);
  REQUIRE(r.results["items"].size() == 3);
  for (const auto& item : r.results["items"]) CHECK(item["consistent_variants"] == json::array({"A"}));
  CHECK_THROWS_AS(verify_thm1(t, "C", cfg), DomainError);
}
