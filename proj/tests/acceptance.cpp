// Acceptance suite: one PASS/FAIL line per criterion.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "cmh/report.hpp"
#include "oracles.hpp"

using namespace cmh;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const char* const kFields[] = {"cyclotomic:4", "cyclotomic:5", "cyclotomic:7", "cyclotomic:8", "cyclotomic:12",
                               "poly:x^4+5*x^2+3"};

std::vector<oracle::cld> mids(const CMStructure& cm) {
  std::vector<oracle::cld> r;
  for (const auto& z : cm.embeddings.roots) r.emplace_back(z.re().mid_double(), z.im().mid_double());
  return r;
}

mpz_class round_abs(oracle::cld z) { return mpz_class(static_cast<long>(std::llround(std::abs(z.real())))); }

// Oracle d_F for Q(zeta_f): squared differences of 2 cos(2 pi k / f) over the pair representatives.
mpz_class oracle_dF(unsigned f) {
  std::vector<long double> x;
  for (unsigned k = 1; 2 * k < f; ++k)
    if (std::gcd(k, f) == 1) x.push_back(2 * std::cos(2 * 3.14159265358979323846264338327950288L * k / f));
  long double p = 1;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) p *= (x[i] - x[j]) * (x[i] - x[j]);
  return mpz_class(static_cast<long>(std::llround(p)));
}

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  for (unsigned f : {4u, 5u}) {
    CMStructure cm = cm_structure(cyclotomic_field(f), 256);
    GaloisAction act = galois_action(cm);
    FieldDiscs fd = field_discs(cm);
    const auto roots = mids(cm);
    const mpz_class dE_ref = round_abs(oracle::subset_disc(roots, full_mask(cm.degree())));
    const mpz_class dF_ref = f == 4 ? mpz_class(1) : oracle_dF(f);
    mpq_class drel_ref(dE_ref, dF_ref * dF_ref);
    drel_ref.canonicalize();
    o.require(fd.d_E == dE_ref && fd.d_E == (f == 4 ? 4 : 125), "d_E f=" + std::to_string(f));
    o.require(fd.d_F == dF_ref && fd.d_F == (f == 4 ? 1 : 5), "d_F f=" + std::to_string(f));
    o.require(fd.d_rel == drel_ref && fd.d_rel == (f == 4 ? 4 : 5), "d_rel f=" + std::to_string(f));
    const Mask phi = 1;
    const Mask sigma = pair_closure(cm, phi);
    ReflexRelDisc rr = reflex_rel_disc(cm, act, phi, fd);
    o.require(rr.d_sigma == oracle::cyclotomic_orbit_norm(f, sigma) && rr.d_sigma == (f == 4 ? 4 : 5),
              "d_Sigma f=" + std::to_string(f));
    if (f == 4) {
      o.require(*subset_disc(cm, phi, &act).norm_to_Q == 1, "d_phi");
      o.require(*subset_disc(cm, conjugate_mask(cm, phi), &act).norm_to_Q == 1, "d_phibar");
    } else {
      const Mask type = parse_type("{1,2}", 4);
      o.require(*subset_disc(cm, type, &act).norm_to_Q == oracle::cyclotomic_orbit_norm(5, type) &&
                    *subset_disc(cm, type, &act).norm_to_Q == 25,
                "d_Phi({1,2})");
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 1.0, "runtime");
  o.detail << "Q(i): 4,1,4,4,1,1; Q(zeta5): 125,5,5,5,25; " << s << " s";
}

std::vector<Mask> nonempty_partial(const CMStructure& cm) {
  std::vector<Mask> out;
  for (Mask m = 1; m <= full_mask(cm.degree()); ++m)
    if (classify(cm, m) != TypeClass::Invalid) out.push_back(m);
  return out;
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  double worst = 0;
  size_t count = 0;
  for (const char* spec : kFields) {
    CMStructure cm = cm_structure(parse_field(spec), 256);
    for (Mask phi : nonempty_partial(cm)) {
      IdentityReport ir = grand_identity_check(cm, phi, 1e-30);
      worst = std::max(worst, ir.bound);
      ++count;
      o.require(ir.pass, std::string(spec) + " " + format_type(cm, phi));
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 10.0, "runtime");
  o.detail << count << " partial types, worst bound " << worst << ", " << s << " s";
}

void criterion3(Outcome& o) {
  size_t count = 0;
  double worst_rel = 0;
  for (const char* spec : kFields) {
    CMStructure cm = cm_structure(parse_field(spec), 256);
    const auto roots = mids(cm);
    for (Mask phi : nonempty_partial(cm)) {
      const Mask sigma = pair_closure(cm, phi);
      VandermondeReport vr = vandermonde_check(cm, sigma);
      const long double ref = oracle::vandermonde_abs_sq(roots, sigma);
      const double rel = std::fabs(vr.det_sq.mid_double() - static_cast<double>(ref)) / (1 + static_cast<double>(ref));
      worst_rel = std::max(worst_rel, rel);
      o.require(vr.pass, std::string(spec) + " " + format_type(cm, sigma));
      o.require(rel < 1e-9, std::string(spec) + " oracle " + format_type(cm, sigma));
      ++count;
    }
  }
  o.detail << count << " subsets certified, worst oracle deviation " << worst_rel;
}

void criterion4(Outcome& o) {
  const auto t0 = Clock::now();
  const auto q4 = decompose_extension_character(4, {});
  const auto q3 = decompose_extension_character(3, {});
  o.require(l_at_zero(q4.characters.at(0)).rational() == mpq_class(1, 2) && oracle::kronecker_l0(-4) == mpq_class(1, 2),
            "L(0, chi_-4)");
  o.require(l_at_zero(q3.characters.at(0)).rational() == mpq_class(1, 3) && oracle::kronecker_l0(-3) == mpq_class(1, 3),
            "L(0, chi_-3)");
  size_t count = 0;
  for (unsigned f = 3; f <= 40; ++f) {
    for (const auto& chi : enumerate_characters(f)) {
      if (!chi.is_primitive()) continue;
      const LValue lv = l_values(chi, 256);
      const CBall fd = l_prime_oracle(chi, 256);
      const bool agree = lv.l_prime_at_0.re().overlaps(fd.re()) && lv.l_prime_at_0.im().overlaps(fd.im());
      o.require(agree, chi.label());
      ++count;
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 30.0, "runtime");
  o.detail << "L(0)=1/2, 1/3; " << count << " primitive characters agree; " << s << " s";
}

void criterion5(Outcome& o) {
  for (unsigned d : {4u, 3u}) {
    const auto dec = decompose_extension_character(d, {});
    std::vector<Ball> values;
    for (Prec p : {128, 256, 512})
      for (LPrimeMethod m : {LPrimeMethod::Lerch, LPrimeMethod::FiniteDifference})
        values.push_back(averaged_faltings(dec, p, m).value);
    double spread = 0;
    for (const auto& a : values)
      for (const auto& b : values) {
        Ball diff = a - b;
        spread = std::max(spread, diff.abs_upper().to_double());
      }
    o.require(spread < 1e-20, "d=" + std::to_string(d));
    o.detail << (d == 4 ? "Q(i) " : "Q(zeta3) ") << values[2].to_string(25) << " spread " << spread << "; ";
  }
}

void criterion6(Outcome& o) {
  double slowest = 0;
  size_t count = 0;
  for (int g = 1; g <= 6; ++g) {
    const CalcContext ctx = CalcContext::symbolic(g);
    for (int s = 1; s <= g; ++s) {
      const auto t0 = Clock::now();
      const Mask phi = symbolic_phi(ctx, s);
      const auto a = verify_theorem1(ctx, phi, Variant::A);
      const auto b = verify_theorem1(ctx, phi, Variant::B);
      slowest = std::max(slowest, seconds_since(t0));
      const std::string tag = "g=" + std::to_string(g) + " s=" + std::to_string(s);
      o.require(a.verified() != b.verified(), tag + " exactly one empty");
      const auto& bad = a.verified() ? b.residual : a.residual;
      const Mask sigma = phi | ctx.conj(phi);
      const Symbol sym = Symbol::nlog(std::min(sigma, ctx.conj(sigma)));
      o.require(bad.size() == 1 && abs(bad.coeff(sym)) == mpq_class(1, 4 * g), tag + " residual shape");
      ++count;
    }
  }
  o.require(slowest < 5.0, "runtime");
  o.detail << count << " (g, pattern) cases, variant A closes, B leaves (1/4g) LOG(d_Sigma); slowest " << slowest
           << " s";
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(CMH_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out += "<exit " + std::to_string(status) + ">";
  return out;
}

std::string joined(const std::vector<HeightExpr>& v) {
  std::string s;
  for (const auto& e : v) s += e.to_string() + "\n";
  return s;
}

void criterion7(Outcome& o) {
  std::mt19937 rng(20241015);
  size_t perms = 0;
  for (int g = 2; g <= 6; ++g) {
    const CalcContext ctx = CalcContext::symbolic(g);
    for (int s = 1; s < g; ++s) {
      const Mask phi = symbolic_phi(ctx, s);
      const auto base = verify_theorem1(ctx, phi, Variant::B);
      std::vector<size_t> order(ctx.complements(phi).size());
      std::iota(order.begin(), order.end(), 0);
      for (int t = 0; t < 3; ++t) {
        std::shuffle(order.begin(), order.end(), rng);
        const auto r = verify_theorem1(ctx, phi, Variant::B, &order);
        o.require(r.residual.to_string() == base.residual.to_string(), "complement order");
        HeightExpr diff_base = r.lhs - r.rhs;
        // Rebuild the same expression with shuffled term insertion.
        std::vector<std::pair<Symbol, mpq_class>> terms(diff_base.terms().begin(), diff_base.terms().end());
        std::shuffle(terms.begin(), terms.end(), rng);
        HeightExpr rebuilt(ctx.label);
        for (const auto& [sym, c] : terms) rebuilt.add(sym, c);
        RuleSet rules;
        rules.phi = phi;
        o.require(apply_rules(rebuilt, ctx, rules).to_string() == apply_rules(diff_base, ctx, rules).to_string(),
                  "term insertion order");
        ++perms;
      }
      const auto again = verify_theorem1(ctx, phi, Variant::B);
      o.require(joined(again.derived_relations) == joined(base.derived_relations), "derived relations");
    }
  }
  size_t cli = 0;
  for (const char* args : {"identity grand cyclotomic:5 --all --json", "verify-thm1 --symbolic g=3 --variant both --json",
                           "avg-height cyclotomic:4 --json", "scan cyclotomic --max-f 12"}) {
    const std::string a = run_cli(args), b = run_cli(args);
    o.require(a == b && a.find("<exit") == std::string::npos, std::string("cli: ") + args);
    ++cli;
  }
  o.detail << perms << " permuted derivations identical; " << cli << " CLI reports bit-identical";
}

void criterion8(Outcome& o) {
  const auto t0 = Clock::now();
  RunConfig cfg;
  CommandResult r = scan_cyclotomic(25, cfg);
  o.require(r.cert.ok(), "certification failures");
  o.require(r.results["ratios_finite"] == true, "ratios finite");
  o.require(r.text.find("ratio") != std::string::npos, "ratio column");
  o.require(r.results["rows"].size() == 18, "row count");
  o.detail << r.results["rows"].size() << " fields, max ratio "
           << r.results["max_ratio"]["mid"].get<std::string>().substr(0, 12) << " at f="
           << r.results["max_ratio_f"].get<unsigned>() << ", max identity bound " << r.cert.max_bound << ", "
           << seconds_since(t0) << " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"C1 exact discriminants", criterion1},
      {"C2 grand identity", criterion2},
      {"C3 Vandermonde identity", criterion3},
      {"C4 L-values", criterion4},
      {"C5 averaged height", criterion5},
      {"C6 symbolic replay", criterion6},
      {"C7 determinism", criterion7},
      {"C8 cyclotomic scan", criterion8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
