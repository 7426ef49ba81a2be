#include "cmh/report.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>

namespace cmh {

namespace {

std::string mpfr_text(const char* fmt, int digits, mpfr_srcptr x) {
  char* s = nullptr;
  mpfr_asprintf(&s, fmt, digits, x);
  std::unique_ptr<char, void (*)(char*)> guard(s, [](char* p) { mpfr_free_str(p); });
  return std::string(s);
}

int digits_for(Prec prec) { return static_cast<int>(std::min<Prec>(40, prec * 30103 / 100000)); }

bool overlaps(const CBall& a, const CBall& b) { return a.re().overlaps(b.re()) && a.im().overlaps(b.im()); }

double bound_of(const Ball& b) { return b.abs_upper().to_double(); }

std::string pairs_text(const CMStructure& cm) {
  std::ostringstream os;
  for (size_t i = 0; i < cm.pairs.size(); ++i)
    os << (i ? " " : "") << "(" << cm.pairs[i].first + 1 << "," << cm.pairs[i].second + 1 << ")";
  return os.str();
}

struct FieldData {
  CMStructure cm;
  std::optional<GaloisAction> action;
  std::string galois_note;
};

FieldData load_field(const std::string& spec, Prec prec) {
  FieldData d{cm_structure(parse_field(spec), prec), std::nullopt, {}};
  try {
    d.action = galois_action(d.cm);
  } catch (const NotGaloisError& e) {
    d.galois_note = e.what();
  }
  return d;
}

json discs_json(const FieldDiscs& fd) {
  json j;
  j["d_poly"] = exact_json(fd.d_poly);
  j["d_E"] = exact_json(fd.d_E);
  j["d_F"] = exact_json(fd.d_F);
  j["d_rel"] = exact_json(fd.d_rel);
  j["index_sq"] = exact_json(fd.index_sq);
  j["d_E_source"] = fd.d_E_source;
  j["d_F_source"] = fd.d_F_source;
  return j;
}

void note_discs(Certification& cert, const FieldDiscs& fd, const std::string& label) {
  if (!fd.d_E_verified) cert.unverified.push_back(label + ": d_E " + fd.d_E_source);
  if (!fd.d_F_verified) cert.unverified.push_back(label + ": d_F " + fd.d_F_source);
}

}  // namespace

void RunConfig::validate() const {
  if (precision_bits < 64) throw DomainError("precision must be at least 64 bits");
  if (escalation_cap < precision_bits) throw DomainError("escalation cap is below the precision");
}

json RunConfig::to_json() const {
  json j;
  j["precision_bits"] = precision_bits;
  j["escalation_cap"] = escalation_cap;
  j["output"] = output == OutputFormat::Json ? "json" : output == OutputFormat::Csv ? "csv" : "text";
  return j;
}

void Certification::note_bound(double b) { max_bound = std::max(max_bound, b); }

json Certification::to_json() const {
  json j;
  j["ok"] = ok();
  j["max_residual_bound"] = max_bound;
  j["final_precision"] = final_precision;
  j["unverified"] = unverified;
  j["failures"] = failures;
  return j;
}

json ball_json(const Ball& b) {
  json j;
  j["mid"] = mpfr_text("%.*Rg", digits_for(b.prec()), b.mid().get());
  j["radius"] = mpfr_text("%.*Rg", 3, b.rad().get());
  return j;
}

json cball_json(const CBall& z) {
  json j;
  j["re"] = ball_json(z.re());
  j["im"] = ball_json(z.im());
  return j;
}

json exact_json(const mpz_class& v) { return json{{"exact", v.get_str()}}; }
json exact_json(const mpq_class& v) { return json{{"exact", v.get_str()}}; }

std::vector<Mask> partial_types(const CMStructure& cm, bool include_empty) {
  std::vector<Mask> out;
  const size_t g = cm.pairs.size();
  std::uint64_t total = 1;
  for (size_t i = 0; i < g; ++i) total *= 3;
  for (std::uint64_t c = 0; c < total; ++c) {
    Mask m = 0;
    std::uint64_t r = c;
    for (size_t i = 0; i < g; ++i, r /= 3) {
      if (r % 3 == 1) m |= Mask{1} << cm.pairs[i].first;
      if (r % 3 == 2) m |= Mask{1} << cm.pairs[i].second;
    }
    if (m != 0 || include_empty) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), [](Mask a, Mask b) {
    return mask_size(a) != mask_size(b) ? mask_size(a) < mask_size(b) : a < b;
  });
  return out;
}

CommandResult field_info(const std::string& spec, const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    FieldData d = load_field(spec, prec);
    FieldDiscs fd = field_discs(d.cm);
    json r;
    r["label"] = d.cm.field.label;
    r["defining_poly"] = d.cm.field.defining_poly.to_string();
    r["degree"] = d.cm.degree();
    r["g"] = d.cm.g;
    if (d.cm.field.conductor) r["conductor"] = *d.cm.field.conductor;
    json roots = json::array();
    for (const auto& z : d.cm.embeddings.roots) roots.push_back(cball_json(z));
    r["embeddings"] = roots;
    json pairs = json::array();
    for (const auto& [a, b] : d.cm.pairs) pairs.push_back({a + 1, b + 1});
    r["conjugate_pairs"] = pairs;
    r["totally_real_poly"] = d.cm.totally_real_poly.to_string();
    r["totally_real_generator"] = d.cm.totally_real_generator;
    r["galois"] = d.action ? json{{"order", d.action->order()}, {"method", d.action->method}}
                           : json{{"order", nullptr}, {"note", d.galois_note}};
    r["discriminants"] = discs_json(fd);
    out.results = r;
    out.cert.final_precision = prec;
    note_discs(out.cert, fd, d.cm.field.label);

    std::ostringstream os;
    os << "field " << d.cm.field.label << "  poly " << r["defining_poly"].get<std::string>() << "  degree "
       << d.cm.degree() << "  g " << d.cm.g << "\n";
    for (size_t i = 0; i < d.cm.embeddings.roots.size(); ++i) {
      const auto& z = d.cm.embeddings.roots[i];
      os << "  tau" << i + 1 << " = " << z.re().to_string(20) << "  +i*  " << z.im().to_string(20) << "\n";
    }
    os << "pairs " << pairs_text(d.cm) << "\n";
    os << "F: " << d.cm.totally_real_poly.to_string() << " (" << d.cm.totally_real_generator << ")\n";
    os << "galois: " << (d.action ? d.action->method + ", order " + std::to_string(d.action->order()) : d.galois_note)
       << "\n";
    os << "d_E " << fd.d_E.get_str() << " [" << fd.d_E_source << "]  d_F " << fd.d_F.get_str() << " ["
       << fd.d_F_source << "]  d_E/F " << fd.d_rel.get_str() << "\n";
    out.text = os.str();
    return 0;
  });
  return out;
}

CommandResult cm_types(const std::string& spec, const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    FieldData d = load_field(spec, prec);
    json types = json::array();
    std::ostringstream os;
    os << "full CM-types of " << d.cm.field.label << " (" << (size_t{1} << d.cm.g) << ")\n";
    for (const auto& t : enumerate_full_types(d.cm)) {
      json j;
      j["type"] = format_type(d.cm, t.mask);
      j["conjugate"] = format_type(d.cm, conjugate_mask(d.cm, t.mask));
      if (d.action) j["reflex_degree"] = reflex_degree(*d.action, t.mask);
      types.push_back(j);
      os << "  " << j["type"].get<std::string>();
      if (d.action) os << "  reflex degree " << reflex_degree(*d.action, t.mask);
      os << "\n";
    }
    out.results["field"] = d.cm.field.label;
    out.results["full_types"] = types;
    out.results["partial_type_count"] = partial_types(d.cm, true).size();
    if (!d.action) out.cert.unverified.push_back("reflex degrees unavailable: " + d.galois_note);
    out.cert.final_precision = prec;
    out.text = os.str();
    return 0;
  });
  return out;
}

CommandResult disc_subset(const std::string& spec, const std::string& subset, const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    FieldData d = load_field(spec, prec);
    const Mask psi = parse_type(subset, d.cm.degree());
    FieldDiscs fd = field_discs(d.cm);
    SubsetDisc sd = subset_disc(d.cm, psi, d.action ? &*d.action : nullptr);
    VandermondeReport vr = vandermonde_check(d.cm, psi);
    json r;
    r["field"] = d.cm.field.label;
    r["subset"] = format_type(d.cm, psi);
    r["class"] = to_string(classify(d.cm, psi));
    r["element_disc"] = cball_json(sd.element_disc);
    if (sd.norm_to_Q) {
      r["d_psi"] = exact_json(*sd.norm_to_Q);
      r["reflex_degree"] = sd.reflex_degree;
    } else {
      r["d_psi"] = nullptr;
      out.cert.unverified.push_back("d_psi needs the Galois action: " + d.galois_note);
    }
    r["vandermonde"] = {{"det_sq", ball_json(vr.det_sq)}, {"disc_abs", ball_json(vr.disc_abs)}, {"pass", vr.pass}};
    if (!vr.pass) out.cert.failures.push_back("vandermonde " + r["subset"].get<std::string>());
    out.cert.note_bound(bound_of(vr.det_sq - vr.disc_abs));
    if (d.action && psi != 0 && classify(d.cm, psi) != TypeClass::Invalid) {
      ReflexRelDisc rr = reflex_rel_disc(d.cm, *d.action, psi, fd);
      r["d_EFS"] = exact_json(rr.value);
      r["d_sigma"] = exact_json(rr.d_sigma);
      r["sigma_orbit_size"] = rr.orbit_size;
      r["ratio"] = exact_json(rr.ratio);
      r["ratio_ball"] = ball_json(rr.ratio_ball);
    }
    r["discriminants"] = discs_json(fd);
    note_discs(out.cert, fd, d.cm.field.label);
    out.results = r;
    out.cert.final_precision = prec;

    std::ostringstream os;
    os << d.cm.field.label << " subset " << r["subset"].get<std::string>() << " (" << r["class"].get<std::string>()
       << ")\n";
    os << "  disc f_psi = " << sd.element_disc.re().to_string(25) << " +i* " << sd.element_disc.im().to_string(5)
       << "\n";
    if (sd.norm_to_Q) os << "  d_psi = " << sd.norm_to_Q->get_str() << "  [E_psi:Q] = " << sd.reflex_degree << "\n";
    if (r.contains("d_EFS"))
      os << "  d_E/F,Sigma = " << r["d_EFS"]["exact"].get<std::string>() << "  d_Sigma = "
         << r["d_sigma"]["exact"].get<std::string>() << "\n";
    os << "  vandermonde " << (vr.pass ? "pass" : "FAIL") << "\n";
    out.text = os.str();
    return 0;
  });
  return out;
}

CommandResult identity_grand(const std::string& spec, const std::optional<std::string>& phi, bool all,
                             const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    out.cert = Certification{};
    FieldData d = load_field(spec, prec);
    FieldDiscs fd = field_discs(d.cm);
    std::vector<Mask> phis;
    if (phi) {
      phis.push_back(parse_type(*phi, d.cm.degree()));
    } else if (all) {
      phis = partial_types(d.cm, false);
    } else {
      for (Mask m : partial_types(d.cm, false))
        if (mask_size(m) == 1) phis.push_back(m);
    }
    json reports = json::array();
    std::ostringstream os;
    os << "grand identity over " << d.cm.field.label << " at " << prec << " bits\n";
    for (Mask m : phis) {
      IdentityReport ir = grand_identity_check(d.cm, m);
      VandermondeReport vr = vandermonde_check(d.cm, pair_closure(d.cm, m));
      json j;
      j["phi"] = format_type(d.cm, m);
      j["log_A"] = ball_json(ir.log_A);
      j["log_T1"] = ball_json(ir.log_T1);
      j["log_T2"] = ball_json(ir.log_T2);
      j["log_T3"] = ball_json(ir.log_T3);
      j["residual"] = ball_json(ir.residual);
      j["bound"] = ir.bound;
      j["pass"] = ir.pass;
      j["vandermonde_pass"] = vr.pass;
      out.cert.note_bound(ir.bound);
      if (!ir.pass) out.cert.failures.push_back("grand identity " + j["phi"].get<std::string>());
      if (!vr.pass) out.cert.failures.push_back("vandermonde " + j["phi"].get<std::string>());
      os << "  phi " << j["phi"].get<std::string>() << "  residual bound " << ir.bound << "  "
         << (ir.pass ? "pass" : "FAIL");
      if (d.action) {
        LogRelationReport lr = log_relation_check(d.cm, *d.action, fd, m);
        j["log_relation"] = {{"residual", ball_json(lr.residual)}, {"pass", lr.pass}};
        out.cert.note_bound(bound_of(lr.residual));
        if (!lr.pass) out.cert.failures.push_back("log relation " + j["phi"].get<std::string>());
        os << "  norm form " << (lr.pass ? "pass" : "FAIL");
      }
      os << "\n";
      reports.push_back(j);
    }
    if (!d.action) out.cert.unverified.push_back("norm-level relation skipped: " + d.galois_note);
    out.results["field"] = d.cm.field.label;
    out.results["reports"] = reports;
    out.cert.final_precision = prec;
    out.text = os.str();
    return 0;
  });
  return out;
}

ExtensionDecomposition abelian_decomposition(const NumberField& field, Prec prec) {
  if (field.conductor) return decompose_extension_character(*field.conductor, {});
  if (field.degree == 2) {
    CMStructure cm = cm_structure(field, prec);
    FieldDiscs fd = field_discs(cm);
    if (!fd.d_E_verified) throw DomainError("field discriminant of " + field.label + " is not certified");
    const mpz_class disc = -fd.d_E;
    const unsigned long f = fd.d_E.get_ui();
    std::vector<unsigned> gens;
    for (unsigned long a = 1; a < f; ++a) {
      mpz_class av(a);
      if (mpz_kronecker(disc.get_mpz_t(), av.get_mpz_t()) == 1) gens.push_back(static_cast<unsigned>(a));
    }
    return decompose_extension_character(static_cast<unsigned>(f), gens);
  }
  throw DomainError("averaged height needs cyclotomic:<f> or an imaginary quadratic field");
}

CommandResult lfun_values(unsigned f, const std::vector<unsigned>& subgroup, const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    out.cert = Certification{};
    ExtensionDecomposition dec = decompose_extension_character(f, subgroup);
    json chars = json::array();
    std::ostringstream os;
    os << "characters of the CM field in Q(zeta_" << f << "), g = " << dec.g << "\n";
    for (const auto& chi : dec.characters) {
      LValue lv = l_values(chi, prec);
      CBall oracle = l_prime_oracle(chi, prec);
      const bool agree = overlaps(lv.l_prime_at_0, oracle);
      json j;
      j["label"] = chi.label();
      j["conductor"] = chi.conductor;
      j["order"] = chi.order();
      j["L0"] = {{"exact", lv.l_at_0.to_string()}};
      j["L1_lerch"] = cball_json(lv.l_prime_at_0);
      j["L1_finite_difference"] = cball_json(oracle);
      j["agree"] = agree;
      if (!agree) out.cert.failures.push_back("L' paths disagree for " + chi.label());
      chars.push_back(j);
      os << "  " << chi.label() << "  L(0) = " << lv.l_at_0.to_string() << "  L'(0) = "
         << lv.l_prime_at_0.re().to_string(25) << " +i* " << lv.l_prime_at_0.im().to_string(10) << "  "
         << (agree ? "paths agree" : "PATHS DISAGREE") << "\n";
    }
    out.results["f"] = f;
    out.results["subgroup"] = dec.h_e;
    out.results["g"] = dec.g;
    out.results["d_E"] = exact_json(dec.d_E);
    out.results["d_F"] = exact_json(dec.d_F);
    out.results["d_rel"] = exact_json(dec.d_rel);
    out.results["characters"] = chars;
    out.cert.final_precision = prec;
    out.text = os.str();
    return 0;
  });
  return out;
}

CommandResult avg_height(const std::string& spec, const RunConfig& cfg) {
  CommandResult out;
  with_escalation(cfg, [&](Prec prec) {
    out.cert = Certification{};
    ExtensionDecomposition dec = abelian_decomposition(parse_field(spec), prec);
    AveragedHeight a = averaged_faltings(dec, prec, LPrimeMethod::Lerch);
    AveragedHeight b = averaged_faltings(dec, prec, LPrimeMethod::FiniteDifference);
    const bool agree = a.value.overlaps(b.value);
    json r;
    r["field"] = spec;
    r["g"] = dec.g;
    r["d_F"] = exact_json(dec.d_F);
    r["d_rel"] = exact_json(dec.d_rel);
    r["log_derivative"] = ball_json(a.log_derivative);
    r["averaged_height"] = ball_json(a.value);
    r["averaged_height_finite_difference"] = ball_json(b.value);
    r["paths_agree"] = agree;
    out.cert.note_bound(bound_of(a.value - b.value));
    if (!agree) out.cert.failures.push_back("averaged height paths disagree");
    std::ostringstream os;
    os << "averaged height of " << spec << " (g = " << dec.g << ")\n";
    os << "  L'/L(0) = " << a.log_derivative.to_string(30) << "\n";
    os << "  lerch   = " << a.value.to_string(30) << "\n";
    os << "  oracle  = " << b.value.to_string(30) << "  " << (agree ? "agree" : "DISAGREE") << "\n";
    if (dec.g == 1 && (dec.d_E == 3 || dec.d_E == 4)) {
      Ball cs = chowla_selberg_log_derivative(static_cast<unsigned>(dec.d_E.get_ui()), prec);
      const bool ok = cs.overlaps(a.log_derivative);
      r["chowla_selberg_log_derivative"] = ball_json(cs);
      r["chowla_selberg_agree"] = ok;
      if (!ok) out.cert.failures.push_back("closed form disagrees");
      os << "  closed form L'/L = " << cs.to_string(30) << "  " << (ok ? "agree" : "DISAGREE") << "\n";
    }
    out.results = r;
    out.cert.final_precision = prec;
    out.text = os.str();
    return 0;
  });
  return out;
}

CommandResult verify_thm1(const Thm1Target& target, const std::string& variant, const RunConfig& cfg) {
  std::vector<Variant> variants;
  if (variant == "A" || variant == "both") variants.push_back(Variant::A);
  if (variant == "B" || variant == "both") variants.push_back(Variant::B);
  if (variants.empty()) throw DomainError("variant must be A, B or both");

  CommandResult out;
  CalcContext ctx;
  std::vector<Mask> phis;
  std::optional<FieldData> d;
  std::optional<FieldDiscs> fd;
  if (target.symbolic_g) {
    ctx = CalcContext::symbolic(*target.symbolic_g);
    for (int s = 1; s <= ctx.g; ++s) phis.push_back(symbolic_phi(ctx, s));
  } else if (target.field) {
    with_escalation(cfg, [&](Prec prec) {
      d = load_field(*target.field, prec);
      if (d->action) fd = field_discs(d->cm);
      out.cert.final_precision = prec;
      return 0;
    });
    ctx = CalcContext::from_cm(d->cm);
    phis = partial_types(d->cm, false);
  } else {
    throw DomainError("verify-thm1 needs --field or --symbolic");
  }

  json items = json::array();
  std::ostringstream os;
  os << "height identity replay over " << ctx.label << "\n";
  if (d && fd) {
    LogRelationReport lr = log_relation_check(d->cm, *d->action, *fd, 0);
    out.cert.note_bound(bound_of(lr.residual));
    if (!lr.pass) out.cert.failures.push_back("averaged log relation");
    out.results["averaged_log_relation_pass"] = lr.pass;
  } else if (d) {
    out.cert.unverified.push_back("discriminant relations not checked numerically: " + d->galois_note);
  }
  for (Mask phi : phis) {
    json j;
    j["phi"] = d ? format_type(d->cm, phi) : format_mask(phi);
    std::vector<std::string> empty_variants;
    for (Variant v : variants) {
      Theorem1Result res = verify_theorem1(ctx, phi, v);
      json t = json::array();
      for (const auto& s : res.transcript)
        t.push_back({{"rule", s.rule}, {"matched", s.matched}, {"before", s.before}, {"after", s.after}});
      json rel = json::array();
      for (const auto& e : res.derived_relations) rel.push_back(e.to_string());
      j["variant_" + to_string(v)] = {{"residual", res.residual.to_string()},
                                      {"empty", res.verified()},
                                      {"transcript", t},
                                      {"derived_relations", rel}};
      if (res.verified()) empty_variants.push_back(to_string(v));
      os << "  phi " << j["phi"].get<std::string>() << "  variant " << to_string(v) << ": residual "
         << res.residual.to_string() << "\n";
    }
    if (d && fd) {
      LogRelationReport lr = log_relation_check(d->cm, *d->action, *fd, phi);
      j["log_relation_pass"] = lr.pass;
      out.cert.note_bound(bound_of(lr.residual));
      if (!lr.pass) out.cert.failures.push_back("log relation " + j["phi"].get<std::string>());
    }
    j["consistent_variants"] = empty_variants;
    items.push_back(j);
  }
  out.results["context"] = ctx.label;
  out.results["g"] = ctx.g;
  out.results["items"] = items;
  out.text = os.str();
  return out;
}

std::vector<ScanRow> scan_cyclotomic_rows(unsigned max_f, const RunConfig& cfg) {
  if (max_f > 100) throw DomainError("scan is limited to conductors up to 100");
  std::vector<unsigned> fs;
  for (unsigned f = 3; f <= max_f; ++f)
    if (f % 4 != 2) fs.push_back(f);
  std::vector<std::future<ScanRow>> jobs;
  for (unsigned f : fs) {
    jobs.push_back(std::async(std::launch::async, [f, &cfg] {
      ScanRow row;
      row.f = f;
      try {
        with_escalation(cfg, [&](Prec prec) {
          CMStructure cm = cm_structure(cyclotomic_field(f), prec);
          FieldDiscs fd = field_discs(cm);
          row.degree = cm.degree();
          row.d_E = fd.d_E;
          row.d_F = fd.d_F;
          row.d_rel = fd.d_rel;
          std::vector<Mask> phis;
          for (const auto& [a, b] : cm.pairs) phis.push_back(Mask{1} << a);
          phis.push_back(enumerate_full_types(cm).front().mask);
          row.identity_pass = true;
          row.identity_bound = 0;
          for (Mask m : phis) {
            IdentityReport ir = grand_identity_check(cm, m);
            row.identity_bound = std::max(row.identity_bound, ir.bound);
            row.identity_pass = row.identity_pass && ir.pass;
          }
          AveragedHeight ah = averaged_faltings(decompose_extension_character(f, {}), prec);
          row.avg_height = ah.value;
          row.ratio = ah.value / log(Ball::from_mpz(fd.d_E, prec));
          return 0;
        });
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return row;
    }));
  }
  std::vector<ScanRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "f,degree,d_E,d_F,d_rel,avg_height,avg_height_radius,identity_bound,identity_pass,ratio,error\n";
  for (const auto& r : rows) {
    os << r.f << "," << r.degree << ",";
    if (!r.error.empty()) {
      os << ",,,,,,,,\"" << r.error << "\"\n";
      continue;
    }
    json a = ball_json(r.avg_height);
    json q = ball_json(r.ratio);
    os << r.d_E.get_str() << "," << r.d_F.get_str() << "," << r.d_rel.get_str() << ","
       << a["mid"].get<std::string>() << "," << a["radius"].get<std::string>() << "," << r.identity_bound << ","
       << (r.identity_pass ? "true" : "false") << "," << q["mid"].get<std::string>() << ",\n";
  }
  return os.str();
}

CommandResult scan_cyclotomic(unsigned max_f, const RunConfig& cfg) {
  CommandResult out;
  std::vector<ScanRow> rows = scan_cyclotomic_rows(max_f, cfg);
  json arr = json::array();
  std::optional<Ball> max_ratio;
  unsigned argmax = 0;
  bool finite = true;
  for (const auto& r : rows) {
    json j;
    j["f"] = r.f;
    if (!r.error.empty()) {
      j["error"] = r.error;
      out.cert.failures.push_back("f=" + std::to_string(r.f) + ": " + r.error);
      arr.push_back(j);
      continue;
    }
    j["degree"] = r.degree;
    j["d_E"] = exact_json(r.d_E);
    j["d_F"] = exact_json(r.d_F);
    j["d_rel"] = exact_json(r.d_rel);
    j["avg_height"] = ball_json(r.avg_height);
    j["identity_bound"] = r.identity_bound;
    j["identity_pass"] = r.identity_pass;
    j["ratio"] = ball_json(r.ratio);
    out.cert.note_bound(r.identity_bound);
    if (!r.identity_pass) out.cert.failures.push_back("grand identity f=" + std::to_string(r.f));
    const double q = r.ratio.mid_double();
    if (!std::isfinite(q) || !std::isfinite(r.ratio.rad_double())) finite = false;
    if (!max_ratio || q > max_ratio->mid_double()) {
      max_ratio = r.ratio;
      argmax = r.f;
    }
    arr.push_back(j);
  }
  out.results["family"] = "cyclotomic";
  out.results["max_f"] = max_f;
  out.results["rows"] = arr;
  out.results["ratios_finite"] = finite;
  if (max_ratio) {
    out.results["max_ratio"] = ball_json(*max_ratio);
    out.results["max_ratio_f"] = argmax;
  } else {
    out.results["max_ratio"] = nullptr;
  }
  if (!finite) out.cert.failures.push_back("non-finite ratio");
  out.cert.final_precision = cfg.precision_bits;
  out.text = scan_csv(rows);
  return out;
}

}  // namespace cmh
