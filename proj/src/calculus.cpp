#include "cmh/calculus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cmh/errors.hpp"

namespace cmh {

std::string format_mask(Mask m) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 0; i < kMaxDegree; ++i) {
    if (!mask_has(m, i)) continue;
    if (!first) os << ",";
    os << i + 1;
    first = false;
  }
  os << "}";
  return os.str();
}

namespace {

mpq_class pow2(long e) {
  mpq_class out(1);
  if (e >= 0)
    mpz_mul_2exp(out.get_num_mpz_t(), out.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpz_mul_2exp(out.get_den_mpz_t(), out.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return out;
}

}  // namespace

std::string Symbol::to_string() const {
  switch (kind) {
    case SymKind::Height: return "HEIGHT(P)";
    case SymKind::H: return "H(" + format_mask(mask) + ")";
    case SymKind::HTau: return "HTAU(" + format_mask(mask) + "," + std::to_string(tau + 1) + ")";
    case SymKind::HNB: return "HNB";
    case SymKind::LogF: return "LOG(d_F)";
    case SymKind::LogB: return "LOG(d_B)";
    case SymKind::LogEF: return "LOG(d_E/F)";
    case SymKind::NlogEFS: return "NLOG(d_E/F,Sigma)";
    case SymKind::Nlog: return "NLOG(" + format_mask(mask) + ")";
  }
  return "?";
}

CalcContext CalcContext::from_cm(const CMStructure& cm) {
  CalcContext ctx;
  ctx.label = cm.field.label;
  ctx.g = cm.g;
  ctx.partner = cm.partner;
  ctx.pairs = cm.pairs;
  return ctx;
}

CalcContext CalcContext::symbolic(int g) {
  if (g < 1 || 2 * g > kMaxDegree) throw DomainError("symbolic genus out of range");
  CalcContext ctx;
  ctx.label = "symbolic g=" + std::to_string(g);
  ctx.g = g;
  ctx.partner.resize(static_cast<size_t>(2 * g));
  for (int i = 0; i < g; ++i) {
    ctx.partner[static_cast<size_t>(i)] = i + g;
    ctx.partner[static_cast<size_t>(i + g)] = i;
    ctx.pairs.emplace_back(i, i + g);
  }
  return ctx;
}

Mask CalcContext::conj(Mask m) const {
  Mask out = 0;
  for (int i = 0; i < degree(); ++i)
    if (mask_has(m, i)) out |= Mask{1} << partner[static_cast<size_t>(i)];
  return out;
}

bool CalcContext::is_full(Mask m) const {
  if ((m & ~full_mask(degree())) != 0) return false;
  return (m & conj(m)) == 0 && mask_size(m) == g;
}

std::vector<Mask> CalcContext::complements(Mask phi) const {
  std::vector<std::pair<int, int>> free;
  for (const auto& p : pairs)
    if (!mask_has(phi, p.first) && !mask_has(phi, p.second)) free.push_back(p);
  const size_t k = free.size();
  std::vector<Mask> out;
  out.reserve(size_t{1} << k);
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << k); ++c) {
    Mask m = 0;
    for (size_t j = 0; j < k; ++j) {
      const bool second = ((c >> (k - 1 - j)) & 1U) != 0;
      m |= Mask{1} << (second ? free[j].second : free[j].first);
    }
    out.push_back(m);
  }
  return out;
}

std::vector<Mask> CalcContext::full_types() const { return complements(0); }

HeightExpr HeightExpr::term(const Symbol& s, const mpq_class& c, std::string context) {
  HeightExpr e(std::move(context));
  e.add(s, c);
  return e;
}

void HeightExpr::add(const Symbol& s, const mpq_class& coeff) {
  mpq_class c = coeff;
  c.canonicalize();
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(s, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

void HeightExpr::merge_context(const HeightExpr& o) {
  if (o.context_.empty()) return;
  if (context_.empty()) {
    context_ = o.context_;
    return;
  }
  if (context_ != o.context_) throw DomainError("cannot combine expressions over " + context_ + " and " + o.context_);
}

HeightExpr& HeightExpr::operator+=(const HeightExpr& o) {
  merge_context(o);
  for (const auto& [s, c] : o.terms_) add(s, c);
  return *this;
}

HeightExpr& HeightExpr::operator-=(const HeightExpr& o) {
  merge_context(o);
  for (const auto& [s, c] : o.terms_) add(s, -c);
  return *this;
}

HeightExpr& HeightExpr::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& kv : terms_) kv.second *= c;
  return *this;
}

mpq_class HeightExpr::coeff(const Symbol& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

std::string HeightExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [s, c] : terms_) {
    mpq_class a = abs(c);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    if (a != 1) os << a.get_str() << "*";
    os << s.to_string();
    first = false;
  }
  return os.str();
}

namespace {

class Rewriter {
 public:
  Rewriter(const CalcContext& ctx, std::vector<TranscriptStep>* transcript) : ctx_(ctx), transcript_(transcript) {}

  template <typename F>
  HeightExpr rewrite(const std::string& rule, const HeightExpr& e, F&& f) {
    HeightExpr out(e.context());
    size_t matched = 0;
    for (const auto& [s, c] : e.terms()) {
      HeightExpr img(e.context());
      if (f(s, img)) {
        ++matched;
        img *= c;
        out += img;
      } else {
        out.add(s, c);
      }
    }
    if (transcript_) transcript_->push_back({rule, matched, e.size(), out.size()});
    return out;
  }

  // H(Phi) -> sum_tau HTAU(Phi, tau) - (NLOG Phi + NLOG conj Phi) / 4
  HeightExpr r3(const HeightExpr& e) {
    return rewrite("R3", e, [&](const Symbol& s, HeightExpr& img) {
      if (s.kind != SymKind::H) return false;
      if (!ctx_.is_full(s.mask)) throw DomainError("H(" + format_mask(s.mask) + ") is not a full CM-type");
      for (int t = 0; t < ctx_.degree(); ++t)
        if (mask_has(s.mask, t)) img.add(Symbol::htau(s.mask, t), 1);
      img.add(Symbol::nlog(s.mask), mpq_class(-1, 4));
      img.add(Symbol::nlog(ctx_.conj(s.mask)), mpq_class(-1, 4));
      return true;
    });
  }

  HeightExpr r0(const HeightExpr& e) {
    return rewrite("R0", e, [&](const Symbol& s, HeightExpr&) {
      return s.kind == SymKind::Nlog && mask_size(s.mask) <= 1;
    });
  }

  Symbol canonical(const Symbol& s) const {
    switch (s.kind) {
      case SymKind::H:
      case SymKind::Nlog: {
        const Mask c = ctx_.conj(s.mask);
        return c < s.mask ? Symbol{s.kind, c, -1} : s;
      }
      case SymKind::HTau: {
        const Mask c = ctx_.conj(s.mask);
        return c < s.mask ? Symbol::htau(c, ctx_.partner[static_cast<size_t>(s.tau)]) : s;
      }
      default: return s;
    }
  }

  HeightExpr r1(const HeightExpr& e) {
    return rewrite("R1", e, [&](const Symbol& s, HeightExpr& img) {
      Symbol c = canonical(s);
      if (c == s) return false;
      img.add(c, 1);
      return true;
    });
  }

  // Partner of (Phi, tau) under the nearby relation, in canonical form.
  Symbol nearby_partner(const Symbol& s) const {
    const int tb = ctx_.partner[static_cast<size_t>(s.tau)];
    const Mask flipped = (s.mask & ~(Mask{1} << s.tau)) | (Mask{1} << tb);
    return canonical(Symbol::htau(flipped, tb));
  }

  HeightExpr r2(const HeightExpr& e) {
    return rewrite("R2", e, [&](const Symbol& s, HeightExpr& img) {
      if (s.kind != SymKind::HTau) return false;
      const Symbol p = nearby_partner(s);
      if (p == s) {
        img.add(Symbol::hnb(), mpq_class(1, 2));
        return true;
      }
      if (s < p) return false;
      img.add(Symbol::hnb(), 1);
      img.add(p, -1);
      return true;
    });
  }

  HeightExpr normalize_logs(const HeightExpr& e) {
    auto* saved = transcript_;
    transcript_ = nullptr;
    HeightExpr out = r1(r0(e));
    transcript_ = saved;
    return out;
  }

  void add_relation(const HeightExpr& rel) {
    HeightExpr r = normalize_logs(rel);
    for (const auto& [p, row] : rows_) {
      const mpq_class c = r.coeff(p);
      if (c != 0) r -= c * row;
    }
    if (r.empty()) return;
    std::optional<Symbol> pivot;
    for (const auto& [s, c] : r.terms())
      if (s.kind == SymKind::Nlog && ctx_.is_full(s.mask)) {
        pivot = s;
        break;
      }
    if (!pivot && r.coeff(Symbol::nlog_efs()) != 0) pivot = Symbol::nlog_efs();
    if (!pivot) pivot = r.terms().begin()->first;
    r *= mpq_class(1) / r.coeff(*pivot);
    rows_.emplace_back(*pivot, r);
  }

  HeightExpr reduce_logs(const std::string& rule, const HeightExpr& e) {
    HeightExpr out = e;
    size_t matched = 0;
    for (const auto& [p, row] : rows_) {
      const mpq_class c = out.coeff(p);
      if (c == 0) continue;
      ++matched;
      out -= c * row;
    }
    if (transcript_) transcript_->push_back({rule, matched, e.size(), out.size()});
    return out;
  }

 private:
  const CalcContext& ctx_;
  std::vector<TranscriptStep>* transcript_;
  std::vector<std::pair<Symbol, HeightExpr>> rows_;
};

}  // namespace

HeightExpr log_relation(const CalcContext& ctx, Mask phi) {
  const int k = ctx.g - mask_size(phi);
  const Mask phibar = ctx.conj(phi);
  HeightExpr r(ctx.label);
  const mpq_class w = pow2(-k - 2);
  for (Mask comp : ctx.complements(phi)) {
    const Mask full = phi | comp;
    r.add(Symbol::nlog(full), w);
    r.add(Symbol::nlog(ctx.conj(full)), w);
  }
  r.add(Symbol::log_f(), mpq_class(-1, 4));
  if (phi != 0) {
    r.add(Symbol::nlog_efs(), mpq_class(-1, 8));
    r.add(Symbol::nlog(phi | phibar), mpq_class(1, 8));
    r.add(Symbol::nlog(phi), mpq_class(-1, 4));
    r.add(Symbol::nlog(phibar), mpq_class(-1, 4));
  }
  return r;
}

HeightExpr apply_rules(const HeightExpr& e, const CalcContext& ctx, const RuleSet& rules,
                       std::vector<TranscriptStep>* transcript) {
  Rewriter rw(ctx, transcript);
  HeightExpr out = e;
  if (rules.r3) out = rw.r3(out);
  out = rw.r0(out);
  if (rules.r1) out = rw.r1(out);
  if (rules.r2) out = rw.r2(out);
  if (rules.phi) rw.add_relation(log_relation(ctx, *rules.phi));
  if (rules.r4) rw.add_relation(log_relation(ctx, 0));
  if (rules.phi || rules.r4) out = rw.reduce_logs(rules.phi ? "R4+G" : "R4", out);
  return out;
}

HeightExpr heightp_instance(const CalcContext& ctx, Mask phi, Mask phi2) {
  HeightExpr e(ctx.label);
  const Mask phibar = ctx.conj(phi);
  for (int t = 0; t < ctx.degree(); ++t) {
    if (!mask_has(phi, t)) continue;
    e.add(Symbol::htau(phi | phi2, t), 1);
    e.add(Symbol::htau(phibar | phi2, ctx.partner[static_cast<size_t>(t)]), 1);
  }
  const mpq_class w(1, 2 * ctx.g);
  e.add(Symbol::log_b(), w);
  e.add(Symbol::nlog(phi | phibar), w);
  return e;
}

std::string to_string(Variant v) { return v == Variant::A ? "A" : "B"; }

Mask symbolic_phi(const CalcContext& ctx, int s) {
  if (s < 0 || s > ctx.g) throw DomainError("phi size out of range");
  Mask m = 0;
  for (int j = 0; j < s; ++j) m |= Mask{1} << ctx.pairs[static_cast<size_t>(j)].first;
  return m;
}

Theorem1Result verify_theorem1(const CalcContext& ctx, Mask phi, Variant variant,
                               const std::vector<size_t>* complement_order) {
  if ((phi & ~full_mask(ctx.degree())) != 0 || (phi & ctx.conj(phi)) != 0)
    throw DomainError("phi must be a partial CM-type");
  Theorem1Result res;
  res.variant = variant;
  res.phi = phi;
  res.g = ctx.g;
  const int g = ctx.g;
  const int k = g - mask_size(phi);
  const Mask phibar = ctx.conj(phi);
  const Mask sigma = phi | phibar;
  const auto comps = ctx.complements(phi);

  std::vector<size_t> order(comps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (complement_order) {
    std::vector<size_t> check = *complement_order;
    std::sort(check.begin(), check.end());
    if (check != order) throw DomainError("complement order is not a permutation");
    order = *complement_order;
  }

  res.lhs = HeightExpr(ctx.label);
  for (size_t i : order) res.lhs += heightp_instance(ctx, phi, comps[i]);

  HeightExpr thm(ctx.label);
  for (Mask comp : comps) thm.add(Symbol::h(phi | comp), pow2(-k));
  if (k > 0) {
    const mpq_class w = mpq_class(-k) * pow2(-g) / g;
    for (Mask full : ctx.full_types()) thm.add(Symbol::h(full), w);
  }
  if (phi != 0) thm.add(Symbol::nlog_efs(), mpq_class(1, 8));
  thm.add(Symbol::nlog(sigma), mpq_class(-1, 8));
  thm.add(Symbol::nlog(phi), mpq_class(1, 4));
  thm.add(Symbol::nlog(phibar), mpq_class(1, 4));
  thm.add(Symbol::log_b(), mpq_class(1, 4 * g));
  if (variant == Variant::A) thm.add(Symbol::nlog(sigma), mpq_class(1, 4 * g));
  thm.add(Symbol::log_f(), mpq_class(g - k, 4 * g));
  res.rhs = pow2(k + 1) * thm;

  RuleSet rules;
  rules.phi = phi;
  res.residual = apply_rules(res.lhs - res.rhs, ctx, rules, &res.transcript);
  res.residual *= pow2(-k - 1);

  const size_t max_relations = 64;
  if (comps.size() > 1) {
    const HeightExpr base = heightp_instance(ctx, phi, comps[order[0]]);
    for (size_t j = 1; j < order.size() && res.derived_relations.size() < max_relations; ++j) {
      HeightExpr d = heightp_instance(ctx, phi, comps[order[j]]) - base;
      res.derived_relations.push_back(apply_rules(d, ctx, rules));
    }
  }
  return res;
}

EvalResult evaluate(const HeightExpr& e, const CalcContext& ctx, const std::map<Symbol, Ball>& bindings,
                    const std::optional<Ball>& averaged_height, Prec prec, bool partial) {
  EvalResult out{Ball(prec), HeightExpr(e.context())};
  HeightExpr rest(e.context());
  if (averaged_height) {
    std::map<Mask, mpq_class> hs;
    for (const auto& [s, c] : e.terms()) {
      if (s.kind == SymKind::H) {
        hs[std::min(s.mask, ctx.conj(s.mask))] += c;
      } else {
        rest.add(s, c);
      }
    }
    std::set<Mask> reps;
    for (Mask m : ctx.full_types()) reps.insert(std::min(m, ctx.conj(m)));
    bool uniform = !hs.empty() && hs.size() == reps.size();
    if (uniform) {
      const mpq_class c = hs.begin()->second;
      for (const auto& [m, v] : hs)
        if (!reps.count(m) || v != c) uniform = false;
      if (uniform) out.value += Ball::from_mpq(c * pow2(ctx.g - 1), prec) * *averaged_height;
    }
    if (!uniform)
      for (const auto& [s, c] : e.terms())
        if (s.kind == SymKind::H) rest.add(s, c);
  } else {
    rest = e;
  }
  for (const auto& [s, c] : rest.terms()) {
    auto it = bindings.find(s);
    if (it == bindings.end()) {
      out.remainder.add(s, c);
      continue;
    }
    out.value += Ball::from_mpq(c, prec) * it->second;
  }
  if (!partial && !out.remainder.empty()) {
    std::string names;
    for (const auto& [s, c] : out.remainder.terms()) names += (names.empty() ? "" : ", ") + s.to_string();
    throw DomainError("unbound symbols: " + names);
  }
  return out;
}

std::map<Symbol, Ball> log_bindings(const HeightExpr& e, const CMStructure& cm, const GaloisAction& action,
                                    const FieldDiscs& discs, Mask phi, const mpz_class& d_b) {
  const Prec prec = cm.embeddings.roots[0].prec();
  auto log_z = [&](const mpz_class& v) { return log(Ball::from_mpz(abs(v), prec)); };
  std::map<Symbol, Ball> out;
  for (const auto& [s, c] : e.terms()) {
    switch (s.kind) {
      case SymKind::LogF: out.emplace(s, log_z(discs.d_F)); break;
      case SymKind::LogB: out.emplace(s, log_z(d_b)); break;
      case SymKind::LogEF:
        out.emplace(s, log_z(discs.d_rel.get_num()) - log_z(discs.d_rel.get_den()));
        break;
      case SymKind::NlogEFS: {
        if (phi == 0) {
          out.emplace(s, Ball(prec));
          break;
        }
        auto rr = reflex_rel_disc(cm, action, phi, discs);
        out.emplace(s, log_z(rr.value) / Ball::from_si(rr.orbit_size, prec));
        break;
      }
      case SymKind::Nlog: {
        if (mask_size(s.mask) <= 1) {
          out.emplace(s, Ball(prec));
          break;
        }
        auto sd = subset_disc(cm, s.mask, &action);
        out.emplace(s, log_z(*sd.norm_to_Q) / Ball::from_si(sd.reflex_degree, prec));
        break;
      }
      default: break;
    }
  }
  return out;
}

}  // namespace cmh
