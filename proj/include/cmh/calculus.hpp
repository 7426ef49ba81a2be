// Formal height expressions and the rewrite rules relating Faltings heights
// of CM-types, their components, and the quaternionic height.
#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmh/cmtypes.hpp"
#include "cmh/disc.hpp"

namespace cmh {

enum class SymKind {
  Height,   // HEIGHT(P)
  H,        // H(Phi)
  HTau,     // HTAU(Phi, tau)
  HNB,      // h_nb
  LogF,     // log d_F
  LogB,     // log d_B
  LogEF,    // log d_{E/F}
  NlogEFS,  // log d_{E/F,Sigma} / [E_Sigma : Q]
  Nlog,     // log d_Psi / [E_Psi : Q]
};

struct Symbol {
  SymKind kind = SymKind::HNB;
  Mask mask = 0;
  int tau = -1;

  auto operator<=>(const Symbol&) const = default;

  static Symbol height() { return {SymKind::Height, 0, -1}; }
  static Symbol h(Mask m) { return {SymKind::H, m, -1}; }
  static Symbol htau(Mask m, int t) { return {SymKind::HTau, m, t}; }
  static Symbol hnb() { return {SymKind::HNB, 0, -1}; }
  static Symbol log_f() { return {SymKind::LogF, 0, -1}; }
  static Symbol log_b() { return {SymKind::LogB, 0, -1}; }
  static Symbol log_ef() { return {SymKind::LogEF, 0, -1}; }
  static Symbol nlog_efs() { return {SymKind::NlogEFS, 0, -1}; }
  static Symbol nlog(Mask m) { return {SymKind::Nlog, m, -1}; }

  bool is_log() const { return kind >= SymKind::LogF; }
  std::string to_string() const;
};

/// "{1,3}" with sorted 1-based indices.
std::string format_mask(Mask m);

/// Embedding combinatorics needed by the rules: either taken from a CM
/// structure or the symbolic model with pairs (i, i+g).
struct CalcContext {
  std::string label;
  int g = 0;
  std::vector<int> partner;
  std::vector<std::pair<int, int>> pairs;

  static CalcContext from_cm(const CMStructure& cm);
  static CalcContext symbolic(int g);

  int degree() const { return 2 * g; }
  Mask conj(Mask m) const;
  bool is_full(Mask m) const;
  /// Full types in binary-counter order (pair 0 most significant).
  std::vector<Mask> full_types() const;
  /// Complements of phi in the same order convention.
  std::vector<Mask> complements(Mask phi) const;
};

/// Rational linear combination of symbols; zero coefficients never stored.
class HeightExpr {
 public:
  HeightExpr() = default;
  explicit HeightExpr(std::string context) : context_(std::move(context)) {}

  static HeightExpr term(const Symbol& s, const mpq_class& c, std::string context = {});

  void add(const Symbol& s, const mpq_class& c);
  HeightExpr& operator+=(const HeightExpr& o);
  HeightExpr& operator-=(const HeightExpr& o);
  HeightExpr& operator*=(const mpq_class& c);
  friend HeightExpr operator+(HeightExpr a, const HeightExpr& b) { return a += b; }
  friend HeightExpr operator-(HeightExpr a, const HeightExpr& b) { return a -= b; }
  friend HeightExpr operator*(const mpq_class& c, HeightExpr a) { return a *= c; }
  friend bool operator==(const HeightExpr& a, const HeightExpr& b) { return a.terms_ == b.terms_; }

  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  mpq_class coeff(const Symbol& s) const;
  const std::map<Symbol, mpq_class>& terms() const { return terms_; }
  const std::string& context() const { return context_; }
  std::string to_string() const;

 private:
  void merge_context(const HeightExpr& o);
  std::string context_;
  std::map<Symbol, mpq_class> terms_;
};

struct TranscriptStep {
  std::string rule;
  size_t matched = 0;
  size_t before = 0;
  size_t after = 0;
};

/// Optional relations among LOG atoms: the averaged relation is always
/// available; the phi-relation is added when `phi` is set.
struct RuleSet {
  bool r1 = true;
  bool r2 = true;
  bool r3 = true;
  bool r4 = true;
  std::optional<Mask> phi;
};

/// Normal form: R0 (trivial NLOG), R3 unfolding of H into components, R1
/// conjugate representatives, R2 nearby substitution, then reduction of LOG
/// atoms modulo the discriminant relations.
HeightExpr apply_rules(const HeightExpr& e, const CalcContext& ctx, const RuleSet& rules,
                       std::vector<TranscriptStep>* transcript = nullptr);

/// Right side of one heightP instance for the complement phi2.
HeightExpr heightp_instance(const CalcContext& ctx, Mask phi, Mask phi2);

/// The discriminant relation 2^{-k} sum_{Phi > phi} (NLOG Phi + NLOG conj Phi)/4 - (...) = 0.
HeightExpr log_relation(const CalcContext& ctx, Mask phi);

enum class Variant { A, B };
std::string to_string(Variant v);

struct Theorem1Result {
  Variant variant = Variant::A;
  Mask phi = 0;
  int g = 0;
  HeightExpr lhs;
  HeightExpr rhs;
  /// (lhs - rhs) / 2^{k+1} in normal form, on the scale of h(P)/2.
  HeightExpr residual;
  std::vector<TranscriptStep> transcript;
  /// Normal forms of pairwise differences of heightP instances (no truth claim).
  std::vector<HeightExpr> derived_relations;

  bool verified() const { return residual.empty(); }
};

/// `complement_order`, when given, permutes the order in which heightP
/// instances are summed.
Theorem1Result verify_theorem1(const CalcContext& ctx, Mask phi, Variant variant,
                               const std::vector<size_t>* complement_order = nullptr);

/// Symbolic model phi: the first s pairs' first embeddings.
Mask symbolic_phi(const CalcContext& ctx, int s);

struct EvalResult {
  Ball value;
  HeightExpr remainder;
};

/// Evaluates the bound symbols. If `averaged_height` is set, a combination
/// c * sum_Phi H(Phi) over all full types is replaced by c 2^g times it.
/// Throws DomainError listing unbound symbols unless `partial` is set.
EvalResult evaluate(const HeightExpr& e, const CalcContext& ctx, const std::map<Symbol, Ball>& bindings,
                    const std::optional<Ball>& averaged_height, Prec prec, bool partial = false);

/// Numeric values of every LOG atom in `e` (Galois E), with d_B supplied.
std::map<Symbol, Ball> log_bindings(const HeightExpr& e, const CMStructure& cm, const GaloisAction& action,
                                    const FieldDiscs& discs, Mask phi, const mpz_class& d_b);

}  // namespace cmh
