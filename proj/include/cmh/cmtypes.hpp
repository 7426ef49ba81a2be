// CM structures, CM-types as embedding bitmasks, and the Galois action on
// embeddings.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmh/numfield.hpp"

namespace cmh {

/// Subset of embedding indices; bit i is embedding i (0-based).
using Mask = std::uint64_t;

inline constexpr int kMaxDegree = 64;

inline int mask_size(Mask m) { return __builtin_popcountll(m); }
inline bool mask_has(Mask m, int i) { return ((m >> i) & 1U) != 0; }
inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

struct CMStructure {
  NumberField field;
  EmbeddingSet embeddings;
  /// partner[i] is the conjugate embedding of i.
  std::vector<int> partner;
  /// Conjugate pairs (i, partner[i]) with i < partner[i], sorted by i.
  std::vector<std::pair<int, int>> pairs;
  int g = 0;
  ZPoly totally_real_poly;
  /// Which symmetric function of (tau(pi), conj tau(pi)) produced totally_real_poly.
  std::string totally_real_generator;

  int degree() const { return field.degree; }
  /// Index of the pair containing embedding i.
  int pair_of(int i) const;
};

/// Throws NotCMError if E has a real embedding or complex conjugation is not
/// induced by an automorphism of E.
CMStructure cm_structure(const NumberField& field, Prec precision_bits);

enum class TypeClass { Full, Partial, Invalid };

std::string to_string(TypeClass c);

struct CMType {
  Mask mask = 0;
  TypeClass cls = TypeClass::Invalid;
};

TypeClass classify(const CMStructure& cm, Mask mask);
CMType make_type(const CMStructure& cm, Mask mask);
Mask conjugate_mask(const CMStructure& cm, Mask mask);
/// Union of the pairs met by `mask`, i.e. phi together with its conjugate.
Mask pair_closure(const CMStructure& cm, Mask mask);

/// All 2^g full types. Pair 0 is the most significant digit of the binary
/// counter; digit 0 picks the first embedding of a pair, 1 the second.
std::vector<CMType> enumerate_full_types(const CMStructure& cm);

/// All phi' on the pairs untouched by phi such that phi + phi' is full.
std::vector<CMType> complements(const CMStructure& cm, Mask phi);

/// For full types differing in exactly one pair, the differing embeddings.
std::optional<std::pair<int, int>> nearby(const CMStructure& cm, Mask phi1, Mask phi2);

/// Text form "{1,2}" with 1-based indices listed in pair order.
std::string format_type(const CMStructure& cm, Mask mask);
/// Parses "{1,2}" (1-based, braces optional, "{}" is empty).
Mask parse_type(std::string_view text, int degree);

struct GaloisAction {
  /// perms[k][i] is the image of embedding i under the k-th automorphism.
  std::vector<std::vector<int>> perms;
  bool is_exact = false;
  /// How the action was obtained: "cyclotomic", "quadratic" or "root-matching".
  std::string method;

  size_t order() const { return perms.size(); }
};

/// Throws NotGaloisError if E/Q is not Galois, PrecisionError if the
/// automorphisms could not be certified at the working precision.
GaloisAction galois_action(const CMStructure& cm);

Mask apply_perm(const std::vector<int>& perm, Mask mask);
/// Distinct images of `mask`, in order of first appearance.
std::vector<Mask> orbit(const GaloisAction& action, Mask mask);
/// [E_Psi : Q] as the orbit size of Psi.
int reflex_degree(const GaloisAction& action, Mask psi);

}  // namespace cmh
