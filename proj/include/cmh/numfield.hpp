// Number fields given by a monic integer polynomial, and their certified
// complex embeddings.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmh/ball.hpp"
#include "cmh/zpoly.hpp"

namespace cmh {

struct NumberField {
  ZPoly defining_poly;
  int degree = 0;
  std::string label;
  /// Set when the field was built as Q(zeta_f).
  std::optional<unsigned> conductor;
};

/// Accepts "poly:<polynomial in x>" or "cyclotomic:<f>" with f >= 3.
NumberField parse_field(std::string_view spec);

/// Builds a field from a monic polynomial after checking irreducibility.
NumberField make_field(const ZPoly& poly, std::string label);

NumberField cyclotomic_field(unsigned f);

bool is_irreducible(const ZPoly& poly);

/// Certified roots of the defining polynomial, one per embedding.
///
/// Roots are ordered by argument in [0, 2pi), ties broken by modulus. Each
/// enclosure contains exactly one root, and the enclosures are pairwise
/// disjoint. Real roots carry an exact zero imaginary part.
struct EmbeddingSet {
  NumberField field;
  std::vector<CBall> roots;
  std::vector<bool> is_real;
  Prec precision_bits = 0;

  size_t size() const { return roots.size(); }
};

EmbeddingSet isolate_embeddings(const NumberField& field, Prec precision_bits);

/// Certified roots of a squarefree integer polynomial, same conventions as
/// isolate_embeddings.
std::vector<CBall> isolate_roots(const ZPoly& poly, Prec precision_bits, std::vector<bool>* is_real = nullptr);

/// The unique integer inside an enclosure of an integer-valued quantity.
/// Throws PrecisionError when the enclosure is too wide to decide and
/// NonIntegralError when a narrow enclosure contains no integer.
mpz_class recognize_integer(const CBall& value);
mpz_class recognize_integer(const Ball& value);

/// Coefficients (constant term first) of prod (x - r) over the given roots.
std::vector<CBall> poly_from_roots(const std::vector<CBall>& roots);

/// Integer polynomial whose coefficients are enclosed by `coeffs`.
ZPoly recognize_zpoly(const std::vector<CBall>& coeffs);

/// partner[i] is the index of the conjugate embedding; partner[i] == i only
/// for real roots.
std::vector<int> conjugation_pairing(const EmbeddingSet& emb);

}  // namespace cmh
