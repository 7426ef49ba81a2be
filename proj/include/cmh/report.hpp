// Command implementations shared by the CLI and the tests: each returns a
// JSON payload plus a certification summary.
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "cmh/calculus.hpp"
#include "cmh/errors.hpp"
#include "cmh/lfun.hpp"

namespace cmh {

using json = nlohmann::ordered_json;

enum class OutputFormat { Text, Json, Csv };

struct RunConfig {
  Prec precision_bits = 256;
  Prec escalation_cap = 16384;
  OutputFormat output = OutputFormat::Text;
  bool timing = false;

  /// Throws DomainError unless 64 <= precision_bits <= escalation_cap.
  void validate() const;
  json to_json() const;
};

struct Certification {
  double max_bound = 0;
  std::vector<std::string> unverified;
  std::vector<std::string> failures;
  Prec final_precision = 0;

  bool ok() const { return failures.empty(); }
  void note_bound(double b);
  json to_json() const;
};

struct CommandResult {
  json results;
  Certification cert;
  /// Plain-text rendering for the default output format.
  std::string text;
};

/// Runs f(prec) doubling prec on PrecisionError until the cap is exceeded.
template <typename F>
auto with_escalation(const RunConfig& cfg, F&& f) -> decltype(f(Prec{})) {
  Prec prec = cfg.precision_bits;
  for (;;) {
    try {
      return f(prec);
    } catch (const PrecisionError&) {
      if (prec * 2 > cfg.escalation_cap) throw;
      prec *= 2;
    }
  }
}

json ball_json(const Ball& b);
json cball_json(const CBall& z);
json exact_json(const mpz_class& v);
json exact_json(const mpq_class& v);

/// All partial CM-types by size then mask; the empty type only if requested.
std::vector<Mask> partial_types(const CMStructure& cm, bool include_empty);

CommandResult field_info(const std::string& spec, const RunConfig& cfg);
CommandResult cm_types(const std::string& spec, const RunConfig& cfg);
CommandResult disc_subset(const std::string& spec, const std::string& subset, const RunConfig& cfg);
/// `phi` empty with all=false means every singleton type.
CommandResult identity_grand(const std::string& spec, const std::optional<std::string>& phi, bool all,
                             const RunConfig& cfg);
CommandResult lfun_values(unsigned f, const std::vector<unsigned>& subgroup, const RunConfig& cfg);
CommandResult avg_height(const std::string& spec, const RunConfig& cfg);

struct Thm1Target {
  std::optional<std::string> field;
  std::optional<int> symbolic_g;
};
CommandResult verify_thm1(const Thm1Target& target, const std::string& variant, const RunConfig& cfg);

struct ScanRow {
  unsigned f = 0;
  int degree = 0;
  mpz_class d_E, d_F;
  mpq_class d_rel;
  Ball avg_height;
  double identity_bound = 0;
  bool identity_pass = false;
  Ball ratio;
  std::string error;
};

std::vector<ScanRow> scan_cyclotomic_rows(unsigned max_f, const RunConfig& cfg);
CommandResult scan_cyclotomic(unsigned max_f, const RunConfig& cfg);
std::string scan_csv(const std::vector<ScanRow>& rows);

/// Decomposition of an abelian CM field given as cyclotomic:f or an
/// imaginary quadratic polynomial.
ExtensionDecomposition abelian_decomposition(const NumberField& field, Prec prec);

}  // namespace cmh
