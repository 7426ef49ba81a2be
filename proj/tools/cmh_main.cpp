#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmh/report.hpp"

namespace {

using cmh::CommandResult;
using cmh::json;

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const cmh::ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const cmh::DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const cmh::PrecisionError*>(&e)) return "PrecisionError";
  if (dynamic_cast<const cmh::ReducibleError*>(&e)) return "ReducibleError";
  if (dynamic_cast<const cmh::NotCMError*>(&e)) return "NotCM";
  if (dynamic_cast<const cmh::NotGaloisError*>(&e)) return "NotGalois";
  if (dynamic_cast<const cmh::NonIntegralError*>(&e)) return "NonIntegral";
  return "Error";
}

std::vector<unsigned> parse_list(const std::string& text) {
  std::vector<unsigned> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<unsigned>(std::stoul(item)));
    } catch (const std::exception&) {
      throw cmh::ParseError("bad subgroup generator '" + item + "'");
    }
  }
  return out;
}

int parse_symbolic(const std::string& text) {
  const std::string prefix = "g=";
  std::string body = text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
  try {
    size_t used = 0;
    int g = std::stoi(body, &used);
    if (used != body.size()) throw std::invalid_argument(body);
    return g;
  } catch (const std::exception&) {
    throw cmh::ParseError("expected --symbolic g=<n>, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified computations with CM fields, discriminants, L-values and height identities"};
  app.require_subcommand(1);
  app.fallthrough();

  cmh::RunConfig cfg;
  if (const char* env = std::getenv("CMH_PREC")) {
    try {
      cfg.precision_bits = std::stol(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring invalid CMH_PREC='" << env << "'\n";
    }
  }
  long prec = cfg.precision_bits;
  long cap = cfg.escalation_cap;
  bool as_json = false;
  std::string out_path;
  app.add_option("--prec", prec, "working precision in bits")->capture_default_str();
  app.add_option("--cap", cap, "precision escalation cap in bits")->capture_default_str();
  app.add_flag("--json", as_json, "emit a JSON report");
  app.add_option("--out", out_path, "write the report to a file");
  app.add_flag("--timing", cfg.timing, "record wall time in the report");

  std::string spec, subset, phi, variant = "both", field_spec, symbolic;
  bool all = false;
  unsigned f = 0, max_f = 0;
  std::string subgroup;

  auto* field = app.add_subcommand("field", "number field queries");
  field->require_subcommand(1);
  auto* field_info = field->add_subcommand("info", "embeddings, conjugation, discriminants");
  field_info->add_option("spec", spec, "poly:<f(x)> or cyclotomic:<f>")->required();

  auto* cm = app.add_subcommand("cm", "CM-type queries");
  cm->require_subcommand(1);
  auto* cm_types = cm->add_subcommand("types", "enumerate full CM-types");
  cm_types->add_option("spec", spec)->required();

  auto* disc = app.add_subcommand("disc", "discriminant of a subset of embeddings");
  disc->add_option("spec", spec)->required();
  disc->add_option("--subset", subset, "1-based subset such as {1,2}")->required();

  auto* identity = app.add_subcommand("identity", "identity checks");
  identity->require_subcommand(1);
  auto* grand = identity->add_subcommand("grand", "grand discriminant identity");
  grand->add_option("spec", spec)->required();
  auto* phi_opt = grand->add_option("--phi", phi, "partial CM-type such as {1}");
  grand->add_flag("--all", all, "every nonempty partial CM-type")->excludes(phi_opt);

  auto* lfun = app.add_subcommand("lfun", "L-values of the characters of a CM subfield of Q(zeta_f)");
  lfun->add_option("f", f, "conductor")->required();
  lfun->add_option("--subgroup", subgroup, "comma-separated generators of H_E");

  auto* avg = app.add_subcommand("avg-height", "averaged Faltings height of an abelian CM field");
  avg->add_option("spec", spec)->required();

  auto* thm = app.add_subcommand("verify-thm1", "symbolic replay of the height identity");
  auto* thm_field = thm->add_option("--field", field_spec, "field spec");
  thm->add_option("--symbolic", symbolic, "g=<n>")->excludes(thm_field);
  thm->add_option("--variant", variant, "A, B or both")->check(CLI::IsMember({"A", "B", "both"}));

  auto* scan = app.add_subcommand("scan", "family scans");
  scan->require_subcommand(1);
  auto* scan_cyc = scan->add_subcommand("cyclotomic", "CM cyclotomic fields up to a conductor");
  scan_cyc->add_option("--max-f", max_f, "largest conductor (at most 100)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);
  cfg.precision_bits = prec;
  cfg.escalation_cap = cap;
  if (as_json) cfg.output = cmh::OutputFormat::Json;
  else if (scan_cyc->parsed()) cfg.output = cmh::OutputFormat::Csv;

  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  std::optional<json> failure;
  std::string stage;
  try {
    cfg.validate();
    if (field_info->parsed()) {
      stage = "field info";
      res = cmh::field_info(spec, cfg);
    } else if (cm_types->parsed()) {
      stage = "cm types";
      res = cmh::cm_types(spec, cfg);
    } else if (disc->parsed()) {
      stage = "disc";
      res = cmh::disc_subset(spec, subset, cfg);
    } else if (grand->parsed()) {
      stage = "identity grand";
      res = cmh::identity_grand(spec, phi.empty() ? std::nullopt : std::optional<std::string>(phi), all, cfg);
    } else if (lfun->parsed()) {
      stage = "lfun";
      res = cmh::lfun_values(f, parse_list(subgroup), cfg);
    } else if (avg->parsed()) {
      stage = "avg-height";
      res = cmh::avg_height(spec, cfg);
    } else if (thm->parsed()) {
      stage = "verify-thm1";
      cmh::Thm1Target target;
      if (!field_spec.empty()) target.field = field_spec;
      if (!symbolic.empty()) target.symbolic_g = parse_symbolic(symbolic);
      res = cmh::verify_thm1(target, variant, cfg);
    } else if (scan_cyc->parsed()) {
      stage = "scan cyclotomic";
      res = cmh::scan_cyclotomic(max_f, cfg);
    } else {
      std::cerr << app.help();
      return 2;
    }
  } catch (const std::exception& e) {
    failure = json{{"stage", stage}, {"kind", error_kind(e)}, {"message", e.what()}};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool ok = !failure && res.cert.ok();
  std::ostringstream body;
  if (cfg.output == cmh::OutputFormat::Json) {
    json report;
    report["command"] = command;
    report["config"] = cfg.to_json();
    report["results"] = failure ? json(nullptr) : res.results;
    json cert = res.cert.to_json();
    if (failure) {
      cert["ok"] = false;
      cert["failure"] = *failure;
    }
    report["certification"] = cert;
    report["timing"] = cfg.timing ? json{{"wall_seconds", seconds}} : json{{"wall_seconds", nullptr}};
    body << report.dump(2) << "\n";
  } else if (failure) {
    body << (*failure)["kind"].get<std::string>() << " in " << stage << ": "
         << (*failure)["message"].get<std::string>() << "\n";
  } else {
    body << res.text;
    if (cfg.output == cmh::OutputFormat::Text) {
      body << "certification: " << (res.cert.ok() ? "ok" : "FAILED") << ", max residual bound " << res.cert.max_bound;
      if (res.cert.final_precision > 0) body << ", precision " << res.cert.final_precision << " bits";
      body << "\n";
      for (const auto& u : res.cert.unverified) body << "  UNVERIFIED " << u << "\n";
      for (const auto& x : res.cert.failures) body << "  FAILED " << x << "\n";
    }
    if (cfg.timing) body << "wall time " << seconds << " s\n";
  }

  if (!out_path.empty()) {
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    os << body.str();
  } else if (failure && cfg.output != cmh::OutputFormat::Json) {
    std::cerr << body.str();
  } else {
    std::cout << body.str();
  }
  return ok ? 0 : 1;
}
