// toposcalc: a workbench for finite-site topologies, sheafification and the
// forcing calculus. Parses the site DSL and dispatches the computation
// commands; reports are deterministic for fixed inputs.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "toposcalc/report.hpp"

namespace {

using namespace toposcalc;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::SemanticError, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ThetaSpec parse_theta(const std::string& text) {
  if (text == "iso") return ThetaSpec::iso();
  if (text == "surj") return ThetaSpec::surj();
  if (text == "mono") return ThetaSpec::mono();
  if (text.rfind("conn:", 0) == 0) {
    std::string tail = text.substr(5);
    if (tail == "inf") return ThetaSpec::conn(kConnInfinity);
    try {
      return ThetaSpec::conn(std::stoi(tail));
    } catch (...) {
    }
  }
  throw Error(ErrorCode::SemanticError,
              "theta must be iso|surj|mono|conn:<n>|conn:inf, got '" + text + "'");
}

int emit(const Report& report, const std::string& format,
         const std::string& dot_payload) {
  if (format == "json") {
    std::cout << report.to_json().dump(2) << "\n";
  } else if (format == "table") {
    std::cout << report.to_table();
  } else if (format == "dot") {
    if (dot_payload.empty()) {
      throw Error(ErrorCode::SemanticError,
                  "this command has no DOT rendering");
    }
    std::cout << dot_payload;
  } else {
    throw Error(ErrorCode::SemanticError, "unknown format '" + format + "'");
  }
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toposcalc: topologies, sheaves and forcing on finite sites"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  bool strict = false;
  bool free_compose = false;
  bool timing = false;
  app.add_option("--format", format, "json|table|dot")->capture_default_str();
  app.add_flag("--strict", strict,
               "coverage must already satisfy the topology axioms");
  app.add_flag("--free-compose", free_compose,
               "infer omitted composites when unique");
  app.add_flag("--timing", timing, "print elapsed time to stderr");

  std::string file;
  std::string presheaf_name, map_name, sigma_file, theta_text = "iso", suite;

  CLI::App* enumerate =
      app.add_subcommand("enumerate-topologies", "list all topologies");
  enumerate->add_option("file", file)->required();

  CLI::App* omega_cmd = app.add_subcommand("omega", "the Lawvere object");
  omega_cmd->add_option("file", file)->required();

  CLI::App* sheafify_cmd =
      app.add_subcommand("sheafify", "sheafify a named presheaf");
  sheafify_cmd->add_option("file", file)->required();
  sheafify_cmd->add_option("--presheaf", presheaf_name)->required();

  CLI::App* factor_cmd = app.add_subcommand("factor", "factor a named map");
  factor_cmd->add_option("file", file)->required();
  factor_cmd->add_option("--map", map_name)->required();

  CLI::App* force_cmd =
      app.add_subcommand("force", "compile a forcing condition");
  force_cmd->add_option("file", file)->required();
  force_cmd->add_option("--sigma", sigma_file,
                        "maps file (defaults to the site file)");
  force_cmd->add_option("--theta", theta_text, "iso|surj|mono|conn:<n>|conn:inf")
      ->capture_default_str();

  CLI::App* verify_cmd = app.add_subcommand("verify", "run a named suite");
  verify_cmd->add_option("file", file)->required();
  verify_cmd
      ->add_option("--suite", suite,
                   "bijections|frame|modality|forcing-equivalences|degeneracy")
      ->required();

  CLI11_PARSE(app, argc, argv);

  auto started = std::chrono::steady_clock::now();
  try {
    std::string text = read_file(file);
    std::string digest = fnv1a_hex(text);
    SiteDocument doc = parse_document(text, free_compose);

    Report report;
    std::string dot_payload;
    if (enumerate->parsed()) {
      report = cmd_enumerate_topologies(doc, digest);
      if (format == "dot") dot_payload = dot_topology_lattice(doc.site);
    } else if (omega_cmd->parsed()) {
      report = cmd_omega(doc, digest);
    } else if (sheafify_cmd->parsed()) {
      report = cmd_sheafify(doc, digest, presheaf_name, strict);
    } else if (factor_cmd->parsed()) {
      report = cmd_factor(doc, digest, map_name, strict);
      if (format == "dot") dot_payload = dot_factorization(doc, map_name, strict);
    } else if (force_cmd->parsed()) {
      SiteDocument sigma_doc =
          sigma_file.empty() ? doc
                             : parse_document(read_file(sigma_file), free_compose);
      if (!same_site(sigma_doc.site, doc.site)) {
        throw Error(ErrorCode::SemanticError,
                    "sigma file declares a different category");
      }
      report = cmd_force(doc, sigma_doc, digest, parse_theta(theta_text), strict);
    } else if (verify_cmd->parsed()) {
      report = cmd_verify(doc, digest, suite, strict);
    }

    int code = emit(report, format, dot_payload);
    if (timing) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      std::cerr << "elapsed_ms " << elapsed.count() << "\n";
    }
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
