#pragma once

#include <string>

#include "json.hpp"
#include "toposcalc/dsl.hpp"
#include "toposcalc/forcing.hpp"

namespace toposcalc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchemaVersion = "1";

struct Report {
  std::string command;
  std::string input_digest;
  Json results;
  bool ok = true;

  Json to_json() const;
  std::string to_table() const;
};

std::string fnv1a_hex(const std::string& data);

// The topology a document denotes: the coverage block interpreted as
// generators (default) or as a literal axiom-checked assignment (strict).
// Without a coverage block this is the minimal topology.
GrothTopology topology_from_document(const SiteDocument& doc, bool strict);

Report cmd_enumerate_topologies(const SiteDocument& doc,
                                const std::string& digest);
Report cmd_omega(const SiteDocument& doc, const std::string& digest);
Report cmd_sheafify(const SiteDocument& doc, const std::string& digest,
                    const std::string& presheaf_name, bool strict);
Report cmd_factor(const SiteDocument& doc, const std::string& digest,
                  const std::string& map_name, bool strict);
Report cmd_force(const SiteDocument& doc, const SiteDocument& sigma_doc,
                 const std::string& digest, const ThetaSpec& theta,
                 bool strict);
Report cmd_verify(const SiteDocument& doc, const std::string& digest,
                  const std::string& suite, bool strict);

// DOT renderings.
std::string dot_topology_lattice(const FinCatPtr& site);
std::string dot_factorization(const SiteDocument& doc,
                              const std::string& map_name, bool strict);

// Sieve as a JSON-friendly arrow-name list.
Json sieve_to_json(const FinCat& cat, const Sieve& s);
Json topology_to_json(const GrothTopology& g);

}  // namespace toposcalc
