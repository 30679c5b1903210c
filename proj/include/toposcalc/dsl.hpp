#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toposcalc/classifier.hpp"
#include "toposcalc/presheaf.hpp"

namespace toposcalc {

// A parsed site document. Names and element labels are kept for diagnostics
// and emission; the semantic payload is already validated.
struct SiteDocument {
  FinCatPtr site;

  // Each coverage entry is the sieve generated by the written arrow list,
  // in written order. Interpretation (check vs generate) is the command's
  // choice.
  struct CoverageEntry {
    ObjId object;
    Sieve sieve;
  };
  bool has_coverage = false;
  std::vector<CoverageEntry> coverage;

  struct NamedPresheaf {
    std::string name;
    Presheaf value;
    // element names per object, in carrier order
    std::vector<std::vector<std::string>> labels;
  };
  std::vector<NamedPresheaf> presheaves;

  struct NamedMap {
    std::string name;
    std::string source_name;
    std::string target_name;
    PresheafMap value;
  };
  std::vector<NamedMap> maps;

  const NamedPresheaf& presheaf(const std::string& name) const;
  const NamedMap& map(const std::string& name) const;

  bool operator==(const SiteDocument& other) const;
};

// Parses the site DSL. Grammar:
//   category  { objects: a, b; arrows: f: a -> b, ...; compose: (g . f) = h, ...; }
//   coverage  { b: [f], [f, g]; a: []; }
//   presheaf X { a: [x0, x1]; f: { y0 -> x1, ... }; }
//   map u: X -> Y { a: { x0 -> p }; b: {}; }
// Identity arrows are implicit (`id_<object>`) and identity actions may be
// omitted. Errors: SyntaxError(line, col), SemanticError, plus forwarded
// validation errors.
SiteDocument parse_document(const std::string& text, bool free_compose = false);

// Canonical emission; parse(emit(doc)) is structurally equal to doc.
std::string emit_document(const SiteDocument& doc);

}  // namespace toposcalc
