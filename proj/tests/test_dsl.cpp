#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "testkit.hpp"
#include <random>

#include "toposcalc/caps.hpp"
#include "toposcalc/dsl.hpp"
#include "toposcalc/report.hpp"

using namespace toposcalc;

namespace {

const char* kIntervalDoc = R"(
# the walking arrow with its dense coverage
category {
  objects: a, b;
  arrows: f: a -> b;
}
coverage {
  b: [f];
}
presheaf X {
  a: [p];
  b: [q, r];
  f: { q -> p, r -> p };
}
presheaf Y {
  a: [u];
  b: [v];
  f: { v -> u };
}
map collapse: X -> Y {
  a: { p -> u };
  b: { q -> v, r -> v };
}
)";

}  // namespace

TEST_CASE("the terminal-site document parses to one object") {
  SiteDocument doc = parse_document("category { objects: pt; }");
  CHECK(doc.site->object_count() == 1);
  CHECK(doc.site->arrow_count() == 1);
  CHECK_FALSE(doc.has_coverage);
}

TEST_CASE("the interval document parses fully") {
  SiteDocument doc = parse_document(kIntervalDoc);
  CHECK(doc.site->object_count() == 2);
  CHECK(doc.site->arrow_count() == 3);
  REQUIRE(doc.has_coverage);
  REQUIRE(doc.coverage.size() == 1);
  CHECK(doc.coverage[0].sieve.arrows() ==
        std::vector<ArrowId>{doc.site->arrow_id("f")});
  CHECK(doc.presheaves.size() == 2);
  const auto& x = doc.presheaf("X");
  CHECK(x.value.card(doc.site->object_id("a")) == 1);
  CHECK(x.value.card(doc.site->object_id("b")) == 2);
  const auto& m = doc.map("collapse");
  CHECK(is_surjection(m.value));
}

TEST_CASE("coverage generates the dense topology by default, checks in strict") {
  SiteDocument doc = parse_document(kIntervalDoc);
  GrothTopology generated = topology_from_document(doc, false);
  auto site = doc.site;
  Sieve just_f(site, site->object_id("b"), {site->arrow_id("f")});
  CHECK(generated == generate_from_sieves(site, {just_f}));
  // Strict mode requires the axioms verbatim; {f} alone misses the maximal
  // sieves.
  try {
    topology_from_document(doc, true);
    FAIL("expected MissingMaximal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingMaximal);
  }
}

TEST_CASE("strict coverage accepts a literal topology") {
  SiteDocument doc = parse_document(
      "category { objects: a, b; arrows: f: a -> b; }\n"
      "coverage { a: [id_a]; b: [id_b], [f]; }");
  GrothTopology g = topology_from_document(doc, true);
  CHECK(g.covers(doc.site->object_id("b"),
                 g.table()->index_of(
                     Sieve(doc.site, doc.site->object_id("b"),
                           {doc.site->arrow_id("f")}))));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_document("category { objects a; }");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("unknown endpoints are semantic errors") {
  try {
    parse_document("category { objects: a; arrows: f: a -> c; }");
    FAIL("expected SemanticError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SemanticError);
  }
}

TEST_CASE("missing composites surface as validation failures") {
  const char* text =
      "category { objects: a, b, c;"
      " arrows: f: a -> b, g: b -> c, h: a -> c; }";
  try {
    parse_document(text);
    FAIL("expected MissingComposite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingComposite);
  }
  // With --free-compose the unique candidate is inferred.
  SiteDocument doc = parse_document(text, /*free_compose=*/true);
  CHECK(doc.site->compose(doc.site->arrow_id("f"), doc.site->arrow_id("g")) ==
        doc.site->arrow_id("h"));
}

TEST_CASE("presheaf mistakes are caught") {
  SUBCASE("missing action") {
    try {
      parse_document(
          "category { objects: a, b; arrows: f: a -> b; }"
          "presheaf X { a: [p]; b: [q]; }");
      FAIL("expected SemanticError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SemanticError);
    }
  }
  SUBCASE("unknown element in an action") {
    try {
      parse_document(
          "category { objects: a, b; arrows: f: a -> b; }"
          "presheaf X { a: [p]; b: [q]; f: { q -> nope }; }");
      FAIL("expected SemanticError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SemanticError);
    }
  }
  SUBCASE("non-natural map is a forwarded validation error") {
    const char* text =
        "category { objects: a, b; arrows: f: a -> b; }"
        "presheaf X { a: [p0, p1]; b: [q]; f: { q -> p0 }; }"
        "presheaf Y { a: [u0, u1]; b: [v]; f: { v -> u0 }; }"
        "map bad: X -> Y { a: { p0 -> u1, p1 -> u0 }; b: { q -> v }; }";
    try {
      parse_document(text);
      FAIL("expected ValidationError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ValidationError);
    }
  }
}

TEST_CASE("emit/parse round trip is structurally equal") {
  SiteDocument doc = parse_document(kIntervalDoc);
  std::string emitted = emit_document(doc);
  SiteDocument again = parse_document(emitted);
  CHECK(doc == again);
  // And emission is a fixed point.
  CHECK(emit_document(again) == emitted);
}

TEST_CASE("round trip covers the commutative square with coverage and data") {
  const char* text = R"(
category {
  objects: a, b, c, d;
  arrows: f: a -> b, g: a -> c, h: b -> d, k: c -> d, m: a -> d;
  compose: (h . f) = m, (k . g) = m;
}
coverage {
  d: [h, k];
}
presheaf P {
  a: [e0];
  b: [e1];
  c: [e2];
  d: [e3];
  f: { e1 -> e0 };
  g: { e2 -> e0 };
  h: { e3 -> e1 };
  k: { e3 -> e2 };
  m: { e3 -> e0 };
}
)";
  SiteDocument doc = parse_document(text);
  SiteDocument again = parse_document(emit_document(doc));
  CHECK(doc == again);
  CHECK(emit_document(again) == emit_document(doc));
  // The written generators close up to the sieve {h, k, m}.
  REQUIRE(doc.coverage.size() == 1);
  CHECK(doc.coverage[0].sieve.arrows().size() == 3);
}

TEST_CASE("round trip covers the monoid site with explicit composites") {
  SiteDocument doc = parse_document(
      "category { objects: s; arrows: x: s -> s, y: s -> s;"
      " compose: (x . x) = x, (x . y) = x, (y . x) = y, (y . y) = y; }");
  CHECK(*doc.site == *tk::monoid_site());
  SiteDocument again = parse_document(emit_document(doc));
  CHECK(doc == again);
}

TEST_CASE("reports are deterministic and carry the schema header") {
  SiteDocument doc = parse_document(kIntervalDoc);
  std::string digest = fnv1a_hex(kIntervalDoc);
  Report r1 = cmd_enumerate_topologies(doc, digest);
  Report r2 = cmd_enumerate_topologies(doc, digest);
  CHECK(r1.to_json().dump() == r2.to_json().dump());
  CHECK(r1.to_json()["schema_version"] == kReportSchemaVersion);
  CHECK(r1.results["count"] == 4);
}

TEST_CASE("omega report cross-checks sieve and subobject counts") {
  SiteDocument doc = parse_document(kIntervalDoc);
  Report r = cmd_omega(doc, "d");
  CHECK(r.ok);
  CHECK(r.results["cross_check"] == true);
}

TEST_CASE("sheafify report traces the dense-interval example") {
  SiteDocument doc = parse_document(kIntervalDoc);
  Report r = cmd_sheafify(doc, "d", "X", false);
  CHECK(r.ok);
  CHECK(r.results["was_sheaf"] == false);
  CHECK(r.results["is_sheaf_after"] == true);
  // X(b) is replaced along the restriction by X(a) = 1 point.
  CHECK(r.results["sheaf_carriers"]["b"] == 1);
}

TEST_CASE("factor report on a non-mono uses the cover-closed modality") {
  SiteDocument doc = parse_document(kIntervalDoc);
  Report r = cmd_factor(doc, "d", "collapse", false);
  CHECK(r.ok);
  CHECK(r.results["kind"] == "cover-closed");
}

TEST_CASE("force report compiles and verifies") {
  SiteDocument doc = parse_document(kIntervalDoc);
  Report r = cmd_force(doc, doc, "d", ThetaSpec::surj(), false);
  CHECK(r.ok);
  CHECK(r.results["verification"][0]["forced"] == true);
  CHECK(r.results["minimal"] == true);
}

TEST_CASE("verify suites pass on the interval document") {
  SiteDocument doc = parse_document(kIntervalDoc);
  for (const char* suite : {"bijections", "frame", "modality",
                            "forcing-equivalences", "degeneracy"}) {
    Report r = cmd_verify(doc, "d", suite, false);
    CHECK(r.ok);
  }
}

TEST_CASE("mangled documents fail with typed errors, never crashes") {
  // Deterministic mutation fuzzing over a valid document: deletions,
  // substitutions and truncations must either parse or raise Error.
  std::string base = kIntervalDoc;
  std::mt19937 rng(424242);
  const char charset[] = "{}[]();:,.->=abf X#\n";
  std::size_t parsed = 0, rejected = 0;
  for (int round = 0; round < 400; ++round) {
    std::string text = base;
    int edits = 1 + int(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      if (text.empty()) break;
      std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(pos, 1 + rng() % 5); break;
        case 1: text[pos] = charset[rng() % (sizeof(charset) - 1)]; break;
        default: text = text.substr(0, pos); break;
      }
    }
    try {
      parse_document(text);
      ++parsed;
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 400);
  CHECK(rejected > 0);
}

TEST_CASE("size-cap overrides parse from the environment format") {
  Caps plain = parse_caps(nullptr);
  CHECK(plain.max_arrows == 256);
  CHECK(plain.max_elements_per_object == 64);
  CHECK(plain.max_enumeration == (std::size_t(1) << 20));

  Caps bare = parse_caps("512");
  CHECK(bare.max_arrows == 512);

  Caps keyed = parse_caps("arrows=300,elements=128,enum=4096");
  CHECK(keyed.max_arrows == 300);
  CHECK(keyed.max_elements_per_object == 128);
  CHECK(keyed.max_enumeration == 4096);
}

TEST_CASE("dot lattice output is well-formed") {
  SiteDocument doc = parse_document(kIntervalDoc);
  std::string dot = dot_topology_lattice(doc.site);
  CHECK(dot.find("digraph topologies") != std::string::npos);
  CHECK(dot.find("t0") != std::string::npos);
}
