#pragma once

// Shared sites, corpora and brute-force oracles for the test suites. The
// oracles are deliberately written against definitions, not against the
// library's primary algorithms, so the two routes stay independent.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "toposcalc/classifier.hpp"
#include "toposcalc/fincat.hpp"
#include "toposcalc/presheaf.hpp"
#include "toposcalc/topology.hpp"

namespace tk {

using namespace toposcalc;

inline FinCatPtr terminal_site() {
  RawCategory raw;
  raw.objects = {"pt"};
  return FinCat::validate(raw);
}

// a --f--> b
inline FinCatPtr interval_site() {
  RawCategory raw;
  raw.objects = {"a", "b"};
  raw.arrows = {{"f", "a", "b"}};
  return FinCat::validate(raw);
}

// a ==f,g==> b
inline FinCatPtr parallel_site() {
  RawCategory raw;
  raw.objects = {"a", "b"};
  raw.arrows = {{"f", "a", "b"}, {"g", "a", "b"}};
  return FinCat::validate(raw);
}

// a -f-> b -h-> d, a -g-> c -k-> d, commuting through m.
inline FinCatPtr square_site() {
  RawCategory raw;
  raw.objects = {"a", "b", "c", "d"};
  raw.arrows = {{"f", "a", "b"},
                {"g", "a", "c"},
                {"h", "b", "d"},
                {"k", "c", "d"},
                {"m", "a", "d"}};
  raw.composites = {{"f", "h", "m"}, {"g", "k", "m"}};
  return FinCat::validate(raw);
}

// One object, three endo-arrows {id, x, y} with p.q = p on the non-identity
// part (left-zero multiplication).
inline FinCatPtr monoid_site() {
  RawCategory raw;
  raw.objects = {"s"};
  raw.arrows = {{"x", "s", "s"}, {"y", "s", "s"}};
  // (p . q) = p after q = composite of q then p.
  raw.composites = {{"x", "x", "x"},
                    {"y", "x", "x"},
                    {"x", "y", "y"},
                    {"y", "y", "y"}};
  return FinCat::validate(raw);
}

// One object, arrows {id, e} with e.e = e.
inline FinCatPtr idempotent_monoid_site() {
  RawCategory raw;
  raw.objects = {"s"};
  raw.arrows = {{"e", "s", "s"}};
  raw.composites = {{"e", "e", "e"}};
  return FinCat::validate(raw);
}

inline std::vector<FinCatPtr> all_test_sites() {
  return {terminal_site(), interval_site(), parallel_site(), square_site(),
          monoid_site()};
}

inline std::vector<const char*> all_test_site_names() {
  return {"terminal", "interval", "parallel", "square", "monoid"};
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Counts action-closed subsets by filtering the full power set; independent
// of the BFS closure enumeration used by the library.
inline std::size_t oracle_subobject_count(const Presheaf& p) {
  const FinCat& cat = *p.base();
  std::vector<std::pair<ObjId, std::uint32_t>> elems;
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    for (std::uint32_t x = 0; x < p.card(o); ++x) elems.push_back({o, x});
  }
  if (elems.size() > 20) throw std::runtime_error("oracle corpus too large");
  std::size_t count = 0;
  for (std::size_t mask = 0; mask < (std::size_t(1) << elems.size()); ++mask) {
    auto in = [&](ObjId o, std::uint32_t x) {
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (elems[i].first == o && elems[i].second == x) {
          return (mask >> i & 1) != 0;
        }
      }
      return false;
    };
    bool closed = true;
    for (ArrowId f = 0; f < cat.arrow_count() && closed; ++f) {
      for (std::uint32_t x = 0; x < p.card(cat.dst(f)); ++x) {
        if (in(cat.dst(f), x) && !in(cat.src(f), p.act(f, x))) {
          closed = false;
          break;
        }
      }
    }
    if (closed) ++count;
  }
  return count;
}

// The nerve criterion for surjectivity: the colimit of the 2-truncated nerve
// (the coequalizer of the kernel pair) must map isomorphically onto the
// codomain.
inline bool oracle_surjection_nerve(const PresheafMap& u) {
  PullbackResult kernel = pullback(u, u);
  RawCategory shape_raw;
  shape_raw.objects = {"j0", "j1"};
  shape_raw.arrows = {{"d0", "j0", "j1"}, {"d1", "j0", "j1"}};
  FinCatPtr shape = FinCat::validate(shape_raw);
  // Shape objects sort as j0 < j1; edges d0 -> first projection, d1 -> second.
  std::vector<Presheaf> nodes;
  nodes.push_back(kernel.apex);
  nodes.push_back(u.source());
  std::vector<PresheafMap> edges(shape->arrow_count(), identity_map(u.source()));
  edges[shape->arrow_id("d0")] = kernel.to_left;
  edges[shape->arrow_id("d1")] = kernel.to_right;
  edges[shape->arrow_id("id_j0")] = identity_map(kernel.apex);
  edges[shape->arrow_id("id_j1")] = identity_map(u.source());
  Cocone q = colimit(Diagram(shape, std::move(nodes), std::move(edges)));
  // Induced map Q -> B from the cocone (A -> B, kernel -> B agree).
  const FinCat& cat = *u.source().base();
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp[c].assign(q.apex.card(c), 0);
    for (std::uint32_t x = 0; x < u.source().card(c); ++x) {
      comp[c][q.legs[1].at(c, x)] = u.at(c, x);
    }
  }
  PresheafMap induced(q.apex, u.target(), std::move(comp));
  return is_iso(induced);
}

// Least enumerated topology whose covers include the given sieves.
inline GrothTopology oracle_least_topology_containing(
    const FinCatPtr& base, const std::vector<Sieve>& sieves) {
  auto all = enumerate_topologies(base);
  const GrothTopology* best = nullptr;
  for (const auto& g : all) {
    bool contains = true;
    for (const Sieve& s : sieves) {
      if (!g.covers(s.target(), g.table()->index_of(s))) {
        contains = false;
        break;
      }
    }
    if (!contains) continue;
    if (best == nullptr || topology_leq(g, *best)) best = &g;
  }
  if (best == nullptr) throw std::runtime_error("no topology contains the sieves");
  // Verify leastness, not just minimality.
  for (const auto& g : all) {
    bool contains = true;
    for (const Sieve& s : sieves) {
      if (!g.covers(s.target(), g.table()->index_of(s))) {
        contains = false;
        break;
      }
    }
    if (contains && !topology_leq(*best, g)) {
      throw std::runtime_error("containing topologies have no least element");
    }
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Deterministic corpora
// ---------------------------------------------------------------------------

// Small presheaf zoo on a site: initial, terminal, a 2-point discrete
// presheaf, every representable and every sieve subfunctor.
inline std::vector<Presheaf> corpus_presheaves(const FinCatPtr& base) {
  std::vector<Presheaf> out;
  out.push_back(initial_presheaf(base));
  out.push_back(terminal_presheaf(base));
  out.push_back(discrete_presheaf(base, 2));
  for (ObjId c = 0; c < base->object_count(); ++c) {
    out.push_back(yoneda(base, c));
  }
  SieveTablePtr table = sieve_table(base);
  for (ObjId c = 0; c < base->object_count(); ++c) {
    for (std::uint32_t i = 0; i + 1 < table->count(c); ++i) {
      Presheaf sp = sieve_presheaf(table->sieves(c)[i]);
      if (std::find(out.begin(), out.end(), sp) == out.end()) out.push_back(sp);
    }
  }
  return out;
}

// All maps between all ordered corpus pairs, capped per pair.
inline std::vector<PresheafMap> corpus_maps(const FinCatPtr& base,
                                            std::size_t per_pair_cap = 24) {
  std::vector<PresheafMap> out;
  auto objs = corpus_presheaves(base);
  for (const auto& x : objs) {
    for (const auto& y : objs) {
      auto maps = enumerate_maps(x, y);
      for (std::size_t i = 0; i < maps.size() && i < per_pair_cap; ++i) {
        out.push_back(maps[i]);
      }
    }
  }
  return out;
}

// Every mono with a representable codomain, one per sieve: the exhaustive
// representable-sieve corpus.
inline std::vector<PresheafMap> sieve_mono_corpus(const FinCatPtr& base) {
  std::vector<PresheafMap> out;
  SieveTablePtr table = sieve_table(base);
  for (ObjId c = 0; c < base->object_count(); ++c) {
    for (std::uint32_t i = 0; i < table->count(c); ++i) {
      out.push_back(sieve_mono(table->sieves(c)[i]));
    }
  }
  return out;
}

}  // namespace tk
