#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "testkit.hpp"
#include "toposcalc/sheaf.hpp"

using namespace toposcalc;

namespace {

GrothTopology interval_dense_topology() {
  auto site = tk::interval_site();
  Sieve just_f(site, site->object_id("b"), {site->arrow_id("f")});
  return generate_from_sieves(site, {just_f});
}

}  // namespace

TEST_CASE("every presheaf is a sheaf for the minimal topology") {
  for (const auto& site : tk::all_test_sites()) {
    GrothTopology g = minimal_topology(site);
    for (const Presheaf& x : tk::corpus_presheaves(site)) {
      CHECK(is_sheaf(x, g));
    }
  }
}

TEST_CASE("maximal topology on the terminal site keeps only singletons") {
  auto site = tk::terminal_site();
  GrothTopology g = maximal_topology(site);
  CHECK(is_sheaf(terminal_presheaf(site), g));
  CHECK_FALSE(is_sheaf(discrete_presheaf(site, 2), g));
  CHECK_FALSE(is_sheaf(initial_presheaf(site), g));
}

TEST_CASE("interval dense sheaves are exactly the restriction bijections") {
  auto site = tk::interval_site();
  ObjId a = site->object_id("a"), b = site->object_id("b");
  ArrowId f = site->arrow_id("f");
  GrothTopology g = interval_dense_topology();
  for (const Presheaf& x : tk::corpus_presheaves(site)) {
    bool bijective = x.card(a) == x.card(b);
    if (bijective) {
      std::vector<bool> hit(x.card(a), false);
      for (std::uint32_t e = 0; e < x.card(b); ++e) {
        if (hit[x.act(f, e)]) bijective = false;
        hit[x.act(f, e)] = true;
      }
    }
    CHECK(is_sheaf(x, g) == bijective);
  }
}

TEST_CASE("matching families on the interval sieve are elements of X(a)") {
  auto site = tk::interval_site();
  Sieve just_f(site, site->object_id("b"), {site->arrow_id("f")});
  // Carriers: X(a) = 3, X(b) = 2; arrow order is f, id_a, id_b.
  Presheaf x(site, {3, 2},
             {std::vector<std::uint32_t>{1, 2}, {0, 1, 2}, {0, 1}});
  // Families on {f} pick one element of X(a).
  CHECK(matching_families(just_f, x).size() == 3);
}

TEST_CASE("plus of a sheaf has an isomorphism unit") {
  auto site = tk::interval_site();
  GrothTopology g = interval_dense_topology();
  for (const Presheaf& x : tk::corpus_presheaves(site)) {
    if (!is_sheaf(x, g)) continue;
    PlusResult p = plus(x, g);
    CHECK(is_iso(p.unit));
  }
}

TEST_CASE("plus for the minimal topology is the identity construction") {
  for (const auto& site : {tk::interval_site(), tk::monoid_site()}) {
    GrothTopology g = minimal_topology(site);
    for (const Presheaf& x : tk::corpus_presheaves(site)) {
      PlusResult p = plus(x, g);
      CHECK(is_iso(p.unit));
    }
  }
}

TEST_CASE("the plus construction yields separated presheaves") {
  // Separated: restriction to every covering sieve is injective.
  for (const auto& site : {tk::interval_site(), tk::parallel_site(),
                           tk::monoid_site()}) {
    for (const GrothTopology& g : enumerate_topologies(site)) {
      const SieveTable& table = *g.table();
      for (const Presheaf& x : tk::corpus_presheaves(site)) {
        Presheaf once = plus(x, g).object;
        for (ObjId c = 0; c < site->object_count(); ++c) {
          for (std::uint32_t i = 0; i < table.count(c); ++i) {
            if (!g.covers(c, i)) continue;
            const Sieve& s = table.sieves(c)[i];
            std::map<MatchingFamily, std::uint32_t> seen;
            for (std::uint32_t e = 0; e < once.card(c); ++e) {
              auto inserted = seen.emplace(restrict_element(s, once, c, e), e);
              CHECK(inserted.second);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("terminal site, maximal topology: plus collapses 2 to a point") {
  auto site = tk::terminal_site();
  GrothTopology g = maximal_topology(site);
  PlusResult p = plus(discrete_presheaf(site, 2), g);
  CHECK(p.object.card(0) == 1);
}

TEST_CASE("sheafification produces sheaves and is idempotent") {
  for (const auto& site : {tk::interval_site(), tk::parallel_site()}) {
    for (const GrothTopology& g : enumerate_topologies(site)) {
      for (const Presheaf& x : tk::corpus_presheaves(site)) {
        SheafifyResult l = sheafify(x, g);
        CHECK(is_sheaf(l.sheaf, g));
        SheafifyResult again = sheafify(l.sheaf, g);
        CHECK(is_iso(again.unit));
      }
    }
  }
}

TEST_CASE("sheafify over the dense interval replaces X(b) by X(a)") {
  auto site = tk::interval_site();
  ObjId a = site->object_id("a"), b = site->object_id("b");
  GrothTopology g = interval_dense_topology();
  // Arrow order is f, id_a, id_b; X(a) = 1, X(b) = 2.
  Presheaf x(site, {1, 2}, {std::vector<std::uint32_t>{0, 0}, {0}, {0, 1}});
  SheafifyResult l = sheafify(x, g);
  CHECK(l.sheaf.card(a) == 1);
  CHECK(l.sheaf.card(b) == 1);
}

TEST_CASE("sheafify preserves the terminal presheaf") {
  for (const auto& site : tk::all_test_sites()) {
    for (const GrothTopology& g : enumerate_topologies(site)) {
      SheafifyResult l = sheafify(terminal_presheaf(site), g);
      CHECK(is_iso(l.unit));
    }
  }
}

TEST_CASE("the unit is universal among maps into sheaves, exhaustively") {
  auto site = tk::interval_site();
  for (const GrothTopology& g : enumerate_topologies(site)) {
    auto corpus = tk::corpus_presheaves(site);
    std::vector<Presheaf> sheaves;
    for (const Presheaf& y : corpus) {
      if (is_sheaf(y, g)) sheaves.push_back(y);
    }
    for (const Presheaf& x : corpus) {
      SheafifyResult l = sheafify(x, g);
      for (const Presheaf& y : sheaves) {
        auto downstairs = enumerate_maps(x, y);
        auto upstairs = enumerate_maps(l.sheaf, y);
        // Composition with the unit is a bijection of hom-sets.
        std::size_t matched = 0;
        for (const PresheafMap& h : downstairs) {
          std::size_t liftings = 0;
          for (const PresheafMap& k : upstairs) {
            if (compose_maps(l.unit, k) == h) ++liftings;
          }
          CHECK(liftings == 1);
          ++matched;
        }
        CHECK(matched == downstairs.size());
        CHECK(upstairs.size() == downstairs.size());
      }
    }
  }
}

TEST_CASE("sheafify_map is functorial") {
  auto site = tk::interval_site();
  GrothTopology g = interval_dense_topology();
  auto corpus = tk::corpus_maps(site, 3);
  for (const PresheafMap& u : corpus) {
    PresheafMap lu = sheafify_map(u, g);
    CHECK(lu.source() == sheafify(u.source(), g).sheaf);
    CHECK(lu.target() == sheafify(u.target(), g).sheaf);
    // Naturality of the unit: L(u) . unit_X = unit_Y . u.
    SheafifyResult lx = sheafify(u.source(), g);
    SheafifyResult ly = sheafify(u.target(), g);
    CHECK(compose_maps(lx.unit, lu) == compose_maps(u, ly.unit));
  }
  for (const PresheafMap& u : corpus) {
    for (const PresheafMap& v : corpus) {
      if (u.target() != v.source()) continue;
      CHECK(sheafify_map(compose_maps(u, v), g) ==
            compose_maps(sheafify_map(u, g), sheafify_map(v, g)));
    }
  }
}

TEST_CASE("inverts: basic cases") {
  auto site = tk::interval_site();
  SUBCASE("isos are always inverted") {
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LocalizationHandle handle(g);
      for (const Presheaf& x : tk::corpus_presheaves(site)) {
        CHECK(handle.inverts(identity_map(x)));
      }
    }
  }
  SUBCASE("the minimal handle inverts only isos") {
    LocalizationHandle handle(minimal_topology(site));
    for (const PresheafMap& u : tk::corpus_maps(site, 4)) {
      CHECK(handle.inverts(u) == is_iso(u));
    }
  }
  SUBCASE("the dense handle inverts the sieve inclusion") {
    LocalizationHandle handle(interval_dense_topology());
    Presheaf ya = yoneda(site, site->object_id("a"));
    Presheaf yb = yoneda(site, site->object_id("b"));
    CHECK(handle.inverts(enumerate_maps(ya, yb).at(0)));
  }
}

TEST_CASE("inverted iff image and coimage are inverted") {
  auto site = tk::parallel_site();
  for (const GrothTopology& g : enumerate_topologies(site)) {
    LocalizationHandle handle(g);
    for (const PresheafMap& u : tk::corpus_maps(site, 3)) {
      ImageFactorization fact = image_factorization(u);
      CHECK(handle.inverts(u) ==
            (handle.inverts(fact.im) && handle.inverts(fact.coim)));
    }
  }
}

TEST_CASE("sheaves are local for the covering sieve monos") {
  // The two routes to "local object" agree: the matching-family condition
  // and literal orthogonality against the covering monos.
  auto site = tk::interval_site();
  for (const GrothTopology& g : enumerate_topologies(site)) {
    SieveTablePtr table = g.table();
    for (const Presheaf& x : tk::corpus_presheaves(site)) {
      bool local = true;
      for (ObjId c = 0; c < site->object_count() && local; ++c) {
        for (std::uint32_t i = 0; i < table->count(c); ++i) {
          if (!g.covers(c, i)) continue;
          PresheafMap m = sieve_mono(table->sieves(c)[i]);
          // X is local for m iff precomposition with m is a bijection
          // Hom(cod m, X) -> Hom(dom m, X).
          auto from_total = enumerate_maps(m.target(), x);
          auto from_sieve = enumerate_maps(m.source(), x);
          if (from_total.size() != from_sieve.size()) {
            local = false;
            break;
          }
          std::map<std::vector<std::vector<std::uint32_t>>, int> seen;
          for (const PresheafMap& h : from_total) {
            PresheafMap restricted = compose_maps(m, h);
            std::vector<std::vector<std::uint32_t>> key;
            for (ObjId o = 0; o < site->object_count(); ++o) {
              key.push_back(restricted.component(o));
            }
            if (++seen[key] > 1) {
              local = false;
              break;
            }
          }
        }
      }
      CHECK(local == is_sheaf(x, g));
    }
  }
}

TEST_CASE("left exactness on corpus pullback squares") {
  for (const auto& site : {tk::interval_site(), tk::monoid_site()}) {
    auto corpus = tk::corpus_maps(site, 3);
    std::vector<PullbackSquare> squares;
    for (const PresheafMap& f : corpus) {
      for (const PresheafMap& g : corpus) {
        if (f.target() != g.target()) continue;
        squares.push_back({f, g});
        if (squares.size() >= 40) break;
      }
      if (squares.size() >= 40) break;
    }
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LocalizationHandle handle(g);
      LeftExactReport report = check_left_exact(handle, squares);
      CHECK(report.terminal_preserved);
      CHECK(report.failures.empty());
    }
  }
}

TEST_CASE("inverts satisfies 3-for-2 on composable corpus pairs") {
  auto site = tk::interval_site();
  GrothTopology g = interval_dense_topology();
  LocalizationHandle handle(g);
  auto corpus = tk::corpus_maps(site, 3);
  for (const PresheafMap& u : corpus) {
    for (const PresheafMap& v : corpus) {
      if (u.target() != v.source()) continue;
      PresheafMap w = compose_maps(u, v);
      bool iu = handle.inverts(u), iv = handle.inverts(v), iw = handle.inverts(w);
      if (iu && iv) CHECK(iw);
      if (iu && iw) CHECK(iv);
      if (iv && iw) CHECK(iu);
    }
  }
}
