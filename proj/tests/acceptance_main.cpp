// Acceptance suite: each criterion prints one PASS/FAIL line and the binary
// exits nonzero if any fails. Tolerances are exact everywhere; the pinned
// counts were produced by running the two independent enumeration oracles
// and freezing their (agreeing) output.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "testkit.hpp"
#include "toposcalc/factor.hpp"
#include "toposcalc/forcing.hpp"
#include "toposcalc/sheaf.hpp"

using namespace toposcalc;

namespace {

int failures = 0;

void run_criterion(int number, const char* label,
                   const std::function<bool()>& body) {
  auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string note;
  try {
    pass = body();
  } catch (const std::exception& e) {
    note = std::string(" (") + e.what() + ")";
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  std::printf("criterion %2d [%s]: %s (%lld ms)%s\n", number, label,
              pass ? "PASS" : "FAIL", static_cast<long long>(ms), note.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool criterion_classifier() {
  for (const auto& site : tk::all_test_sites()) {
    OmegaObject om = omega(site);
    for (ObjId c = 0; c < site->object_count(); ++c) {
      Presheaf y = yoneda(site, c);
      auto lattice = subobjects(y);
      // |Omega(c)| equals the subobject count of the representable.
      if (om.omega.card(c) != lattice.size()) return false;
      for (const Subobject& s : lattice) {
        PresheafMap chi = classify(om, s);
        if (!(pullback_truth(om, chi) == s)) return false;
      }
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        for (std::size_t j = i + 1; j < lattice.size(); ++j) {
          if (classify(om, lattice[i]) == classify(om, lattice[j])) return false;
        }
      }
    }
  }
  return true;
}

bool criterion_bijection() {
  const std::size_t pinned[] = {2, 4, 4, 16, 3};
  auto sites = tk::all_test_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    auto gts = enumerate_topologies(sites[i]);
    auto lts = enumerate_closure_operators(sites[i]);
    if (gts.size() != pinned[i] || lts.size() != pinned[i]) return false;
    for (const auto& j : lts) {
      GrothTopology g = lt_to_groth(j);
      if (std::count(gts.begin(), gts.end(), g) != 1) return false;
      if (!(groth_to_lt(g) == j)) return false;
    }
    for (const auto& j1 : lts) {
      for (const auto& j2 : lts) {
        if (lt_leq(j1, j2) != topology_leq(lt_to_groth(j1), lt_to_groth(j2))) {
          return false;
        }
      }
    }
  }
  return true;
}

bool criterion_covering_round_trip() {
  for (const auto& site : tk::all_test_sites()) {
    SieveTablePtr table = sieve_table(site);
    auto monos = tk::sieve_mono_corpus(site);
    for (const GrothTopology& g : enumerate_topologies(site)) {
      CoveringClass cover = covering_class(g);
      std::size_t k = 0;
      for (ObjId c = 0; c < site->object_count(); ++c) {
        for (std::uint32_t i = 0; i < table->count(c); ++i, ++k) {
          if (cover.member(monos[k]) != g.covers(c, i)) return false;
        }
      }
      // Membership is determined by the image sieves on general monos too.
      for (const PresheafMap& u : tk::corpus_maps(site, 3)) {
        if (!is_mono(u)) continue;
        if (cover.member(u) != mono_in_topology(g, u)) return false;
      }
    }
  }
  return true;
}

bool criterion_factorization() {
  for (const auto& site : tk::all_test_sites()) {
    auto monos = tk::sieve_mono_corpus(site);
    auto corpus = tk::corpus_maps(site, 3);
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LTTopology j = groth_to_lt(g);
      CoveringClass cover = covering_class(g);
      std::vector<PresheafMap> dense, closed;
      for (const PresheafMap& m : monos) {
        Factorization fact = dense_closed_factor(m, j);
        if (!(compose_maps(fact.left, fact.right) == m)) return false;
        if (!is_dense(j, subobject_of_map(fact.left))) return false;
        if (!is_closed(j, fact.middle)) return false;
        // Uniqueness: any dense-closed interpolation has the same middle.
        Subobject s = subobject_of_map(m);
        for (const Subobject& mid : subobjects(m.target())) {
          if (!subobject_leq(s, mid)) continue;
          PresheafMap right = mono_of_subobject(mid);
          auto left = factor_through_mono(m, right);
          if (!left.has_value()) continue;
          if (is_dense(j, subobject_of_map(*left)) && is_closed(j, mid) &&
              !(mid == fact.middle)) {
            return false;
          }
        }
        if (is_dense(j, subobject_of_map(m))) dense.push_back(m);
        if (is_closed(j, subobject_of_map(m))) closed.push_back(m);
      }
      for (const PresheafMap& d : dense) {
        for (const PresheafMap& z : closed) {
          if (!check_orthogonal(d, z)) return false;
        }
      }
      for (const PresheafMap& u : corpus) {
        CoverClosedFactorization fact = cover_closed_factor(u, g);
        if (!(compose_maps(fact.covering, fact.closed) == u)) return false;
        if (!cover.member(fact.covering)) return false;
        if (!is_closed(j, subobject_of_map(fact.closed))) return false;
      }
      // Base-change stability of the left class on corpus pullbacks.
      for (const PresheafMap& u : corpus) {
        if (!cover.member(u)) continue;
        for (const PresheafMap& w : corpus) {
          if (w.target() != u.target()) continue;
          if (!cover.member(pullback(w, u).to_left)) return false;
        }
      }
    }
  }
  return true;
}

bool criterion_sheafification() {
  for (const auto& site : tk::all_test_sites()) {
    auto corpus = tk::corpus_presheaves(site);
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LocalizationHandle handle(g);
      std::vector<Presheaf> sheaf_targets;
      for (const Presheaf& y : corpus) {
        if (is_sheaf(y, g)) sheaf_targets.push_back(y);
      }
      for (const Presheaf& x : corpus) {
        SheafifyResult l = handle.sheafify(x);
        if (!is_sheaf(l.sheaf, g)) return false;
        if (!is_iso(handle.sheafify(l.sheaf).unit)) return false;
        for (const Presheaf& y : sheaf_targets) {
          auto downstairs = enumerate_maps(x, y);
          auto upstairs = enumerate_maps(l.sheaf, y);
          if (upstairs.size() != downstairs.size()) return false;
          for (const PresheafMap& h : downstairs) {
            std::size_t liftings = 0;
            for (const PresheafMap& k : upstairs) {
              if (compose_maps(l.unit, k) == h) ++liftings;
            }
            if (liftings != 1) return false;
          }
        }
      }
      // Left exactness: terminal object and corpus pullback squares.
      std::vector<PullbackSquare> squares;
      auto maps = tk::corpus_maps(site, 2);
      for (const PresheafMap& f : maps) {
        for (const PresheafMap& h : maps) {
          if (f.target() != h.target()) continue;
          squares.push_back({f, h});
          if (squares.size() >= 25) break;
        }
        if (squares.size() >= 25) break;
      }
      LeftExactReport report = check_left_exact(handle, squares);
      if (!report.all_preserved()) return false;
    }
  }
  return true;
}

bool criterion_forcing_equivalences() {
  for (const auto& site : tk::all_test_sites()) {
    auto corpus = tk::corpus_maps(site, 3);
    auto objects = tk::corpus_presheaves(site);
    std::mt19937 rng(7u + std::uint32_t(site->arrow_count()));
    for (int round = 0; round < 20; ++round) {
      std::vector<PresheafMap> sigma;
      std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) {
        sigma.push_back(corpus[rng() % corpus.size()]);
      }
      CompileResult surj = compile(site, {sigma, ThetaSpec::surj()});
      std::vector<PresheafMap> images;
      for (const auto& f : sigma) images.push_back(image_factorization(f).im);
      CompileResult iso = compile(site, {images, ThetaSpec::iso()});
      // Local-object sets coincide.
      for (const Presheaf& x : objects) {
        if (is_sheaf(x, surj.handle.topology()) !=
            is_sheaf(x, iso.handle.topology())) {
          return false;
        }
      }
      // Every generator acquired the forced property (compile verifies and
      // would have thrown; double-check the transcript).
      for (const auto& v : surj.verification) {
        if (!v.forced) return false;
      }
      CompileResult mono = compile(site, {sigma, ThetaSpec::mono()});
      std::vector<PresheafMap> diagonals;
      for (const auto& f : sigma) diagonals.push_back(diagonal(f));
      CompileResult diso = compile(site, {diagonals, ThetaSpec::iso()});
      if (!(mono.handle.topology() == diso.handle.topology())) return false;
    }
  }
  return true;
}

bool criterion_minimality() {
  for (const auto& site : tk::all_test_sites()) {
    auto corpus = tk::corpus_maps(site, 2);
    std::vector<ForcingCondition> conditions;
    conditions.push_back({{}, ThetaSpec::iso()});
    std::mt19937 rng(99u + std::uint32_t(site->object_count()));
    for (int i = 0; i < 4 && !corpus.empty(); ++i) {
      const PresheafMap& u = corpus[rng() % corpus.size()];
      conditions.push_back({{u}, ThetaSpec::surj()});
      conditions.push_back({{u}, ThetaSpec::iso()});
      conditions.push_back({{u}, ThetaSpec::mono()});
    }
    for (const ForcingCondition& fc : conditions) {
      CompileResult r = compile(site, fc);
      if (!minimality_check(site, fc, r.handle.topology())) return false;
    }
  }
  return true;
}

bool criterion_degeneracy() {
  for (const auto& site : tk::all_test_sites()) {
    auto corpus = tk::corpus_maps(site, 3);
    for (const PresheafMap& u : corpus) {
      if (!is_mono(iterated_diagonal(u, 2))) return false;
      if (is_n_connected(u, kConnInfinity) != is_iso(u)) return false;
    }
    SieveTablePtr table = sieve_table(site);
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LocalizationHandle handle(g);
      TcFactorization fact = tc_factor(handle);
      if (!fact.residual_trivial) return false;
      if (!(fact.topological.topology() == g)) return false;
      // HCover cap Mono equals the covering sieves.
      std::size_t k = 0;
      auto monos = tk::sieve_mono_corpus(site);
      for (ObjId c = 0; c < site->object_count(); ++c) {
        for (std::uint32_t i = 0; i < table->count(c); ++i, ++k) {
          if (is_hypercovering(monos[k], g) != g.covers(c, i)) return false;
        }
      }
    }
  }
  return true;
}

bool criterion_frame() {
  for (const auto& site : tk::all_test_sites()) {
    auto all = enumerate_topologies(site);
    const std::size_t n = all.size();
    if (n > 20) return false;
    // Index-level meet/join tables make the subset sweep cheap.
    auto index_of = [&](const GrothTopology& g) {
      for (std::size_t i = 0; i < n; ++i) {
        if (all[i] == g) return i;
      }
      throw Error(ErrorCode::ValidationError, "operation left the poset");
    };
    std::vector<std::vector<std::size_t>> meet(n, std::vector<std::size_t>(n));
    std::vector<std::vector<std::size_t>> join(n, std::vector<std::size_t>(n));
    std::size_t bottom = index_of(minimal_topology(site));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        meet[i][j] = index_of(topology_meet(all[i], all[j]));
        join[i][j] = index_of(topology_join(all[i], all[j]));
      }
    }
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        std::size_t join_all = bottom;
        std::size_t join_meets = bottom;
        for (std::size_t i = 0; i < n; ++i) {
          if (!(mask >> i & 1)) continue;
          join_all = join[join_all][i];
          join_meets = join[join_meets][meet[g][i]];
        }
        if (meet[g][join_all] != join_meets) return false;
      }
    }
  }
  return true;
}

bool criterion_congruence_laws() {
  for (const auto& site : tk::all_test_sites()) {
    auto corpus = tk::corpus_maps(site, 2);
    for (const GrothTopology& g : enumerate_topologies(site)) {
      LocalizationHandle handle(g);
      std::vector<bool> inverted;
      inverted.reserve(corpus.size());
      for (const PresheafMap& u : corpus) inverted.push_back(handle.inverts(u));
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        // Image-coimage law.
        ImageFactorization fact = image_factorization(corpus[i]);
        if (inverted[i] !=
            (handle.inverts(fact.im) && handle.inverts(fact.coim))) {
          return false;
        }
        for (std::size_t j = 0; j < corpus.size(); ++j) {
          if (corpus[i].target() != corpus[j].source()) continue;
          bool iw = handle.inverts(compose_maps(corpus[i], corpus[j]));
          // Composition closure and 3-for-2.
          if (inverted[i] && inverted[j] && !iw) return false;
          if (inverted[i] && iw && !inverted[j]) return false;
          if (inverted[j] && iw && !inverted[i]) return false;
        }
        // Base-change closure.
        if (!inverted[i]) continue;
        for (std::size_t j = 0; j < corpus.size(); ++j) {
          if (corpus[j].target() != corpus[i].target()) continue;
          if (!handle.inverts(pullback(corpus[j], corpus[i]).to_left)) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  run_criterion(1, "classifier soundness/completeness", criterion_classifier);
  run_criterion(2, "LT/Grothendieck bijection, pinned counts", criterion_bijection);
  run_criterion(3, "covering-topology round trip", criterion_covering_round_trip);
  run_criterion(4, "factorization systems", criterion_factorization);
  run_criterion(5, "sheafification reflector", criterion_sheafification);
  run_criterion(6, "forcing equivalences", criterion_forcing_equivalences);
  run_criterion(7, "minimality surrogate", criterion_minimality);
  run_criterion(8, "fragment degeneracy theorems", criterion_degeneracy);
  run_criterion(9, "frame distributivity", criterion_frame);
  run_criterion(10, "congruence predicate laws", criterion_congruence_laws);
  if (failures == 0) {
    std::printf("acceptance: all criteria PASS\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
