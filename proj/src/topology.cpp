#include "toposcalc/topology.hpp"

#include <algorithm>

#include "toposcalc/caps.hpp"

namespace toposcalc {

namespace {

std::string sieve_label(const SieveTable& table, ObjId c, std::uint32_t i) {
  const Sieve& s = table.sieves(c)[i];
  std::string out = "{";
  for (std::size_t k = 0; k < s.arrows().size(); ++k) {
    if (k) out += ", ";
    out += table.base()->arrow_name(s.arrows()[k]);
  }
  out += "} on " + table.base()->object_name(c);
  return out;
}

enum class AxiomIssue { None, MissingMaximal, Stability, Transitivity };

struct AxiomReport {
  AxiomIssue issue = AxiomIssue::None;
  ObjId object = 0;
  std::uint32_t sieve = 0;
  std::uint32_t other = 0;  // offending arrow or tested sieve
};

AxiomReport find_axiom_violation(const SieveTable& table,
                                 const std::vector<std::vector<bool>>& covers) {
  const FinCat& cat = *table.base();
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    if (!covers[c][table.maximal_index(c)]) {
      return {AxiomIssue::MissingMaximal, c, table.maximal_index(c), 0};
    }
  }
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (!covers[c][i]) continue;
      for (ArrowId f : cat.arrows_into(c)) {
        if (!covers[cat.src(f)][table.pullback_index(f, i)]) {
          return {AxiomIssue::Stability, c, i, f};
        }
      }
    }
  }
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (!covers[c][i]) continue;
      const Sieve& s = table.sieves(c)[i];
      for (std::uint32_t r = 0; r < table.count(c); ++r) {
        if (covers[c][r]) continue;
        bool locally_covering = true;
        for (ArrowId f : s.arrows()) {
          if (!covers[cat.src(f)][table.pullback_index(f, r)]) {
            locally_covering = false;
            break;
          }
        }
        if (locally_covering) return {AxiomIssue::Transitivity, c, i, r};
      }
    }
  }
  return {};
}

bool covers_satisfy_axioms(const SieveTable& table,
                           const std::vector<std::vector<bool>>& covers) {
  return find_axiom_violation(table, covers).issue == AxiomIssue::None;
}

}  // namespace

GrothTopology::GrothTopology(SieveTablePtr table,
                             std::vector<std::vector<bool>> covers)
    : table_(std::move(table)), covers_(std::move(covers)) {
  const FinCat& cat = *table_->base();
  if (covers_.size() != cat.object_count()) {
    throw Error(ErrorCode::ShapeMismatch, "cover table has wrong size");
  }
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    if (covers_[c].size() != table_->count(c)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "cover flags at '" + cat.object_name(c) + "' have wrong length");
    }
  }
  check_invariants();
}

std::vector<Sieve> GrothTopology::covering_sieves(ObjId c) const {
  std::vector<Sieve> out;
  for (std::uint32_t i = 0; i < table_->count(c); ++i) {
    if (covers_[c][i]) out.push_back(table_->sieves(c)[i]);
  }
  return out;
}

std::vector<bool> GrothTopology::flat_key() const {
  std::vector<bool> key;
  for (const auto& v : covers_) key.insert(key.end(), v.begin(), v.end());
  return key;
}

void GrothTopology::check_invariants() const {
  AxiomReport report = find_axiom_violation(*table_, covers_);
  switch (report.issue) {
    case AxiomIssue::None:
      return;
    case AxiomIssue::MissingMaximal:
      throw Error(ErrorCode::MissingMaximal,
                  "maximal sieve on '" + table_->base()->object_name(report.object) +
                      "' is not covering");
    case AxiomIssue::Stability:
      throw Error(ErrorCode::StabilityViolation,
                  "pullback of " + sieve_label(*table_, report.object, report.sieve) +
                      " along '" + table_->base()->arrow_name(report.other) +
                      "' is not covering");
    case AxiomIssue::Transitivity:
      throw Error(ErrorCode::TransitivityViolation,
                  sieve_label(*table_, report.object, report.other) +
                      " is locally covering over " +
                      sieve_label(*table_, report.object, report.sieve) +
                      " but not covering");
  }
}

bool GrothTopology::operator==(const GrothTopology& other) const {
  return same_site(base(), other.base()) && covers_ == other.covers_;
}

GrothTopology check_axioms(const FinCatPtr& base,
                           const std::vector<std::vector<Sieve>>& raw_covers) {
  SieveTablePtr table = sieve_table(base);
  if (raw_covers.size() != base->object_count()) {
    throw Error(ErrorCode::ShapeMismatch, "cover assignment has wrong size");
  }
  std::vector<std::vector<bool>> flags(base->object_count());
  for (ObjId c = 0; c < base->object_count(); ++c) {
    flags[c].assign(table->count(c), false);
    for (const Sieve& s : raw_covers[c]) {
      if (s.target() != c) {
        throw Error(ErrorCode::ShapeMismatch, "sieve filed under the wrong object");
      }
      flags[c][table->index_of(s)] = true;
    }
  }
  return GrothTopology(table, std::move(flags));
}

GrothTopology minimal_topology(const FinCatPtr& base) {
  SieveTablePtr table = sieve_table(base);
  std::vector<std::vector<bool>> flags(base->object_count());
  for (ObjId c = 0; c < base->object_count(); ++c) {
    flags[c].assign(table->count(c), false);
    flags[c][table->maximal_index(c)] = true;
  }
  return GrothTopology(table, std::move(flags));
}

GrothTopology maximal_topology(const FinCatPtr& base) {
  SieveTablePtr table = sieve_table(base);
  std::vector<std::vector<bool>> flags(base->object_count());
  for (ObjId c = 0; c < base->object_count(); ++c) {
    flags[c].assign(table->count(c), true);
  }
  return GrothTopology(table, std::move(flags));
}

GrothTopology generate_from_sieves(const FinCatPtr& base,
                                   const std::vector<Sieve>& sieves) {
  SieveTablePtr table = sieve_table(base);
  const FinCat& cat = *base;
  std::vector<std::vector<bool>> flags(base->object_count());
  for (ObjId c = 0; c < base->object_count(); ++c) {
    flags[c].assign(table->count(c), false);
    flags[c][table->maximal_index(c)] = true;
  }
  for (const Sieve& s : sieves) flags[s.target()][table->index_of(s)] = true;

  // Least fixed point of the stability+transitivity closure.
  bool changed = true;
  while (changed) {
    changed = false;
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      for (std::uint32_t i = 0; i < table->count(c); ++i) {
        if (!flags[c][i]) continue;
        for (ArrowId f : cat.arrows_into(c)) {
          auto slot = flags[cat.src(f)][table->pullback_index(f, i)];
          if (!slot) {
            flags[cat.src(f)][table->pullback_index(f, i)] = true;
            changed = true;
          }
        }
      }
    }
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      for (std::uint32_t i = 0; i < table->count(c); ++i) {
        if (!flags[c][i]) continue;
        const Sieve& s = table->sieves(c)[i];
        for (std::uint32_t r = 0; r < table->count(c); ++r) {
          if (flags[c][r]) continue;
          bool locally_covering = true;
          for (ArrowId f : s.arrows()) {
            if (!flags[cat.src(f)][table->pullback_index(f, r)]) {
              locally_covering = false;
              break;
            }
          }
          if (locally_covering) {
            flags[c][r] = true;
            changed = true;
          }
        }
      }
    }
  }
  return GrothTopology(table, std::move(flags));
}

std::vector<Sieve> sieves_of_mono(const PresheafMap& mono) {
  if (!is_mono(mono)) {
    throw Error(ErrorCode::NotAMono, "sieve normalization asked of a non-mono");
  }
  const Presheaf& b = mono.target();
  const FinCat& cat = *b.base();
  Subobject s = subobject_of_map(mono);
  std::vector<Sieve> out;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t x = 0; x < b.card(c); ++x) {
      std::vector<ArrowId> members;
      for (ArrowId f : cat.arrows_into(c)) {
        if (s.contains(cat.src(f), b.act(f, x))) members.push_back(f);
      }
      out.emplace_back(b.base(), c, std::move(members));
    }
  }
  return out;
}

GrothTopology generate(const FinCatPtr& base,
                       const std::vector<PresheafMap>& monos) {
  std::vector<Sieve> sieves;
  for (const auto& m : monos) {
    auto induced = sieves_of_mono(m);
    sieves.insert(sieves.end(), induced.begin(), induced.end());
  }
  return generate_from_sieves(base, sieves);
}

bool mono_in_topology(const GrothTopology& g, const PresheafMap& mono) {
  const SieveTable& table = *g.table();
  for (const Sieve& s : sieves_of_mono(mono)) {
    if (!g.covers(s.target(), table.index_of(s))) return false;
  }
  return true;
}

LTTopology::LTTopology(OmegaObject om, PresheafMap j)
    : omega_(std::move(om)), j_(std::move(j)) {
  if (j_.source() != omega_.omega || j_.target() != omega_.omega) {
    throw Error(ErrorCode::ShapeMismatch, "operator is not an endomorphism of Omega");
  }
  check_invariants();
}

void LTTopology::check_invariants() const {
  const SieveTable& table = *omega_.table;
  const FinCat& cat = *table.base();
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    const auto& sieves = table.sieves(c);
    for (std::uint32_t i = 0; i < sieves.size(); ++i) {
      if (!sieve_leq(sieves[i], sieves[j_.at(c, i)])) {
        throw Error(ErrorCode::NotAClosureOperator,
                    "operator is not inflating at " + sieve_label(table, c, i));
      }
      if (j_.at(c, j_.at(c, i)) != j_.at(c, i)) {
        throw Error(ErrorCode::NotAClosureOperator,
                    "operator is not idempotent at " + sieve_label(table, c, i));
      }
      for (std::uint32_t k = 0; k < sieves.size(); ++k) {
        if (sieve_leq(sieves[i], sieves[k]) &&
            !sieve_leq(sieves[j_.at(c, i)], sieves[j_.at(c, k)])) {
          throw Error(ErrorCode::NotAClosureOperator,
                      "operator is not monotone between " +
                          sieve_label(table, c, i) + " and " +
                          sieve_label(table, c, k));
        }
      }
    }
  }
}

LTTopology groth_to_lt(const GrothTopology& g) {
  OmegaObject om = omega(g.base());
  // The covering sieves form a subobject of Omega (stability is exactly
  // action-closure); j is its characteristic map.
  std::vector<std::vector<bool>> sel = g.cover_flags();
  Subobject covering_sub(om.omega, std::move(sel));
  PresheafMap j = classify(om, covering_sub);
  return LTTopology(std::move(om), std::move(j));
}

GrothTopology lt_to_groth(const LTTopology& lt) {
  const SieveTable& table = *lt.omega().table;
  std::vector<std::vector<bool>> flags(table.base()->object_count());
  for (ObjId c = 0; c < flags.size(); ++c) {
    flags[c].resize(table.count(c));
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      flags[c][i] = lt.apply(c, i) == table.maximal_index(c);
    }
  }
  return GrothTopology(lt.omega().table, std::move(flags));
}

bool lt_leq(const LTTopology& a, const LTTopology& b) {
  const SieveTable& table = *a.omega().table;
  for (ObjId c = 0; c < table.base()->object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (!sieve_leq(table.sieves(c)[a.apply(c, i)],
                     table.sieves(c)[b.apply(c, i)])) {
        return false;
      }
    }
  }
  return true;
}

bool topology_leq(const GrothTopology& a, const GrothTopology& b) {
  for (ObjId c = 0; c < a.cover_flags().size(); ++c) {
    for (std::uint32_t i = 0; i < a.cover_flags()[c].size(); ++i) {
      if (a.covers(c, i) && !b.covers(c, i)) return false;
    }
  }
  return true;
}

std::vector<GrothTopology> enumerate_topologies(const FinCatPtr& base) {
  SieveTablePtr table = sieve_table(base);
  const FinCat& cat = *base;

  // Optional sieve slots: everything except the forced maximal sieves.
  std::vector<std::pair<ObjId, std::uint32_t>> slots;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i + 1 < table->count(c); ++i) slots.push_back({c, i});
  }
  if (slots.size() >= 8 * sizeof(std::size_t)) {
    throw Error(ErrorCode::SizeCapExceeded,
                "too many sieves for exhaustive topology enumeration");
  }
  require_within_cap(std::size_t(1) << slots.size(), caps().max_enumeration,
                     "topology enumeration");

  std::vector<GrothTopology> out;
  for (std::size_t mask = 0; mask < (std::size_t(1) << slots.size()); ++mask) {
    std::vector<std::vector<bool>> flags(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      flags[c].assign(table->count(c), false);
      flags[c][table->maximal_index(c)] = true;
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (mask & (std::size_t(1) << k)) flags[slots[k].first][slots[k].second] = true;
    }
    if (covers_satisfy_axioms(*table, flags)) {
      out.emplace_back(table, std::move(flags));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GrothTopology& a, const GrothTopology& b) {
              return a.flat_key() < b.flat_key();
            });
  return out;
}

std::vector<LTTopology> enumerate_closure_operators(const FinCatPtr& base) {
  OmegaObject om = omega(base);
  const SieveTable& table = *om.table;
  const FinCat& cat = *base;

  // Per object: all pointwise closure operators on the sieve poset,
  // identified with the subsets of closed points for which every sieve has
  // a least closed sieve above it.
  std::vector<std::vector<std::vector<std::uint32_t>>> pointwise(
      cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    const auto& sieves = table.sieves(c);
    const std::uint32_t n = table.count(c);
    if (n >= 8 * sizeof(std::size_t)) {
      throw Error(ErrorCode::SizeCapExceeded,
                  "too many sieves for closure-operator enumeration");
    }
    require_within_cap(std::size_t(1) << n, caps().max_enumeration,
                       "closure-operator enumeration");
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      if (!(mask & (std::size_t(1) << table.maximal_index(c)))) continue;
      std::vector<std::uint32_t> op(n);
      bool good = true;
      for (std::uint32_t i = 0; i < n && good; ++i) {
        // Least closed sieve above sieve i, if it exists.
        std::uint32_t best = std::uint32_t(-1);
        for (std::uint32_t k = 0; k < n; ++k) {
          if (!(mask & (std::size_t(1) << k))) continue;
          if (!sieve_leq(sieves[i], sieves[k])) continue;
          if (best == std::uint32_t(-1) || sieve_leq(sieves[k], sieves[best])) {
            best = k;
          }
        }
        if (best == std::uint32_t(-1)) {
          good = false;
          break;
        }
        for (std::uint32_t k = 0; k < n; ++k) {
          if (!(mask & (std::size_t(1) << k))) continue;
          if (sieve_leq(sieves[i], sieves[k]) && !sieve_leq(sieves[best], sieves[k])) {
            good = false;  // no least element: incomparable closed bounds
            break;
          }
        }
        op[i] = best;
      }
      if (good) pointwise[c].push_back(std::move(op));
    }
  }

  // Product over objects, filtered by naturality.
  std::vector<LTTopology> out;
  std::vector<std::size_t> pick(cat.object_count(), 0);
  std::size_t visited = 0;
  while (true) {
    ++visited;
    require_within_cap(visited, caps().max_enumeration,
                       "closure-operator product");
    bool natural = true;
    for (ArrowId f = 0; f < cat.arrow_count() && natural; ++f) {
      ObjId a = cat.src(f), b = cat.dst(f);
      const auto& ja = pointwise[a][pick[a]];
      const auto& jb = pointwise[b][pick[b]];
      for (std::uint32_t i = 0; i < table.count(b); ++i) {
        if (ja[table.pullback_index(f, i)] != table.pullback_index(f, jb[i])) {
          natural = false;
          break;
        }
      }
    }
    if (natural) {
      std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
      for (ObjId c = 0; c < cat.object_count(); ++c) comp[c] = pointwise[c][pick[c]];
      PresheafMap j(om.omega, om.omega, std::move(comp));
      out.emplace_back(om, std::move(j));
    }
    // Odometer.
    ObjId c = 0;
    while (c < cat.object_count() && ++pick[c] == pointwise[c].size()) {
      pick[c] = 0;
      ++c;
    }
    if (c == cat.object_count()) break;
  }
  std::sort(out.begin(), out.end(), [](const LTTopology& a, const LTTopology& b) {
    for (ObjId c = 0; c < a.j().source().base()->object_count(); ++c) {
      if (a.j().component(c) != b.j().component(c)) {
        return a.j().component(c) < b.j().component(c);
      }
    }
    return false;
  });
  return out;
}

GrothTopology topology_meet(const GrothTopology& a, const GrothTopology& b) {
  std::vector<std::vector<bool>> flags = a.cover_flags();
  for (ObjId c = 0; c < flags.size(); ++c) {
    for (std::uint32_t i = 0; i < flags[c].size(); ++i) {
      flags[c][i] = flags[c][i] && b.covers(c, i);
    }
  }
  return GrothTopology(a.table(), std::move(flags));
}

GrothTopology topology_join(const GrothTopology& a, const GrothTopology& b) {
  std::vector<Sieve> sieves;
  for (ObjId c = 0; c < a.cover_flags().size(); ++c) {
    for (std::uint32_t i = 0; i < a.cover_flags()[c].size(); ++i) {
      if (a.covers(c, i) || b.covers(c, i)) {
        sieves.push_back(a.table()->sieves(c)[i]);
      }
    }
  }
  return generate_from_sieves(a.base(), sieves);
}

bool CoveringClass::member(const PresheafMap& f) const {
  ImageFactorization fact = image_factorization(f);
  return mono_in_topology(topology_, fact.im);
}

CoveringClass covering_class(const GrothTopology& g) { return CoveringClass(g); }

}  // namespace toposcalc
