#include "toposcalc/classifier.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "toposcalc/caps.hpp"

namespace toposcalc {

Subobject::Subobject(Presheaf ambient, std::vector<std::vector<bool>> selected)
    : ambient_(std::move(ambient)), selected_(std::move(selected)) {
  const FinCat& cat = *ambient_.base();
  if (selected_.size() != cat.object_count()) {
    throw Error(ErrorCode::ShapeMismatch, "subobject selection has wrong size");
  }
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    if (selected_[o].size() != ambient_.card(o)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "subobject selection at '" + cat.object_name(o) +
                      "' has wrong length");
    }
  }
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    for (std::uint32_t x = 0; x < ambient_.card(b); ++x) {
      if (selected_[b][x] && !selected_[a][ambient_.act(f, x)]) {
        throw Error(ErrorCode::ValidationError,
                    "selection is not closed under the action of '" +
                        cat.arrow_name(f) + "'");
      }
    }
  }
}

std::size_t Subobject::total_selected() const {
  std::size_t n = 0;
  for (const auto& v : selected_) n += std::size_t(std::count(v.begin(), v.end(), true));
  return n;
}

bool Subobject::is_whole() const {
  return total_selected() == ambient_.total_elements();
}

bool Subobject::is_empty() const { return total_selected() == 0; }

std::vector<bool> Subobject::flat_key() const {
  std::vector<bool> key;
  for (const auto& v : selected_) key.insert(key.end(), v.begin(), v.end());
  return key;
}

bool Subobject::operator==(const Subobject& other) const {
  return ambient_ == other.ambient_ && selected_ == other.selected_;
}

bool Subobject::operator<(const Subobject& other) const {
  return flat_key() < other.flat_key();
}

Subobject whole_subobject(const Presheaf& a) {
  std::vector<std::vector<bool>> sel(a.base()->object_count());
  for (ObjId o = 0; o < sel.size(); ++o) sel[o].assign(a.card(o), true);
  return Subobject(a, std::move(sel));
}

Subobject empty_subobject(const Presheaf& a) {
  std::vector<std::vector<bool>> sel(a.base()->object_count());
  for (ObjId o = 0; o < sel.size(); ++o) sel[o].assign(a.card(o), false);
  return Subobject(a, std::move(sel));
}

bool subobject_leq(const Subobject& s, const Subobject& t) {
  for (ObjId o = 0; o < s.selection().size(); ++o) {
    for (std::uint32_t x = 0; x < s.selection()[o].size(); ++x) {
      if (s.contains(o, x) && !t.contains(o, x)) return false;
    }
  }
  return true;
}

Subobject subobject_meet(const Subobject& s, const Subobject& t) {
  std::vector<std::vector<bool>> sel = s.selection();
  for (ObjId o = 0; o < sel.size(); ++o) {
    for (std::uint32_t x = 0; x < sel[o].size(); ++x) {
      sel[o][x] = sel[o][x] && t.contains(o, x);
    }
  }
  return Subobject(s.ambient(), std::move(sel));
}

Subobject subobject_join(const Subobject& s, const Subobject& t) {
  std::vector<std::vector<bool>> sel = s.selection();
  for (ObjId o = 0; o < sel.size(); ++o) {
    for (std::uint32_t x = 0; x < sel[o].size(); ++x) {
      sel[o][x] = sel[o][x] || t.contains(o, x);
    }
  }
  return Subobject(s.ambient(), std::move(sel));
}

PresheafMap mono_of_subobject(const Subobject& s) {
  const Presheaf& a = s.ambient();
  const FinCat& cat = *a.base();
  std::vector<std::vector<std::uint32_t>> elems(cat.object_count());
  std::vector<std::vector<std::uint32_t>> where(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    where[o].assign(a.card(o), 0);
    for (std::uint32_t x = 0; x < a.card(o); ++x) {
      if (s.contains(o, x)) {
        where[o][x] = std::uint32_t(elems[o].size());
        elems[o].push_back(x);
      }
    }
  }
  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    card[o] = std::uint32_t(elems[o].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId aa = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      action[f][i] = where[aa][a.act(f, elems[b][i])];
    }
  }
  Presheaf sub(a.base(), std::move(card), std::move(action));
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) comp[o] = elems[o];
  return PresheafMap(std::move(sub), a, std::move(comp));
}

Subobject subobject_of_map(const PresheafMap& m) {
  const Presheaf& b = m.target();
  std::vector<std::vector<bool>> sel(b.base()->object_count());
  for (ObjId o = 0; o < sel.size(); ++o) {
    sel[o].assign(b.card(o), false);
    for (std::uint32_t x = 0; x < m.source().card(o); ++x) {
      sel[o][m.at(o, x)] = true;
    }
  }
  return Subobject(b, std::move(sel));
}

Subobject subobject_preimage(const PresheafMap& f, const Subobject& s) {
  if (f.target() != s.ambient()) {
    throw Error(ErrorCode::ShapeMismatch, "preimage along a map into another object");
  }
  std::vector<std::vector<bool>> sel(f.source().base()->object_count());
  for (ObjId o = 0; o < sel.size(); ++o) {
    sel[o].resize(f.source().card(o));
    for (std::uint32_t x = 0; x < f.source().card(o); ++x) {
      sel[o][x] = s.contains(o, f.at(o, x));
    }
  }
  return Subobject(f.source(), std::move(sel));
}

namespace {

// Closes a flat selection under the full arrow action. One pass suffices
// because the arrow set is closed under composition and contains identities.
void close_selection(const Presheaf& a, std::vector<std::vector<bool>>& sel) {
  const FinCat& cat = *a.base();
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId s = cat.src(f), d = cat.dst(f);
    for (std::uint32_t x = 0; x < a.card(d); ++x) {
      if (sel[d][x]) sel[s][a.act(f, x)] = true;
    }
  }
}

}  // namespace

std::vector<Subobject> subobjects(const Presheaf& a) {
  const FinCat& cat = *a.base();
  std::vector<std::vector<std::vector<bool>>> found;
  std::set<std::vector<bool>> seen;

  auto flat = [&](const std::vector<std::vector<bool>>& sel) {
    std::vector<bool> key;
    for (const auto& v : sel) key.insert(key.end(), v.begin(), v.end());
    return key;
  };

  std::vector<std::vector<bool>> empty(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) empty[o].assign(a.card(o), false);
  found.push_back(empty);
  seen.insert(flat(empty));

  for (std::size_t i = 0; i < found.size(); ++i) {
    auto current = found[i];
    for (ObjId o = 0; o < cat.object_count(); ++o) {
      for (std::uint32_t x = 0; x < a.card(o); ++x) {
        if (current[o][x]) continue;
        auto next = current;
        next[o][x] = true;
        close_selection(a, next);
        if (seen.insert(flat(next)).second) {
          require_within_cap(seen.size(), caps().max_enumeration,
                             "subobject enumeration");
          found.push_back(std::move(next));
        }
      }
    }
  }

  std::sort(found.begin(), found.end(),
            [&](const auto& x, const auto& y) { return flat(x) < flat(y); });
  std::vector<Subobject> out;
  out.reserve(found.size());
  for (auto& sel : found) out.emplace_back(a, std::move(sel));
  return out;
}

Sieve::Sieve(FinCatPtr base, ObjId target, std::vector<ArrowId> arrows)
    : base_(std::move(base)), target_(target), arrows_(std::move(arrows)) {
  std::sort(arrows_.begin(), arrows_.end());
  arrows_.erase(std::unique(arrows_.begin(), arrows_.end()), arrows_.end());
  const FinCat& cat = *base_;
  for (ArrowId g : arrows_) {
    if (cat.dst(g) != target_) {
      throw Error(ErrorCode::ValidationError,
                  "sieve member '" + cat.arrow_name(g) + "' does not land in '" +
                      cat.object_name(target_) + "'");
    }
  }
  for (ArrowId g : arrows_) {
    for (ArrowId h = 0; h < cat.arrow_count(); ++h) {
      if (cat.dst(h) != cat.src(g)) continue;
      if (!contains(cat.compose(h, g))) {
        throw Error(ErrorCode::ValidationError,
                    "arrow set is not precomposition-closed at '" +
                        cat.arrow_name(g) + "'");
      }
    }
  }
}

bool Sieve::contains(ArrowId f) const {
  return std::binary_search(arrows_.begin(), arrows_.end(), f);
}

bool Sieve::operator==(const Sieve& other) const {
  return same_site(base_, other.base_) && target_ == other.target_ &&
         arrows_ == other.arrows_;
}

Sieve maximal_sieve(const FinCatPtr& base, ObjId c) {
  return Sieve(base, c, base->arrows_into(c));
}

Sieve empty_sieve(const FinCatPtr& base, ObjId c) { return Sieve(base, c, {}); }

Sieve generated_sieve(const FinCatPtr& base, ObjId c,
                      const std::vector<ArrowId>& generators) {
  const FinCat& cat = *base;
  std::vector<ArrowId> members;
  for (ArrowId g : generators) {
    if (cat.dst(g) != c) {
      throw Error(ErrorCode::ValidationError,
                  "sieve generator '" + cat.arrow_name(g) + "' does not land in '" +
                      cat.object_name(c) + "'");
    }
    for (ArrowId h = 0; h < cat.arrow_count(); ++h) {
      if (cat.dst(h) == cat.src(g)) members.push_back(cat.compose(h, g));
    }
  }
  return Sieve(base, c, std::move(members));
}

Sieve pullback_sieve(ArrowId f, const Sieve& s) {
  const FinCat& cat = *s.base();
  if (cat.dst(f) != s.target()) {
    throw Error(ErrorCode::ValidationError, "pullback arrow does not hit the sieve");
  }
  std::vector<ArrowId> members;
  for (ArrowId g = 0; g < cat.arrow_count(); ++g) {
    if (cat.dst(g) != cat.src(f)) continue;
    if (s.contains(cat.compose(g, f))) members.push_back(g);
  }
  return Sieve(s.base(), cat.src(f), std::move(members));
}

bool sieve_leq(const Sieve& s, const Sieve& t) {
  return std::includes(t.arrows().begin(), t.arrows().end(), s.arrows().begin(),
                       s.arrows().end());
}

Sieve sieve_intersection(const Sieve& s, const Sieve& t) {
  std::vector<ArrowId> members;
  std::set_intersection(s.arrows().begin(), s.arrows().end(), t.arrows().begin(),
                        t.arrows().end(), std::back_inserter(members));
  return Sieve(s.base(), s.target(), std::move(members));
}

Presheaf sieve_presheaf(const Sieve& s) {
  const FinCat& cat = *s.base();
  std::vector<std::vector<ArrowId>> elems(cat.object_count());
  for (ArrowId g : s.arrows()) elems[cat.src(g)].push_back(g);
  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    card[o] = std::uint32_t(elems[o].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      ArrowId gf = cat.compose(f, elems[b][i]);
      auto it = std::find(elems[a].begin(), elems[a].end(), gf);
      action[f][i] = std::uint32_t(it - elems[a].begin());
    }
  }
  return Presheaf(s.base(), std::move(card), std::move(action));
}

PresheafMap sieve_mono(const Sieve& s) {
  const FinCat& cat = *s.base();
  Presheaf sub = sieve_presheaf(s);
  Presheaf amb = yoneda(s.base(), s.target());
  std::vector<std::vector<ArrowId>> elems(cat.object_count());
  for (ArrowId g : s.arrows()) elems[cat.src(g)].push_back(g);
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    comp[o].resize(elems[o].size());
    for (std::uint32_t i = 0; i < elems[o].size(); ++i) {
      comp[o][i] = yoneda_index(cat, s.target(), elems[o][i]);
    }
  }
  return PresheafMap(std::move(sub), std::move(amb), std::move(comp));
}

SieveTable::SieveTable(FinCatPtr base) : base_(std::move(base)) {
  const FinCat& cat = *base_;
  sieves_.resize(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    auto into = cat.arrows_into(c);
    // BFS over precomposition-closed arrow sets, then canonical bit order.
    std::set<std::vector<bool>> seen;
    std::vector<std::vector<bool>> masks;
    std::vector<bool> none(into.size(), false);
    masks.push_back(none);
    seen.insert(none);
    auto close = [&](std::vector<bool>& mask) {
      for (std::size_t i = 0; i < into.size(); ++i) {
        if (!mask[i]) continue;
        for (ArrowId h = 0; h < cat.arrow_count(); ++h) {
          if (cat.dst(h) != cat.src(into[i])) continue;
          ArrowId composite = cat.compose(h, into[i]);
          auto it = std::find(into.begin(), into.end(), composite);
          mask[it - into.begin()] = true;
        }
      }
    };
    for (std::size_t i = 0; i < masks.size(); ++i) {
      auto current = masks[i];
      for (std::size_t x = 0; x < into.size(); ++x) {
        if (current[x]) continue;
        auto next = current;
        next[x] = true;
        close(next);
        if (seen.insert(next).second) {
          require_within_cap(seen.size(), caps().max_enumeration,
                             "sieve enumeration");
          masks.push_back(std::move(next));
        }
      }
    }
    std::sort(masks.begin(), masks.end());
    for (const auto& mask : masks) {
      std::vector<ArrowId> members;
      for (std::size_t i = 0; i < into.size(); ++i) {
        if (mask[i]) members.push_back(into[i]);
      }
      sieves_[c].emplace_back(base_, c, std::move(members));
    }
  }

  pullback_.resize(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId b = cat.dst(f);
    pullback_[f].resize(sieves_[b].size());
    for (std::uint32_t i = 0; i < sieves_[b].size(); ++i) {
      pullback_[f][i] = index_of(pullback_sieve(f, sieves_[b][i]));
    }
  }
}

std::uint32_t SieveTable::index_of(const Sieve& s) const {
  const auto& list = sieves_[s.target()];
  for (std::uint32_t i = 0; i < list.size(); ++i) {
    if (list[i].arrows() == s.arrows()) return i;
  }
  throw Error(ErrorCode::ValidationError, "sieve not present in the table");
}

SieveTablePtr sieve_table(const FinCatPtr& base) {
  static std::mutex mu;
  static std::map<const FinCat*, std::weak_ptr<const SieveTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[base.get()];
  if (auto existing = slot.lock()) return existing;
  auto fresh = std::make_shared<const SieveTable>(base);
  slot = fresh;
  return fresh;
}

OmegaObject omega(const FinCatPtr& base) {
  SieveTablePtr table = sieve_table(base);
  const FinCat& cat = *base;
  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) card[c] = table->count(c);
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    action[f].resize(card[cat.dst(f)]);
    for (std::uint32_t i = 0; i < action[f].size(); ++i) {
      action[f][i] = table->pullback_index(f, i);
    }
  }
  Presheaf om(base, std::move(card), std::move(action));
  Presheaf one = terminal_presheaf(base);
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp[c] = {table->maximal_index(c)};
  }
  PresheafMap truth(std::move(one), om, std::move(comp));
  return OmegaObject{std::move(table), std::move(om), std::move(truth)};
}

PresheafMap classify(const OmegaObject& om, const Subobject& s) {
  const Presheaf& a = s.ambient();
  const FinCat& cat = *a.base();
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp[c].resize(a.card(c));
    for (std::uint32_t x = 0; x < a.card(c); ++x) {
      std::vector<ArrowId> members;
      for (ArrowId f : cat.arrows_into(c)) {
        if (s.contains(cat.src(f), a.act(f, x))) members.push_back(f);
      }
      comp[c][x] = om.table->index_of(Sieve(a.base(), c, std::move(members)));
    }
  }
  return PresheafMap(a, om.omega, std::move(comp));
}

Subobject pullback_truth(const OmegaObject& om, const PresheafMap& chi) {
  if (chi.target() != om.omega) {
    throw Error(ErrorCode::ShapeMismatch, "map does not land in Omega");
  }
  const Presheaf& a = chi.source();
  std::vector<std::vector<bool>> sel(a.base()->object_count());
  for (ObjId c = 0; c < sel.size(); ++c) {
    sel[c].resize(a.card(c));
    for (std::uint32_t x = 0; x < a.card(c); ++x) {
      sel[c][x] = chi.at(c, x) == om.table->maximal_index(c);
    }
  }
  return Subobject(a, std::move(sel));
}

bool is_univalent(const OmegaObject& om, const PresheafMap& mono) {
  if (!is_mono(mono)) {
    throw Error(ErrorCode::NotAMono, "univalence asked of a non-mono");
  }
  return is_mono(classify(om, subobject_of_map(mono)));
}

namespace {

// Rewrites a mono u as a base change of a univalent mono: factor the
// characteristic map of u through its image and pull the truth back.
PresheafMap univalentize(const OmegaObject& om, const PresheafMap& u) {
  PresheafMap chi = classify(om, subobject_of_map(u));
  ImageFactorization fact = image_factorization(chi);
  // fact.im : D -> Omega is monic; C = im^{-1}(t) <= D.
  const Presheaf& d = fact.im.source();
  std::vector<std::vector<bool>> sel(d.base()->object_count());
  for (ObjId c = 0; c < sel.size(); ++c) {
    sel[c].resize(d.card(c));
    for (std::uint32_t x = 0; x < d.card(c); ++x) {
      sel[c][x] = fact.im.at(c, x) == om.table->maximal_index(c);
    }
  }
  return mono_of_subobject(Subobject(d, std::move(sel)));
}

}  // namespace

PresheafMap univalent_generator(const OmegaObject& om,
                                const std::vector<PresheafMap>& monos) {
  for (const auto& m : monos) {
    if (!is_mono(m)) {
      throw Error(ErrorCode::NotAMono, "generation set contains a non-mono");
    }
  }
  // Coproduct of the univalentized members, itself rewritten as a base
  // change of a univalent mono.
  Presheaf top = initial_presheaf(om.omega.base());
  Presheaf bottom = top;
  PresheafMap alpha(top, bottom, std::vector<std::vector<std::uint32_t>>(
                                     om.omega.base()->object_count()));
  bool first = true;
  for (const auto& m : monos) {
    PresheafMap piece = univalentize(om, m);
    if (first) {
      alpha = piece;
      first = false;
      continue;
    }
    CoproductResult tops = coproduct(alpha.source(), piece.source());
    CoproductResult bottoms = coproduct(alpha.target(), piece.target());
    std::vector<std::vector<std::uint32_t>> comp(om.omega.base()->object_count());
    for (ObjId c = 0; c < comp.size(); ++c) {
      comp[c].resize(tops.apex.card(c));
      for (std::uint32_t x = 0; x < alpha.source().card(c); ++x) {
        comp[c][tops.in_left.at(c, x)] = bottoms.in_left.at(c, alpha.at(c, x));
      }
      for (std::uint32_t x = 0; x < piece.source().card(c); ++x) {
        comp[c][tops.in_right.at(c, x)] = bottoms.in_right.at(c, piece.at(c, x));
      }
    }
    alpha = PresheafMap(tops.apex, bottoms.apex, std::move(comp));
  }
  PresheafMap generator = univalentize(om, alpha);

  // Every member of the generation set must be a base change of the result.
  PresheafMap chi_t = classify(om, subobject_of_map(generator));
  for (const auto& m : monos) {
    PresheafMap chi_m = classify(om, subobject_of_map(m));
    if (!factor_through_mono(chi_m, chi_t).has_value()) {
      throw Error(ErrorCode::NotLocal,
                  "generation set member is not a base change of the generator");
    }
  }
  return generator;
}

}  // namespace toposcalc
