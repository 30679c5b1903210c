#include "toposcalc/presheaf.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "toposcalc/caps.hpp"

namespace toposcalc {

Presheaf::Presheaf(FinCatPtr base, std::vector<std::uint32_t> card,
                   std::vector<std::vector<std::uint32_t>> action)
    : base_(std::move(base)), card_(std::move(card)), action_(std::move(action)) {
  if (card_.size() != base_->object_count() ||
      action_.size() != base_->arrow_count()) {
    throw Error(ErrorCode::ShapeMismatch, "presheaf tables have wrong size");
  }
  for (ObjId o = 0; o < card_.size(); ++o) {
    require_within_cap(card_[o], caps().max_elements_per_object,
                       "presheaf carrier");
  }
  check_invariants();
}

std::size_t Presheaf::total_elements() const {
  return std::accumulate(card_.begin(), card_.end(), std::size_t(0));
}

void Presheaf::check_invariants() const {
  const FinCat& cat = *base_;
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    if (action_[f].size() != card_[cat.dst(f)]) {
      throw Error(ErrorCode::ShapeMismatch,
                  "action table for '" + cat.arrow_name(f) + "' has wrong length");
    }
    for (std::uint32_t x : action_[f]) {
      if (x >= card_[cat.src(f)]) {
        throw Error(ErrorCode::ValidationError,
                    "action for '" + cat.arrow_name(f) + "' lands out of range");
      }
    }
  }
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    ArrowId id = cat.identity(o);
    for (std::uint32_t x = 0; x < card_[o]; ++x) {
      if (action_[id][x] != x) {
        throw Error(ErrorCode::ValidationError,
                    "identity action is not the identity at '" +
                        cat.object_name(o) + "'");
      }
    }
  }
  // Contravariance: X(f then g) = X(f) . X(g).
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    for (ArrowId g = 0; g < cat.arrow_count(); ++g) {
      if (!cat.composable(f, g)) continue;
      ArrowId h = cat.compose(f, g);
      for (std::uint32_t x = 0; x < card_[cat.dst(g)]; ++x) {
        if (action_[h][x] != action_[f][action_[g][x]]) {
          throw Error(ErrorCode::ValidationError,
                      "contravariance fails on (" + cat.arrow_name(f) + ", " +
                          cat.arrow_name(g) + ")");
        }
      }
    }
  }
}

bool Presheaf::operator==(const Presheaf& other) const {
  return same_site(base_, other.base_) && card_ == other.card_ &&
         action_ == other.action_;
}

Presheaf terminal_presheaf(FinCatPtr base) {
  return discrete_presheaf(std::move(base), 1);
}

Presheaf initial_presheaf(FinCatPtr base) {
  return discrete_presheaf(std::move(base), 0);
}

Presheaf discrete_presheaf(FinCatPtr base, std::uint32_t n) {
  std::vector<std::uint32_t> card(base->object_count(), n);
  std::vector<std::vector<std::uint32_t>> action(base->arrow_count());
  for (ArrowId f = 0; f < base->arrow_count(); ++f) {
    action[f].resize(n);
    for (std::uint32_t x = 0; x < n; ++x) action[f][x] = x;
  }
  return Presheaf(std::move(base), std::move(card), std::move(action));
}

std::uint32_t yoneda_index(const FinCat& cat, ObjId c, ArrowId f) {
  auto arrows = cat.hom(cat.src(f), c);
  auto it = std::find(arrows.begin(), arrows.end(), f);
  if (it == arrows.end()) {
    throw Error(ErrorCode::UnknownArrow, "arrow does not land in the object");
  }
  return std::uint32_t(it - arrows.begin());
}

ArrowId yoneda_arrow(const FinCat& cat, ObjId c, ObjId at, std::uint32_t index) {
  auto arrows = cat.hom(at, c);
  return arrows.at(index);
}

Presheaf yoneda(const FinCatPtr& base, ObjId c) {
  if (c >= base->object_count()) {
    throw Error(ErrorCode::UnknownObject, "yoneda object out of range");
  }
  const FinCat& cat = *base;
  std::vector<std::uint32_t> card(cat.object_count());
  std::vector<std::vector<ArrowId>> homs(cat.object_count());
  for (ObjId b = 0; b < cat.object_count(); ++b) {
    homs[b] = cat.hom(b, c);
    card[b] = std::uint32_t(homs[b].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      ArrowId g = homs[b][i];               // g: b -> c
      ArrowId gf = cat.compose(f, g);       // f then g : a -> c
      auto it = std::find(homs[a].begin(), homs[a].end(), gf);
      action[f][i] = std::uint32_t(it - homs[a].begin());
    }
  }
  return Presheaf(base, std::move(card), std::move(action));
}

PresheafMap::PresheafMap(Presheaf source, Presheaf target,
                         std::vector<std::vector<std::uint32_t>> components)
    : source_(std::move(source)),
      target_(std::move(target)),
      components_(std::move(components)) {
  if (!same_site(source_.base(), target_.base())) {
    throw Error(ErrorCode::ShapeMismatch, "map endpoints live on different sites");
  }
  if (components_.size() != source_.base()->object_count()) {
    throw Error(ErrorCode::ShapeMismatch, "map component table has wrong size");
  }
  check_invariants();
}

void PresheafMap::check_invariants() const {
  const FinCat& cat = *source_.base();
  for (ObjId o = 0; o < cat.object_count(); ++o) {
    if (components_[o].size() != source_.card(o)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "component at '" + cat.object_name(o) + "' has wrong length");
    }
    for (std::uint32_t y : components_[o]) {
      if (y >= target_.card(o)) {
        throw Error(ErrorCode::ValidationError,
                    "component at '" + cat.object_name(o) + "' lands out of range");
      }
    }
  }
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    for (std::uint32_t x = 0; x < source_.card(b); ++x) {
      if (components_[a][source_.act(f, x)] != target_.act(f, components_[b][x])) {
        throw Error(ErrorCode::ValidationError,
                    "naturality fails at '" + cat.arrow_name(f) + "'");
      }
    }
  }
}

bool PresheafMap::operator==(const PresheafMap& other) const {
  return source_ == other.source_ && target_ == other.target_ &&
         components_ == other.components_;
}

PresheafMap identity_map(const Presheaf& x) {
  std::vector<std::vector<std::uint32_t>> comp(x.base()->object_count());
  for (ObjId o = 0; o < x.base()->object_count(); ++o) {
    comp[o].resize(x.card(o));
    for (std::uint32_t i = 0; i < x.card(o); ++i) comp[o][i] = i;
  }
  return PresheafMap(x, x, std::move(comp));
}

PresheafMap compose_maps(const PresheafMap& first, const PresheafMap& second) {
  if (first.target() != second.source()) {
    throw Error(ErrorCode::ShapeMismatch, "maps are not composable");
  }
  std::vector<std::vector<std::uint32_t>> comp(first.source().base()->object_count());
  for (ObjId o = 0; o < comp.size(); ++o) {
    comp[o].resize(first.source().card(o));
    for (std::uint32_t x = 0; x < comp[o].size(); ++x) {
      comp[o][x] = second.at(o, first.at(o, x));
    }
  }
  return PresheafMap(first.source(), second.target(), std::move(comp));
}

PresheafMap terminal_map(const Presheaf& x) {
  Presheaf one = terminal_presheaf(x.base());
  std::vector<std::vector<std::uint32_t>> comp(x.base()->object_count());
  for (ObjId o = 0; o < comp.size(); ++o) comp[o].assign(x.card(o), 0);
  return PresheafMap(x, std::move(one), std::move(comp));
}

PresheafMap initial_map(const Presheaf& x) {
  Presheaf zero = initial_presheaf(x.base());
  std::vector<std::vector<std::uint32_t>> comp(x.base()->object_count());
  return PresheafMap(std::move(zero), x, std::move(comp));
}

PresheafMap constant_map(const Presheaf& x, const Presheaf& y,
                         std::uint32_t point) {
  std::vector<std::vector<std::uint32_t>> comp(x.base()->object_count());
  for (ObjId o = 0; o < comp.size(); ++o) comp[o].assign(x.card(o), point);
  return PresheafMap(x, y, std::move(comp));
}

Diagram::Diagram(FinCatPtr shape, std::vector<Presheaf> nodes,
                 std::vector<PresheafMap> edges, FinCatPtr site)
    : shape_(std::move(shape)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      site_(std::move(site)) {
  if (nodes_.size() != shape_->object_count() ||
      edges_.size() != shape_->arrow_count()) {
    throw Error(ErrorCode::ShapeMismatch, "diagram tables have wrong size");
  }
  if (!nodes_.empty()) {
    if (site_ == nullptr) site_ = nodes_[0].base();
    if (!same_site(site_, nodes_[0].base())) {
      throw Error(ErrorCode::ShapeMismatch, "diagram site disagrees with nodes");
    }
  } else if (site_ == nullptr) {
    throw Error(ErrorCode::ShapeMismatch,
                "empty diagram needs an explicit ambient site");
  }
  for (ArrowId s = 0; s < shape_->arrow_count(); ++s) {
    if (edges_[s].source() != nodes_[shape_->src(s)] ||
        edges_[s].target() != nodes_[shape_->dst(s)]) {
      throw Error(ErrorCode::ShapeMismatch,
                  "diagram edge '" + shape_->arrow_name(s) + "' has wrong endpoints");
    }
  }
  for (ObjId j = 0; j < shape_->object_count(); ++j) {
    if (edges_[shape_->identity(j)] != identity_map(nodes_[j])) {
      throw Error(ErrorCode::ValidationError,
                  "diagram is not functorial on the identity of '" +
                      shape_->object_name(j) + "'");
    }
  }
  for (ArrowId s = 0; s < shape_->arrow_count(); ++s) {
    for (ArrowId t = 0; t < shape_->arrow_count(); ++t) {
      if (!shape_->composable(s, t)) continue;
      if (edges_[shape_->compose(s, t)] != compose_maps(edges_[s], edges_[t])) {
        throw Error(ErrorCode::ValidationError,
                    "diagram is not functorial on (" + shape_->arrow_name(s) +
                        ", " + shape_->arrow_name(t) + ")");
      }
    }
  }
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    if (!same_site(nodes_[j].base(), nodes_[0].base())) {
      throw Error(ErrorCode::ShapeMismatch, "diagram nodes live on different sites");
    }
  }
}

namespace {

// Odometer over tuple coordinates; leftmost coordinate is most significant.
bool next_tuple(std::vector<std::uint32_t>& t,
                const std::vector<std::uint32_t>& radix) {
  for (std::size_t i = t.size(); i-- > 0;) {
    if (++t[i] < radix[i]) return true;
    t[i] = 0;
  }
  return false;
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = std::uint32_t(i);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the least member as the root
    parent[b] = a;
  }
};

}  // namespace

Cone limit(const Diagram& d) {
  const FinCat& shape = *d.shape();
  const std::size_t k = shape.object_count();
  const FinCatPtr& site = d.site();
  const FinCat& cat = *site;

  std::vector<std::vector<std::vector<std::uint32_t>>> tuples(cat.object_count());
  std::vector<std::map<std::vector<std::uint32_t>, std::uint32_t>> index(
      cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::vector<std::uint32_t> radix(k);
    bool empty = false;
    for (ObjId j = 0; j < k; ++j) {
      radix[j] = d.node(j).card(c);
      if (radix[j] == 0) empty = true;
    }
    if (empty) continue;
    std::vector<std::uint32_t> t(k, 0);
    do {
      bool ok = true;
      for (ArrowId s = 0; s < shape.arrow_count() && ok; ++s) {
        if (d.edge(s).at(c, t[shape.src(s)]) != t[shape.dst(s)]) ok = false;
      }
      if (ok) {
        index[c][t] = std::uint32_t(tuples[c].size());
        tuples[c].push_back(t);
        require_within_cap(tuples[c].size(), caps().max_elements_per_object,
                           "limit carrier");
      }
    } while (next_tuple(t, radix));
  }

  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    card[c] = std::uint32_t(tuples[c].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      std::vector<std::uint32_t> mapped(k);
      for (ObjId j = 0; j < k; ++j) mapped[j] = d.node(j).act(f, tuples[b][i][j]);
      action[f][i] = index[a].at(mapped);
    }
  }
  Presheaf apex(site, std::move(card), std::move(action));

  std::vector<PresheafMap> legs;
  for (ObjId j = 0; j < k; ++j) {
    std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      comp[c].resize(tuples[c].size());
      for (std::uint32_t i = 0; i < tuples[c].size(); ++i) {
        comp[c][i] = tuples[c][i][j];
      }
    }
    legs.emplace_back(apex, d.node(j), std::move(comp));
  }
  return Cone{std::move(apex), std::move(legs)};
}

Cocone colimit(const Diagram& d) {
  const FinCat& shape = *d.shape();
  const std::size_t k = shape.object_count();
  const FinCatPtr& site = d.site();
  const FinCat& cat = *site;

  // Flat indexing of the disjoint union at each site object.
  std::vector<std::vector<std::uint32_t>> offset(cat.object_count(),
                                                 std::vector<std::uint32_t>(k, 0));
  std::vector<std::uint32_t> totals(cat.object_count(), 0);
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (ObjId j = 0; j < k; ++j) {
      offset[c][j] = totals[c];
      totals[c] += d.node(j).card(c);
    }
  }

  std::vector<UnionFind> uf;
  uf.reserve(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) uf.emplace_back(totals[c]);
  for (ArrowId s = 0; s < shape.arrow_count(); ++s) {
    ObjId j = shape.src(s), j2 = shape.dst(s);
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      for (std::uint32_t x = 0; x < d.node(j).card(c); ++x) {
        uf[c].unite(offset[c][j] + x, offset[c][j2] + d.edge(s).at(c, x));
      }
    }
  }

  // Classes named by least member; carrier order follows the least members.
  std::vector<std::vector<std::uint32_t>> reps(cat.object_count());
  std::vector<std::map<std::uint32_t, std::uint32_t>> class_index(
      cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t x = 0; x < totals[c]; ++x) {
      if (uf[c].find(x) == x) {
        class_index[c][x] = std::uint32_t(reps[c].size());
        reps[c].push_back(x);
      }
    }
  }

  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    card[c] = std::uint32_t(reps[c].size());
  }

  auto locate = [&](ObjId c, std::uint32_t flat) {
    // Recovers (node, element) from a flat index.
    ObjId j = 0;
    while (j + 1 < k && offset[c][j + 1] <= flat) ++j;
    return std::pair<ObjId, std::uint32_t>(j, flat - offset[c][j]);
  };

  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      auto [j, x] = locate(b, reps[b][i]);
      std::uint32_t flat_a = offset[a][j] + d.node(j).act(f, x);
      action[f][i] = class_index[a].at(uf[a].find(flat_a));
    }
  }
  Presheaf apex(site, std::move(card), std::move(action));

  std::vector<PresheafMap> legs;
  for (ObjId j = 0; j < k; ++j) {
    std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      comp[c].resize(d.node(j).card(c));
      for (std::uint32_t x = 0; x < d.node(j).card(c); ++x) {
        comp[c][x] = class_index[c].at(uf[c].find(offset[c][j] + x));
      }
    }
    legs.emplace_back(d.node(j), apex, std::move(comp));
  }
  return Cocone{std::move(apex), std::move(legs)};
}

PullbackResult pullback(const PresheafMap& left, const PresheafMap& right) {
  if (left.target() != right.target()) {
    throw Error(ErrorCode::ShapeMismatch, "pullback legs have different targets");
  }
  const Presheaf& x = left.source();
  const Presheaf& y = right.source();
  const FinCat& cat = *x.base();

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(
      cat.object_count());
  std::vector<std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>>
      index(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < x.card(c); ++i) {
      for (std::uint32_t j = 0; j < y.card(c); ++j) {
        if (left.at(c, i) == right.at(c, j)) {
          index[c][{i, j}] = std::uint32_t(pairs[c].size());
          pairs[c].push_back({i, j});
        }
      }
    }
    require_within_cap(pairs[c].size(), caps().max_elements_per_object,
                       "pullback carrier");
  }

  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    card[c] = std::uint32_t(pairs[c].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      auto [px, py] = pairs[b][i];
      action[f][i] = index[a].at({x.act(f, px), y.act(f, py)});
    }
  }
  Presheaf apex(x.base(), std::move(card), std::move(action));

  std::vector<std::vector<std::uint32_t>> comp1(cat.object_count());
  std::vector<std::vector<std::uint32_t>> comp2(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp1[c].resize(pairs[c].size());
    comp2[c].resize(pairs[c].size());
    for (std::uint32_t i = 0; i < pairs[c].size(); ++i) {
      comp1[c][i] = pairs[c][i].first;
      comp2[c][i] = pairs[c][i].second;
    }
  }
  PresheafMap p1(apex, x, std::move(comp1));
  PresheafMap p2(apex, y, std::move(comp2));
  return PullbackResult{std::move(apex), std::move(p1), std::move(p2)};
}

CoproductResult coproduct(const Presheaf& x, const Presheaf& y) {
  const FinCat& cat = *x.base();
  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) card[c] = x.card(c) + y.card(c);
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < x.card(b); ++i) action[f][i] = x.act(f, i);
    for (std::uint32_t j = 0; j < y.card(b); ++j) {
      action[f][x.card(b) + j] = x.card(a) + y.act(f, j);
    }
  }
  Presheaf apex(x.base(), std::move(card), std::move(action));
  std::vector<std::vector<std::uint32_t>> ca(cat.object_count());
  std::vector<std::vector<std::uint32_t>> cb(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    ca[c].resize(x.card(c));
    for (std::uint32_t i = 0; i < x.card(c); ++i) ca[c][i] = i;
    cb[c].resize(y.card(c));
    for (std::uint32_t j = 0; j < y.card(c); ++j) cb[c][j] = x.card(c) + j;
  }
  PresheafMap in1(x, apex, std::move(ca));
  PresheafMap in2(y, apex, std::move(cb));
  return CoproductResult{std::move(apex), std::move(in1), std::move(in2)};
}

ProductResult product(const Presheaf& x, const Presheaf& y) {
  auto pb = pullback(terminal_map(x), terminal_map(y));
  return ProductResult{std::move(pb.apex), std::move(pb.to_left),
                       std::move(pb.to_right)};
}

ImageFactorization image_factorization(const PresheafMap& u) {
  const Presheaf& x = u.source();
  const Presheaf& y = u.target();
  const FinCat& cat = *x.base();

  std::vector<std::vector<std::uint32_t>> image_elems(cat.object_count());
  std::vector<std::map<std::uint32_t, std::uint32_t>> image_index(
      cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < x.card(c); ++i) {
      std::uint32_t v = u.at(c, i);
      if (image_index[c].emplace(v, std::uint32_t(image_elems[c].size())).second) {
        image_elems[c].push_back(v);
      }
    }
  }

  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    card[c] = std::uint32_t(image_elems[c].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t i = 0; i < card[b]; ++i) {
      action[f][i] = image_index[a].at(y.act(f, image_elems[b][i]));
    }
  }
  Presheaf mid(x.base(), std::move(card), std::move(action));

  std::vector<std::vector<std::uint32_t>> coim_comp(cat.object_count());
  std::vector<std::vector<std::uint32_t>> im_comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    coim_comp[c].resize(x.card(c));
    for (std::uint32_t i = 0; i < x.card(c); ++i) {
      coim_comp[c][i] = image_index[c].at(u.at(c, i));
    }
    im_comp[c] = image_elems[c];
  }
  PresheafMap coim(x, mid, std::move(coim_comp));
  PresheafMap im(std::move(mid), y, std::move(im_comp));
  return ImageFactorization{std::move(coim), std::move(im)};
}

PresheafMap diagonal(const PresheafMap& u) {
  auto pb = pullback(u, u);
  const FinCat& cat = *u.source().base();
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp[c].resize(u.source().card(c));
    for (std::uint32_t i = 0; i < u.source().card(c); ++i) {
      // Locate (i, i) through the projections; the pullback carrier is the
      // lexicographic pair list, so scan via the two components.
      std::uint32_t found = 0;
      bool ok = false;
      for (std::uint32_t p = 0; p < pb.apex.card(c); ++p) {
        if (pb.to_left.at(c, p) == i && pb.to_right.at(c, p) == i) {
          found = p;
          ok = true;
          break;
        }
      }
      if (!ok) {
        throw Error(ErrorCode::ValidationError, "diagonal element not found");
      }
      comp[c][i] = found;
    }
  }
  return PresheafMap(u.source(), pb.apex, std::move(comp));
}

PresheafMap iterated_diagonal(const PresheafMap& u, unsigned n) {
  PresheafMap d = u;
  for (unsigned k = 0; k < n; ++k) d = diagonal(d);
  return d;
}

bool is_mono(const PresheafMap& u) {
  const FinCat& cat = *u.source().base();
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::vector<bool> seen(u.target().card(c), false);
    for (std::uint32_t i = 0; i < u.source().card(c); ++i) {
      std::uint32_t v = u.at(c, i);
      if (seen[v]) return false;
      seen[v] = true;
    }
  }
  return true;
}

bool is_surjection(const PresheafMap& u) {
  const FinCat& cat = *u.source().base();
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::vector<bool> seen(u.target().card(c), false);
    for (std::uint32_t i = 0; i < u.source().card(c); ++i) seen[u.at(c, i)] = true;
    for (bool b : seen) {
      if (!b) return false;
    }
  }
  return true;
}

bool is_iso(const PresheafMap& u) { return is_mono(u) && is_surjection(u); }

bool is_n_connected(const PresheafMap& u, int n) {
  if (n < -1) return true;
  // The diagonal tower of a set-level presheaf map stabilizes: the first
  // diagonal is mono, so the second is iso and every later one stays iso.
  const unsigned heights = (n == kConnInfinity) ? 3u
                           : std::min(unsigned(n) + 2u, 5u);
  PresheafMap d = u;
  for (unsigned k = 0; k < heights; ++k) {
    if (!is_surjection(d)) return false;
    if (k + 1 < heights) d = diagonal(d);
  }
  if (n == kConnInfinity || unsigned(n) + 2u > 5u) {
    // Asserted, not assumed: the tower really has become constant.
    if (!is_mono(d)) {
      throw Error(ErrorCode::ValidationError,
                  "diagonal tower failed to stabilize");
    }
  }
  return true;
}

std::vector<PresheafMap> enumerate_maps(const Presheaf& x, const Presheaf& y) {
  const FinCat& cat = *x.base();
  if (!same_site(x.base(), y.base())) {
    throw Error(ErrorCode::ShapeMismatch, "presheaves live on different sites");
  }

  // Flat order over (object, element); constraints fire as soon as both of
  // their slots are assigned.
  std::vector<std::pair<ObjId, std::uint32_t>> slots;
  std::vector<std::vector<std::size_t>> slot_of(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    slot_of[c].resize(x.card(c));
    for (std::uint32_t i = 0; i < x.card(c); ++i) {
      slot_of[c][i] = slots.size();
      slots.push_back({c, i});
    }
  }

  struct Constraint {
    ArrowId f;
    std::size_t target_slot;  // slot of (dst f, elem)
    std::size_t source_slot;  // slot of (src f, acted elem)
  };
  std::vector<std::vector<Constraint>> fire_at(slots.size());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    for (std::uint32_t i = 0; i < x.card(b); ++i) {
      std::size_t ts = slot_of[b][i];
      std::size_t ss = slot_of[a][x.act(f, i)];
      fire_at[std::max(ts, ss)].push_back({f, ts, ss});
    }
  }

  std::vector<std::uint32_t> assign(slots.size(), 0);
  std::vector<PresheafMap> out;
  std::size_t visited = 0;

  auto emit = [&]() {
    std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      comp[c].resize(x.card(c));
      for (std::uint32_t i = 0; i < x.card(c); ++i) {
        comp[c][i] = assign[slot_of[c][i]];
      }
    }
    out.emplace_back(x, y, std::move(comp));
  };

  auto consistent_at = [&](std::size_t pos) {
    for (const Constraint& k : fire_at[pos]) {
      if (assign[k.source_slot] != y.act(k.f, assign[k.target_slot])) return false;
    }
    return true;
  };

  // Iterative backtracking in lexicographic order of the flat assignment.
  std::size_t pos = 0;
  if (slots.empty()) {
    emit();
    return out;
  }
  std::vector<std::int64_t> current(slots.size(), -1);
  while (true) {
    ObjId c = slots[pos].first;
    std::int64_t next = current[pos] + 1;
    if (next >= std::int64_t(y.card(c))) {
      current[pos] = -1;
      if (pos == 0) break;
      --pos;
      continue;
    }
    current[pos] = next;
    assign[pos] = std::uint32_t(next);
    require_within_cap(++visited, caps().max_enumeration, "map enumeration");
    if (!consistent_at(pos)) continue;
    if (pos + 1 == slots.size()) {
      emit();
      continue;
    }
    ++pos;
  }
  return out;
}

std::optional<PresheafMap> factor_through_mono(const PresheafMap& u,
                                               const PresheafMap& mono) {
  if (u.target() != mono.target()) {
    throw Error(ErrorCode::ShapeMismatch, "factorization targets disagree");
  }
  const FinCat& cat = *u.source().base();
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::vector<std::uint32_t> preimage(mono.target().card(c), kNoArrow);
    for (std::uint32_t s = 0; s < mono.source().card(c); ++s) {
      preimage[mono.at(c, s)] = s;
    }
    comp[c].resize(u.source().card(c));
    for (std::uint32_t i = 0; i < u.source().card(c); ++i) {
      std::uint32_t p = preimage[u.at(c, i)];
      if (p == kNoArrow) return std::nullopt;
      comp[c][i] = p;
    }
  }
  return PresheafMap(u.source(), mono.source(), std::move(comp));
}

}  // namespace toposcalc
