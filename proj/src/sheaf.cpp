#include "toposcalc/sheaf.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "toposcalc/caps.hpp"

namespace toposcalc {

namespace {

std::uint32_t position_in_sieve(const Sieve& s, ArrowId f) {
  auto it = std::lower_bound(s.arrows().begin(), s.arrows().end(), f);
  if (it == s.arrows().end() || *it != f) {
    throw Error(ErrorCode::ValidationError, "arrow missing from sieve");
  }
  return std::uint32_t(it - s.arrows().begin());
}

}  // namespace

std::vector<MatchingFamily> matching_families(const Sieve& s, const Presheaf& x) {
  const FinCat& cat = *x.base();
  const auto& arrows = s.arrows();

  // Backtracking over positions; each precomposition constraint fires as
  // soon as its later slot is filled.
  struct Constraint {
    ArrowId g;             // the precomposed arrow
    std::uint32_t from;    // position of f
    std::uint32_t to;      // position of (f then g)
  };
  std::vector<std::vector<Constraint>> fire_at(arrows.size());
  for (std::uint32_t p = 0; p < arrows.size(); ++p) {
    ArrowId f = arrows[p];
    for (ArrowId g = 0; g < cat.arrow_count(); ++g) {
      if (cat.dst(g) != cat.src(f)) continue;
      std::uint32_t q = position_in_sieve(s, cat.compose(g, f));
      fire_at[std::max(p, q)].push_back({g, p, q});
    }
  }

  std::vector<MatchingFamily> out;
  MatchingFamily current(arrows.size(), 0);
  if (arrows.empty()) {
    out.push_back(current);
    return out;
  }

  std::vector<std::int64_t> state(arrows.size(), -1);
  std::size_t pos = 0;
  std::size_t visited = 0;
  while (true) {
    ObjId d = cat.src(arrows[pos]);
    std::int64_t next = state[pos] + 1;
    if (next >= std::int64_t(x.card(d))) {
      state[pos] = -1;
      if (pos == 0) break;
      --pos;
      continue;
    }
    state[pos] = next;
    current[pos] = std::uint32_t(next);
    require_within_cap(++visited, caps().max_enumeration, "matching families");
    bool ok = true;
    for (const Constraint& k : fire_at[pos]) {
      if (current[k.to] != x.act(k.g, current[k.from])) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (pos + 1 == arrows.size()) {
      out.push_back(current);
      continue;
    }
    ++pos;
  }
  return out;
}

MatchingFamily restrict_element(const Sieve& s, const Presheaf& x, ObjId c,
                                std::uint32_t elem) {
  if (s.target() != c) {
    throw Error(ErrorCode::ShapeMismatch, "sieve lives on another object");
  }
  MatchingFamily m(s.arrows().size());
  for (std::uint32_t p = 0; p < s.arrows().size(); ++p) {
    m[p] = x.act(s.arrows()[p], elem);
  }
  return m;
}

bool is_sheaf(const Presheaf& x, const GrothTopology& g) {
  const SieveTable& table = *g.table();
  const FinCat& cat = *x.base();
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (!g.covers(c, i)) continue;
      const Sieve& s = table.sieves(c)[i];
      auto families = matching_families(s, x);
      if (families.size() != x.card(c)) return false;
      std::map<MatchingFamily, std::uint32_t> seen;
      for (std::uint32_t e = 0; e < x.card(c); ++e) {
        if (!seen.emplace(restrict_element(s, x, c, e), e).second) return false;
      }
    }
  }
  return true;
}

namespace {

// The full data of one plus construction, kept so maps can be transported.
struct PlusData {
  // Per object: the list of (covering sieve index, family), in canonical
  // order, plus the union-find class structure over it.
  struct Entry {
    std::uint32_t sieve;
    MatchingFamily family;
    bool operator<(const Entry& other) const {
      if (sieve != other.sieve) return sieve < other.sieve;
      return family < other.family;
    }
  };
  std::vector<std::vector<Entry>> entries;               // per object
  std::vector<std::map<std::pair<std::uint32_t, MatchingFamily>, std::uint32_t>>
      entry_index;                                       // (sieve, family) -> id
  std::vector<std::vector<std::uint32_t>> class_of;      // entry id -> class
  std::vector<std::vector<std::uint32_t>> class_rep;     // class -> entry id
  Presheaf object;
  PresheafMap unit;

  std::uint32_t class_of_pair(ObjId c, std::uint32_t sieve,
                              const MatchingFamily& m) const {
    return class_of[c][entry_index[c].at({sieve, m})];
  }
};

MatchingFamily restrict_family(const Sieve& from, const Sieve& to,
                               const MatchingFamily& m) {
  MatchingFamily out(to.arrows().size());
  for (std::uint32_t p = 0; p < to.arrows().size(); ++p) {
    out[p] = m[position_in_sieve(from, to.arrows()[p])];
  }
  return out;
}

struct PlusUnionFind {
  std::vector<std::uint32_t> parent;
  explicit PlusUnionFind(std::size_t n) : parent(n) {
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
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
};

PlusData build_plus(const Presheaf& x, const GrothTopology& g) {
  const SieveTable& table = *g.table();
  const FinCat& cat = *x.base();
  PlusData data{.entries = {},
                .entry_index = {},
                .class_of = {},
                .class_rep = {},
                .object = x,
                .unit = identity_map(x)};
  data.entries.resize(cat.object_count());
  data.entry_index.resize(cat.object_count());
  data.class_of.resize(cat.object_count());
  data.class_rep.resize(cat.object_count());

  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (!g.covers(c, i)) continue;
      for (MatchingFamily& m : matching_families(table.sieves(c)[i], x)) {
        data.entries[c].push_back({i, std::move(m)});
      }
    }
    std::sort(data.entries[c].begin(), data.entries[c].end());
    require_within_cap(data.entries[c].size(), caps().max_enumeration,
                       "plus construction");
    for (std::uint32_t id = 0; id < data.entries[c].size(); ++id) {
      data.entry_index[c][{data.entries[c][id].sieve,
                           data.entries[c][id].family}] = id;
    }

    // Identify each family with its restriction to every finer covering
    // sieve; the zig-zag closure of that is the colimit equivalence.
    PlusUnionFind uf(data.entries[c].size());
    for (std::uint32_t id = 0; id < data.entries[c].size(); ++id) {
      const auto& entry = data.entries[c][id];
      const Sieve& s = table.sieves(c)[entry.sieve];
      for (std::uint32_t k = 0; k < table.count(c); ++k) {
        if (!g.covers(c, k) || k == entry.sieve) continue;
        const Sieve& t = table.sieves(c)[k];
        if (!sieve_leq(t, s)) continue;
        MatchingFamily restricted = restrict_family(s, t, entry.family);
        uf.unite(id, data.entry_index[c].at({k, restricted}));
      }
    }
    data.class_of[c].resize(data.entries[c].size());
    std::map<std::uint32_t, std::uint32_t> root_to_class;
    for (std::uint32_t id = 0; id < data.entries[c].size(); ++id) {
      std::uint32_t root = uf.find(id);
      auto it = root_to_class.find(root);
      if (it == root_to_class.end()) {
        it = root_to_class.emplace(root, std::uint32_t(data.class_rep[c].size()))
                 .first;
        data.class_rep[c].push_back(root);
      }
      data.class_of[c][id] = it->second;
    }
    require_within_cap(data.class_rep[c].size(),
                       caps().max_elements_per_object, "plus carrier");
  }

  std::vector<std::uint32_t> card(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    card[c] = std::uint32_t(data.class_rep[c].size());
  }
  std::vector<std::vector<std::uint32_t>> action(cat.arrow_count());
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    ObjId a = cat.src(f), b = cat.dst(f);
    action[f].resize(card[b]);
    for (std::uint32_t cls = 0; cls < card[b]; ++cls) {
      const auto& entry = data.entries[b][data.class_rep[b][cls]];
      const Sieve& s = table.sieves(b)[entry.sieve];
      std::uint32_t pulled = table.pullback_index(f, entry.sieve);
      const Sieve& fs = table.sieves(a)[pulled];
      MatchingFamily m(fs.arrows().size());
      for (std::uint32_t p = 0; p < fs.arrows().size(); ++p) {
        // (g then f) lies in s; reuse its value.
        ArrowId g_arrow = fs.arrows()[p];
        m[p] = entry.family[position_in_sieve(s, cat.compose(g_arrow, f))];
      }
      action[f][cls] = data.class_of_pair(a, pulled, m);
    }
  }
  data.object = Presheaf(x.base(), std::move(card), std::move(action));

  std::vector<std::vector<std::uint32_t>> unit_comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::uint32_t max_index = table.maximal_index(c);
    const Sieve& top = table.sieves(c)[max_index];
    unit_comp[c].resize(x.card(c));
    for (std::uint32_t e = 0; e < x.card(c); ++e) {
      unit_comp[c][e] =
          data.class_of_pair(c, max_index, restrict_element(top, x, c, e));
    }
  }
  data.unit = PresheafMap(x, data.object, std::move(unit_comp));
  return data;
}

}  // namespace

PlusResult plus(const Presheaf& x, const GrothTopology& g) {
  PlusData data = build_plus(x, g);
  return PlusResult{std::move(data.object), std::move(data.unit)};
}

PresheafMap plus_map(const PresheafMap& f, const GrothTopology& g) {
  PlusData source = build_plus(f.source(), g);
  PlusData target = build_plus(f.target(), g);
  const FinCat& cat = *f.source().base();
  const SieveTable& table = *g.table();
  std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    comp[c].resize(source.object.card(c));
    for (std::uint32_t cls = 0; cls < source.object.card(c); ++cls) {
      const auto& entry = source.entries[c][source.class_rep[c][cls]];
      const Sieve& s = table.sieves(c)[entry.sieve];
      MatchingFamily pushed(entry.family.size());
      for (std::uint32_t p = 0; p < entry.family.size(); ++p) {
        pushed[p] = f.at(cat.src(s.arrows()[p]), entry.family[p]);
      }
      comp[c][cls] = target.class_of_pair(c, entry.sieve, pushed);
    }
  }
  return PresheafMap(source.object, target.object, std::move(comp));
}

SheafifyResult sheafify(const Presheaf& x, const GrothTopology& g) {
  PlusResult once = plus(x, g);
  PlusResult twice = plus(once.object, g);
  if (!is_sheaf(twice.object, g)) {
    throw Error(ErrorCode::ValidationError,
                "double plus failed to produce a sheaf");
  }
  return SheafifyResult{twice.object, compose_maps(once.unit, twice.unit)};
}

PresheafMap sheafify_map(const PresheafMap& f, const GrothTopology& g) {
  return plus_map(plus_map(f, g), g);
}

struct LocalizationHandle::SheafCache {
  std::mutex mu;
  std::map<std::vector<std::uint32_t>, bool> memo;
};

LocalizationHandle::LocalizationHandle(GrothTopology g)
    : topology_(std::move(g)), cache_(std::make_shared<SheafCache>()) {}

bool LocalizationHandle::is_sheaf(const Presheaf& x) const {
  std::vector<std::uint32_t> key = x.cards();
  for (ArrowId f = 0; f < x.base()->arrow_count(); ++f) {
    const auto& table = x.action_table(f);
    key.insert(key.end(), table.begin(), table.end());
  }
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->memo.find(key);
    if (it != cache_->memo.end()) return it->second;
  }
  bool verdict = toposcalc::is_sheaf(x, topology_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->memo.emplace(std::move(key), verdict);
  return verdict;
}

SheafifyResult LocalizationHandle::sheafify(const Presheaf& x) const {
  return toposcalc::sheafify(x, topology_);
}

PresheafMap LocalizationHandle::sheafify_map(const PresheafMap& f) const {
  return toposcalc::sheafify_map(f, topology_);
}

bool LocalizationHandle::inverts(const PresheafMap& f) const {
  return is_iso(sheafify_map(f));
}

LeftExactReport check_left_exact(const LocalizationHandle& handle,
                                 const std::vector<PullbackSquare>& squares) {
  LeftExactReport report;
  report.squares = squares.size();

  Presheaf one = terminal_presheaf(handle.base());
  SheafifyResult l_one = handle.sheafify(one);
  report.terminal_preserved = is_iso(terminal_map(l_one.sheaf));

  for (std::size_t idx = 0; idx < squares.size(); ++idx) {
    const auto& sq = squares[idx];
    PullbackResult pb = pullback(sq.left, sq.right);
    PresheafMap lp1 = handle.sheafify_map(pb.to_left);
    PresheafMap lp2 = handle.sheafify_map(pb.to_right);
    PullbackResult sheaf_pb =
        pullback(handle.sheafify_map(sq.left), handle.sheafify_map(sq.right));
    // Gap map L(P) -> L(X) x_{L(Z)} L(Y).
    const FinCat& cat = *handle.base();
    bool ok = true;
    std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
    for (ObjId c = 0; c < cat.object_count() && ok; ++c) {
      comp[c].resize(lp1.source().card(c));
      for (std::uint32_t e = 0; e < lp1.source().card(c); ++e) {
        std::uint32_t want_left = lp1.at(c, e);
        std::uint32_t want_right = lp2.at(c, e);
        bool found = false;
        for (std::uint32_t p = 0; p < sheaf_pb.apex.card(c); ++p) {
          if (sheaf_pb.to_left.at(c, p) == want_left &&
              sheaf_pb.to_right.at(c, p) == want_right) {
            comp[c][e] = p;
            found = true;
            break;
          }
        }
        if (!found) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      PresheafMap gap(lp1.source(), sheaf_pb.apex, std::move(comp));
      ok = is_iso(gap);
    }
    if (!ok) report.failures.push_back(idx);
  }
  return report;
}

}  // namespace toposcalc
