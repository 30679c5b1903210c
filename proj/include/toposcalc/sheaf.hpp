#pragma once

#include <vector>

#include "toposcalc/topology.hpp"

namespace toposcalc {

// A matching family on a sieve S: one element of X(src f) per arrow f in S,
// compatible with precomposition. Entries follow the sieve's arrow order.
using MatchingFamily = std::vector<std::uint32_t>;

std::vector<MatchingFamily> matching_families(const Sieve& s, const Presheaf& x);
MatchingFamily restrict_element(const Sieve& s, const Presheaf& x, ObjId c,
                                std::uint32_t elem);

// X is a sheaf iff restriction to matching families is a bijection for every
// covering sieve.
bool is_sheaf(const Presheaf& x, const GrothTopology& g);

struct PlusResult {
  Presheaf object;
  PresheafMap unit;
};

// The plus construction: X+(c) is the colimit over covering sieves (by
// reverse inclusion) of matching-family sets, with least-representative
// canonical classes.
PlusResult plus(const Presheaf& x, const GrothTopology& g);
PresheafMap plus_map(const PresheafMap& f, const GrothTopology& g);

struct SheafifyResult {
  Presheaf sheaf;
  PresheafMap unit;
};

// Double plus; the result is re-checked to be a sheaf.
SheafifyResult sheafify(const Presheaf& x, const GrothTopology& g);
PresheafMap sheafify_map(const PresheafMap& f, const GrothTopology& g);

// A topology bundled with its sheafification reflector. The congruence of
// the localization is represented intensionally by the `inverts` predicate;
// sheaf-subcategory membership is memoized (copies share the cache).
class LocalizationHandle {
 public:
  explicit LocalizationHandle(GrothTopology g);

  const GrothTopology& topology() const { return topology_; }
  const FinCatPtr& base() const { return topology_.base(); }

  bool is_sheaf(const Presheaf& x) const;
  SheafifyResult sheafify(const Presheaf& x) const;
  PresheafMap sheafify_map(const PresheafMap& f) const;
  bool inverts(const PresheafMap& f) const;

  bool operator==(const LocalizationHandle& other) const {
    return topology_ == other.topology_;
  }

 private:
  struct SheafCache;
  GrothTopology topology_;
  std::shared_ptr<SheafCache> cache_;
};

struct PullbackSquare {
  PresheafMap left;   // X -> Z
  PresheafMap right;  // Y -> Z
};

struct LeftExactReport {
  std::size_t squares = 0;
  std::vector<std::size_t> failures;
  bool terminal_preserved = false;
  bool all_preserved() const { return failures.empty() && terminal_preserved; }
};

// For each cospan: sheafification of the pullback must compare isomorphically
// to the pullback of the sheafified cospan (via the canonical gap map).
LeftExactReport check_left_exact(const LocalizationHandle& handle,
                                 const std::vector<PullbackSquare>& squares);

}  // namespace toposcalc
