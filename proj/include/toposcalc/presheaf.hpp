#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "toposcalc/fincat.hpp"

namespace toposcalc {

// A finite-set-valued presheaf on a FinCat. Carriers are {0..card-1} per
// object; the table for an arrow f: a -> b maps carrier(b) into carrier(a).
class Presheaf {
 public:
  Presheaf(FinCatPtr base, std::vector<std::uint32_t> card,
           std::vector<std::vector<std::uint32_t>> action);

  const FinCatPtr& base() const { return base_; }
  std::uint32_t card(ObjId o) const { return card_[o]; }
  const std::vector<std::uint32_t>& cards() const { return card_; }

  // X(f): carrier(dst f) -> carrier(src f)
  std::uint32_t act(ArrowId f, std::uint32_t x) const { return action_[f][x]; }
  const std::vector<std::uint32_t>& action_table(ArrowId f) const {
    return action_[f];
  }

  std::size_t total_elements() const;

  // Exhaustive functoriality check (identities and all composites).
  void check_invariants() const;

  bool operator==(const Presheaf& other) const;
  bool operator!=(const Presheaf& other) const { return !(*this == other); }

 private:
  FinCatPtr base_;
  std::vector<std::uint32_t> card_;
  std::vector<std::vector<std::uint32_t>> action_;
};

Presheaf terminal_presheaf(FinCatPtr base);
Presheaf initial_presheaf(FinCatPtr base);
// Constant-ish presheaf: n points at every object, all actions identity.
Presheaf discrete_presheaf(FinCatPtr base, std::uint32_t n);
Presheaf yoneda(const FinCatPtr& base, ObjId c);
// Position of an arrow within hom(src(f), c); used to read yoneda carriers.
std::uint32_t yoneda_index(const FinCat& cat, ObjId c, ArrowId f);
ArrowId yoneda_arrow(const FinCat& cat, ObjId c, ObjId at, std::uint32_t index);

// A natural transformation between presheaves on the same site.
class PresheafMap {
 public:
  PresheafMap(Presheaf source, Presheaf target,
              std::vector<std::vector<std::uint32_t>> components);

  const Presheaf& source() const { return source_; }
  const Presheaf& target() const { return target_; }
  std::uint32_t at(ObjId o, std::uint32_t x) const { return components_[o][x]; }
  const std::vector<std::uint32_t>& component(ObjId o) const {
    return components_[o];
  }

  void check_invariants() const;  // exhaustive naturality

  bool operator==(const PresheafMap& other) const;
  bool operator!=(const PresheafMap& other) const { return !(*this == other); }

 private:
  Presheaf source_;
  Presheaf target_;
  std::vector<std::vector<std::uint32_t>> components_;
};

PresheafMap identity_map(const Presheaf& x);
PresheafMap compose_maps(const PresheafMap& first, const PresheafMap& second);
PresheafMap terminal_map(const Presheaf& x);               // X -> 1
PresheafMap initial_map(const Presheaf& x);                // 0 -> X
PresheafMap constant_map(const Presheaf& x, const Presheaf& y,
                         std::uint32_t point_of_y_everywhere);

// A finite diagram of presheaves indexed by a FinCat shape. The ambient
// site is read off the nodes; an empty-shape diagram must name it
// explicitly (its limit is the terminal presheaf, its colimit the initial
// one).
class Diagram {
 public:
  Diagram(FinCatPtr shape, std::vector<Presheaf> nodes,
          std::vector<PresheafMap> edges, FinCatPtr site = nullptr);

  const FinCatPtr& shape() const { return shape_; }
  const Presheaf& node(ObjId j) const { return nodes_[j]; }
  const PresheafMap& edge(ArrowId s) const { return edges_[s]; }
  const FinCatPtr& site() const { return site_; }

 private:
  FinCatPtr shape_;
  std::vector<Presheaf> nodes_;
  std::vector<PresheafMap> edges_;
  FinCatPtr site_;
};

struct Cone {
  Presheaf apex;
  std::vector<PresheafMap> legs;  // apex -> node(j)
};

struct Cocone {
  Presheaf apex;
  std::vector<PresheafMap> legs;  // node(j) -> apex
};

// Pointwise limit; carrier elements are compatible tuples in lexicographic
// order of the fixed per-node element orders.
Cone limit(const Diagram& d);
// Pointwise colimit; carrier elements are zig-zag classes named by their
// least member.
Cocone colimit(const Diagram& d);

struct PullbackResult {
  Presheaf apex;
  PresheafMap to_left;   // apex -> source(left)
  PresheafMap to_right;  // apex -> source(right)
};
PullbackResult pullback(const PresheafMap& left, const PresheafMap& right);

struct CoproductResult {
  Presheaf apex;
  PresheafMap in_left;
  PresheafMap in_right;
};
CoproductResult coproduct(const Presheaf& x, const Presheaf& y);

struct ProductResult {
  Presheaf apex;
  PresheafMap to_left;
  PresheafMap to_right;
};
ProductResult product(const Presheaf& x, const Presheaf& y);

struct ImageFactorization {
  PresheafMap coim;  // pointwise surjective
  PresheafMap im;    // pointwise injective
};
// u = im . coim; the middle carrier at each object is the set-image of the
// component ordered by first preimage occurrence.
ImageFactorization image_factorization(const PresheafMap& u);

PresheafMap diagonal(const PresheafMap& u);
PresheafMap iterated_diagonal(const PresheafMap& u, unsigned n);

bool is_mono(const PresheafMap& u);
bool is_surjection(const PresheafMap& u);
bool is_iso(const PresheafMap& u);

inline constexpr int kConnInfinity = std::numeric_limits<int>::max();
// n ranges over -1, 0, 1, ... and kConnInfinity.
bool is_n_connected(const PresheafMap& u, int n);

// All natural transformations X -> Y in deterministic order. Subject to the
// global enumeration cap.
std::vector<PresheafMap> enumerate_maps(const Presheaf& x, const Presheaf& y);

// The unique map X -> Y extending the given partial data when Y is terminalish
// is not needed; but factoring through a mono is used in several places:
// given u: X -> Y and mono m: S -> Y with im(u) <= im(m), the unique fill
// X -> S with m . fill = u.
std::optional<PresheafMap> factor_through_mono(const PresheafMap& u,
                                               const PresheafMap& mono);

}  // namespace toposcalc
