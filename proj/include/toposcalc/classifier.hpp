#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "toposcalc/presheaf.hpp"

namespace toposcalc {

// A canonical subobject: a literal action-closed selection of carrier
// elements of the ambient presheaf. Arbitrary monos are normalized to this
// form before any uniqueness claim is made.
class Subobject {
 public:
  Subobject(Presheaf ambient, std::vector<std::vector<bool>> selected);

  const Presheaf& ambient() const { return ambient_; }
  bool contains(ObjId o, std::uint32_t x) const { return selected_[o][x]; }
  const std::vector<std::vector<bool>>& selection() const { return selected_; }

  std::size_t total_selected() const;
  bool is_whole() const;
  bool is_empty() const;

  // Flattened selection bits in (object, element) order; the canonical key
  // used for deterministic ordering.
  std::vector<bool> flat_key() const;

  bool operator==(const Subobject& other) const;
  bool operator!=(const Subobject& other) const { return !(*this == other); }
  bool operator<(const Subobject& other) const;

 private:
  Presheaf ambient_;
  std::vector<std::vector<bool>> selected_;
};

Subobject whole_subobject(const Presheaf& a);
Subobject empty_subobject(const Presheaf& a);
bool subobject_leq(const Subobject& s, const Subobject& t);
Subobject subobject_meet(const Subobject& s, const Subobject& t);
Subobject subobject_join(const Subobject& s, const Subobject& t);

// The inclusion S -> A as a map; carriers of S are reindexed in ambient order.
PresheafMap mono_of_subobject(const Subobject& s);
// Normalizes a mono (or any map: its image is taken) to a canonical subobject.
Subobject subobject_of_map(const PresheafMap& m);
// Inverse image f^{-1}(S) along f: A -> B of S <= B.
Subobject subobject_preimage(const PresheafMap& f, const Subobject& s);

// Every action-closed pointwise subset, in ascending flat-key order.
std::vector<Subobject> subobjects(const Presheaf& a);

// A sieve on an object: a precomposition-closed set of arrows into it.
class Sieve {
 public:
  Sieve(FinCatPtr base, ObjId target, std::vector<ArrowId> arrows);

  const FinCatPtr& base() const { return base_; }
  ObjId target() const { return target_; }
  const std::vector<ArrowId>& arrows() const { return arrows_; }
  bool contains(ArrowId f) const;
  std::size_t size() const { return arrows_.size(); }

  bool operator==(const Sieve& other) const;
  bool operator!=(const Sieve& other) const { return !(*this == other); }

 private:
  FinCatPtr base_;
  ObjId target_;
  std::vector<ArrowId> arrows_;  // sorted, all with dst == target
};

Sieve maximal_sieve(const FinCatPtr& base, ObjId c);
Sieve empty_sieve(const FinCatPtr& base, ObjId c);
// Precomposition closure of a generator set.
Sieve generated_sieve(const FinCatPtr& base, ObjId c,
                      const std::vector<ArrowId>& generators);
// f*S = { g | f then g in S } for f: a -> b and S a sieve on b.
Sieve pullback_sieve(ArrowId f, const Sieve& s);
bool sieve_leq(const Sieve& s, const Sieve& t);
Sieve sieve_intersection(const Sieve& s, const Sieve& t);

// The subpresheaf of yoneda(c) carved out by a sieve, and its inclusion.
Presheaf sieve_presheaf(const Sieve& s);
PresheafMap sieve_mono(const Sieve& s);

// All sieves on every object, in a canonical order shared by Omega and the
// topology representation. Index 0 per object is the empty sieve; the last
// is the maximal one.
class SieveTable {
 public:
  explicit SieveTable(FinCatPtr base);

  const FinCatPtr& base() const { return base_; }
  const std::vector<Sieve>& sieves(ObjId c) const { return sieves_[c]; }
  std::uint32_t count(ObjId c) const { return std::uint32_t(sieves_[c].size()); }
  std::uint32_t index_of(const Sieve& s) const;
  std::uint32_t maximal_index(ObjId c) const {
    return std::uint32_t(sieves_[c].size() - 1);
  }
  std::uint32_t empty_index(ObjId) const { return 0; }
  // Index of f*(sieve #i on dst f) within the sieves on src f.
  std::uint32_t pullback_index(ArrowId f, std::uint32_t i) const {
    return pullback_[f][i];
  }

 private:
  FinCatPtr base_;
  std::vector<std::vector<Sieve>> sieves_;
  std::vector<std::vector<std::uint32_t>> pullback_;
};

using SieveTablePtr = std::shared_ptr<const SieveTable>;
SieveTablePtr sieve_table(const FinCatPtr& base);

// The Lawvere object: carrier(c) = sieves on c, action by sieve pullback,
// with the universal mono t: 1 -> Omega picking maximal sieves.
struct OmegaObject {
  SieveTablePtr table;
  Presheaf omega;
  PresheafMap truth;  // t : 1 -> Omega
};

OmegaObject omega(const FinCatPtr& base);

// The characteristic map of a canonical subobject S <= A.
PresheafMap classify(const OmegaObject& om, const Subobject& s);
// Pullback of t along chi: A -> Omega, as a canonical subobject of A.
Subobject pullback_truth(const OmegaObject& om, const PresheafMap& chi);

bool is_univalent(const OmegaObject& om, const PresheafMap& mono);

// The univalent mono v with {v}^bc = the local class generated by M, built
// as in the classifier proof: coproduct of univalentized members, then the
// image of its characteristic map. Throws NotLocal when some member of M is
// not a base change of the result.
PresheafMap univalent_generator(const OmegaObject& om,
                                const std::vector<PresheafMap>& monos);

}  // namespace toposcalc
