#pragma once

#include <cstdint>
#include <vector>

#include "toposcalc/classifier.hpp"

namespace toposcalc {

// A Grothendieck topology on the site, stored as the set of covering sieves
// per object (flags over the canonical sieve enumeration). Topos-level
// membership of a mono is derived: every representable pullback must be a
// covering sieve.
class GrothTopology {
 public:
  GrothTopology(SieveTablePtr table, std::vector<std::vector<bool>> covers);

  const FinCatPtr& base() const { return table_->base(); }
  const SieveTablePtr& table() const { return table_; }
  bool covers(ObjId c, std::uint32_t sieve_index) const {
    return covers_[c][sieve_index];
  }
  const std::vector<std::vector<bool>>& cover_flags() const { return covers_; }
  std::vector<Sieve> covering_sieves(ObjId c) const;

  // Concatenated cover flags; topologies are ordered by this key.
  std::vector<bool> flat_key() const;

  // Exhaustively re-checks maximality, stability and transitivity.
  void check_invariants() const;

  bool operator==(const GrothTopology& other) const;
  bool operator!=(const GrothTopology& other) const { return !(*this == other); }

 private:
  SieveTablePtr table_;
  std::vector<std::vector<bool>> covers_;
};

// Validates a raw sieve assignment. Errors: MissingMaximal,
// StabilityViolation, TransitivityViolation.
GrothTopology check_axioms(const FinCatPtr& base,
                           const std::vector<std::vector<Sieve>>& raw_covers);

GrothTopology minimal_topology(const FinCatPtr& base);
GrothTopology maximal_topology(const FinCatPtr& base);

// Least topology whose covers include the given sieves (axiom-closure fixed
// point).
GrothTopology generate_from_sieves(const FinCatPtr& base,
                                   const std::vector<Sieve>& sieves);

// Least topology inverting the given monos: each mono is normalized to
// sieves on representables by pulling back along every point of its
// codomain, then saturated.
GrothTopology generate(const FinCatPtr& base,
                       const std::vector<PresheafMap>& monos);

// Sieves induced on representables by a mono (its characteristic sieves).
std::vector<Sieve> sieves_of_mono(const PresheafMap& mono);

// m is in the topos-level class of G iff all its representable pullbacks
// are covering sieves.
bool mono_in_topology(const GrothTopology& g, const PresheafMap& mono);

// A Lawvere-Tierney topology: a natural closure operator on Omega.
class LTTopology {
 public:
  LTTopology(OmegaObject om, PresheafMap j);

  const OmegaObject& omega() const { return omega_; }
  const PresheafMap& j() const { return j_; }
  std::uint32_t apply(ObjId c, std::uint32_t sieve_index) const {
    return j_.at(c, sieve_index);
  }

  // Monotone, inflating, idempotent, pointwise on each sieve poset;
  // naturality is already enforced by the map type. Throws
  // NotAClosureOperator otherwise.
  void check_invariants() const;

  bool operator==(const LTTopology& other) const { return j_ == other.j_; }

 private:
  OmegaObject omega_;
  PresheafMap j_;
};

// j_c(S) = { f | f*S covering }: the classifying map of the covering-sieve
// subobject of Omega.
LTTopology groth_to_lt(const GrothTopology& g);
// Dense sieves of j: covers(c) = { S | j_c(S) maximal }.
GrothTopology lt_to_groth(const LTTopology& j);

// Pointwise order j <= j' on closure operators.
bool lt_leq(const LTTopology& a, const LTTopology& b);
bool topology_leq(const GrothTopology& a, const GrothTopology& b);

// All topologies by exhaustive filtered enumeration of sieve assignments,
// ordered by flat_key.
std::vector<GrothTopology> enumerate_topologies(const FinCatPtr& base);
// Independent oracle route: all natural closure operators on Omega.
std::vector<LTTopology> enumerate_closure_operators(const FinCatPtr& base);

GrothTopology topology_meet(const GrothTopology& a, const GrothTopology& b);
GrothTopology topology_join(const GrothTopology& a, const GrothTopology& b);

// The covering topology Cover(G), represented intensionally through G:
// f is a member iff im(f) is levelwise a covering sieve.
class CoveringClass {
 public:
  explicit CoveringClass(GrothTopology g) : topology_(std::move(g)) {}
  const GrothTopology& topology() const { return topology_; }
  bool member(const PresheafMap& f) const;

 private:
  GrothTopology topology_;
};

CoveringClass covering_class(const GrothTopology& g);

}  // namespace toposcalc
