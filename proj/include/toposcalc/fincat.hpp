#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "toposcalc/error.hpp"

namespace toposcalc {

using ObjId = std::uint32_t;
using ArrowId = std::uint32_t;

inline constexpr ArrowId kNoArrow = ~ArrowId(0);

// Raw tables as they come out of the DSL, before any law has been checked.
struct RawArrow {
  std::string name;
  std::string src;
  std::string dst;
};

struct RawComposite {
  // compose second after first: (second . first) = result
  std::string first;
  std::string second;
  std::string result;
};

struct RawCategory {
  std::vector<std::string> objects;
  std::vector<RawArrow> arrows;  // non-identity arrows; identities are implicit
  std::vector<RawComposite> composites;
};

// A finite category with a total, exhaustively validated composition table.
// Objects and arrows are sorted lexicographically by name at validation time;
// every enumeration downstream inherits that order, so all outputs are
// reproducible byte for byte.
class FinCat {
 public:
  // Builds and validates a category. Identity arrows are synthesized with
  // names `id_<object>`, and composites forced by the identity laws are
  // filled in automatically. All remaining composable pairs must be listed,
  // unless `free_compose` is set, in which case a missing composite is
  // inferred when exactly one arrow has the required endpoints.
  static std::shared_ptr<const FinCat> validate(const RawCategory& raw,
                                                bool free_compose = false);

  std::size_t object_count() const { return object_names_.size(); }
  std::size_t arrow_count() const { return arrow_src_.size(); }

  const std::string& object_name(ObjId o) const { return object_names_[o]; }
  const std::string& arrow_name(ArrowId f) const { return arrow_names_[f]; }
  ObjId src(ArrowId f) const { return arrow_src_[f]; }
  ObjId dst(ArrowId f) const { return arrow_dst_[f]; }
  ArrowId identity(ObjId o) const { return identity_[o]; }
  bool is_identity(ArrowId f) const { return identity_[arrow_src_[f]] == f; }

  ObjId object_id(const std::string& name) const;   // throws UnknownObject
  ArrowId arrow_id(const std::string& name) const;  // throws UnknownArrow

  bool composable(ArrowId f, ArrowId g) const { return dst(f) == src(g); }

  // The composite of f: a -> b followed by g: b -> c.
  ArrowId compose(ArrowId f, ArrowId g) const {
    return compose_[std::size_t(f) * arrow_src_.size() + g];
  }

  // Arrows a -> b in canonical (id-ascending) order.
  std::vector<ArrowId> hom(ObjId a, ObjId b) const;
  std::vector<ArrowId> arrows_into(ObjId b) const;

  std::shared_ptr<const FinCat> opposite() const;

  // Re-runs the full invariant suite on the stored tables.
  void check_invariants() const;

  bool operator==(const FinCat& other) const;

 private:
  FinCat() = default;

  std::vector<std::string> object_names_;
  std::vector<std::string> arrow_names_;
  std::vector<ObjId> arrow_src_;
  std::vector<ObjId> arrow_dst_;
  std::vector<ArrowId> identity_;
  std::vector<ArrowId> compose_;  // row-major [f][g], kNoArrow off composables
};

using FinCatPtr = std::shared_ptr<const FinCat>;

// A functor between finite categories, checked exhaustively.
class FinFunctor {
 public:
  FinFunctor(FinCatPtr domain, FinCatPtr codomain,
             std::vector<ObjId> object_map, std::vector<ArrowId> arrow_map);

  const FinCatPtr& domain() const { return domain_; }
  const FinCatPtr& codomain() const { return codomain_; }
  ObjId on_object(ObjId o) const { return object_map_[o]; }
  ArrowId on_arrow(ArrowId f) const { return arrow_map_[f]; }

 private:
  FinCatPtr domain_;
  FinCatPtr codomain_;
  std::vector<ObjId> object_map_;
  std::vector<ArrowId> arrow_map_;
};

bool same_site(const FinCatPtr& a, const FinCatPtr& b);

}  // namespace toposcalc
