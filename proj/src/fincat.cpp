#include "toposcalc/fincat.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "toposcalc/caps.hpp"

namespace toposcalc {

namespace {

std::string arrow_label(const FinCat& cat, ArrowId f) {
  return cat.arrow_name(f) + ": " + cat.object_name(cat.src(f)) + " -> " +
         cat.object_name(cat.dst(f));
}

}  // namespace

std::shared_ptr<const FinCat> FinCat::validate(const RawCategory& raw,
                                               bool free_compose) {
  auto cat = std::shared_ptr<FinCat>(new FinCat());

  // Objects, sorted and unique.
  cat->object_names_ = raw.objects;
  std::sort(cat->object_names_.begin(), cat->object_names_.end());
  for (std::size_t i = 1; i < cat->object_names_.size(); ++i) {
    if (cat->object_names_[i] == cat->object_names_[i - 1]) {
      throw Error(ErrorCode::ValidationError,
                  "duplicate object '" + cat->object_names_[i] + "'");
    }
  }
  std::map<std::string, ObjId> obj_index;
  for (ObjId i = 0; i < cat->object_names_.size(); ++i) {
    obj_index[cat->object_names_[i]] = i;
  }

  // Arrows: user arrows plus synthesized identities, sorted by name.
  struct NamedArrow {
    std::string name;
    ObjId src;
    ObjId dst;
  };
  std::vector<NamedArrow> named;
  std::set<std::string> arrow_names_seen;
  for (const auto& a : raw.arrows) {
    auto s = obj_index.find(a.src);
    auto d = obj_index.find(a.dst);
    if (s == obj_index.end()) {
      throw Error(ErrorCode::UnknownObject,
                  "arrow '" + a.name + "' has unknown source '" + a.src + "'");
    }
    if (d == obj_index.end()) {
      throw Error(ErrorCode::UnknownObject,
                  "arrow '" + a.name + "' has unknown target '" + a.dst + "'");
    }
    if (!arrow_names_seen.insert(a.name).second) {
      throw Error(ErrorCode::ValidationError,
                  "duplicate arrow '" + a.name + "'");
    }
    named.push_back({a.name, s->second, d->second});
  }
  for (ObjId o = 0; o < cat->object_names_.size(); ++o) {
    std::string id_name = "id_" + cat->object_names_[o];
    if (!arrow_names_seen.insert(id_name).second) {
      throw Error(ErrorCode::ValidationError,
                  "arrow name '" + id_name + "' collides with the implicit identity");
    }
    named.push_back({id_name, o, o});
  }
  std::sort(named.begin(), named.end(),
            [](const NamedArrow& x, const NamedArrow& y) { return x.name < y.name; });
  require_within_cap(named.size(), caps().max_arrows, "arrow table");

  std::map<std::string, ArrowId> arrow_index;
  for (ArrowId i = 0; i < named.size(); ++i) {
    cat->arrow_names_.push_back(named[i].name);
    cat->arrow_src_.push_back(named[i].src);
    cat->arrow_dst_.push_back(named[i].dst);
    arrow_index[named[i].name] = i;
  }

  const std::size_t n = cat->arrow_names_.size();
  cat->identity_.assign(cat->object_names_.size(), kNoArrow);
  for (ObjId o = 0; o < cat->object_names_.size(); ++o) {
    cat->identity_[o] = arrow_index.at("id_" + cat->object_names_[o]);
  }

  cat->compose_.assign(n * n, kNoArrow);
  auto set_composite = [&](ArrowId f, ArrowId g, ArrowId h) {
    ArrowId& slot = cat->compose_[std::size_t(f) * n + g];
    if (slot != kNoArrow && slot != h) {
      throw Error(ErrorCode::ValidationError,
                  "conflicting composites for (" + cat->arrow_names_[g] + " . " +
                      cat->arrow_names_[f] + ")");
    }
    slot = h;
  };

  // Identity laws pin down every composite involving an identity.
  for (ArrowId f = 0; f < n; ++f) {
    set_composite(cat->identity_[cat->arrow_src_[f]], f, f);
    set_composite(f, cat->identity_[cat->arrow_dst_[f]], f);
  }

  for (const auto& c : raw.composites) {
    auto fi = arrow_index.find(c.first);
    auto gi = arrow_index.find(c.second);
    auto hi = arrow_index.find(c.result);
    if (fi == arrow_index.end() || gi == arrow_index.end() ||
        hi == arrow_index.end()) {
      const std::string& missing = fi == arrow_index.end()   ? c.first
                                   : gi == arrow_index.end() ? c.second
                                                             : c.result;
      throw Error(ErrorCode::UnknownArrow,
                  "composite entry mentions unknown arrow '" + missing + "'");
    }
    ArrowId f = fi->second, g = gi->second, h = hi->second;
    if (cat->arrow_dst_[f] != cat->arrow_src_[g]) {
      throw Error(ErrorCode::ValidationError,
                  "(" + c.second + " . " + c.first + ") is not composable");
    }
    if (cat->arrow_src_[h] != cat->arrow_src_[f] ||
        cat->arrow_dst_[h] != cat->arrow_dst_[g]) {
      throw Error(ErrorCode::ValidationError,
                  "composite (" + c.second + " . " + c.first + ") = " + c.result +
                      " has mismatched endpoints");
    }
    auto check_identity_law = [&](ArrowId expected) {
      if (h != expected) {
        throw Error(ErrorCode::IdentityViolation,
                    "(" + c.second + " . " + c.first + ") = " + c.result +
                        " contradicts the identity law");
      }
    };
    if (cat->is_identity(f)) check_identity_law(g);
    if (cat->is_identity(g)) check_identity_law(f);
    set_composite(f, g, h);
  }

  // Remaining composable pairs: error, or unique inference under free_compose.
  for (ArrowId f = 0; f < n; ++f) {
    for (ArrowId g = 0; g < n; ++g) {
      if (cat->arrow_dst_[f] != cat->arrow_src_[g]) continue;
      if (cat->compose_[std::size_t(f) * n + g] != kNoArrow) continue;
      if (free_compose) {
        ArrowId candidate = kNoArrow;
        for (ArrowId h = 0; h < n; ++h) {
          if (cat->arrow_src_[h] == cat->arrow_src_[f] &&
              cat->arrow_dst_[h] == cat->arrow_dst_[g]) {
            if (candidate != kNoArrow) {
              throw Error(ErrorCode::MissingComposite,
                          "composite of " + arrow_label(*cat, f) + " and " +
                              arrow_label(*cat, g) + " is ambiguous");
            }
            candidate = h;
          }
        }
        if (candidate == kNoArrow) {
          throw Error(ErrorCode::MissingComposite,
                      "no candidate composite for " + arrow_label(*cat, f) +
                          " and " + arrow_label(*cat, g));
        }
        cat->compose_[std::size_t(f) * n + g] = candidate;
      } else {
        throw Error(ErrorCode::MissingComposite,
                    "missing composite for " + arrow_label(*cat, f) + " then " +
                        arrow_label(*cat, g));
      }
    }
  }

  cat->check_invariants();
  return cat;
}

void FinCat::check_invariants() const {
  const std::size_t n = arrow_src_.size();
  for (ArrowId f = 0; f < n; ++f) {
    for (ArrowId g = 0; g < n; ++g) {
      ArrowId h = compose_[std::size_t(f) * n + g];
      if (dst(f) != src(g)) {
        if (h != kNoArrow) {
          throw Error(ErrorCode::ValidationError,
                      "composite defined on non-composable pair (" +
                          arrow_names_[f] + ", " + arrow_names_[g] + ")");
        }
        continue;
      }
      if (h == kNoArrow) {
        throw Error(ErrorCode::MissingComposite,
                    "missing composite for " + arrow_label(*this, f) + " then " +
                        arrow_label(*this, g));
      }
      if (src(h) != src(f) || dst(h) != dst(g)) {
        throw Error(ErrorCode::AssociativityViolation,
                    "composite (" + arrow_names_[g] + " . " + arrow_names_[f] +
                        ") = " + arrow_names_[h] + " has wrong endpoints");
      }
    }
  }
  for (ArrowId f = 0; f < n; ++f) {
    if (compose(identity_[src(f)], f) != f || compose(f, identity_[dst(f)]) != f) {
      throw Error(ErrorCode::IdentityViolation,
                  "identity law fails at " + arrow_label(*this, f));
    }
  }
  for (ArrowId f = 0; f < n; ++f) {
    for (ArrowId g = 0; g < n; ++g) {
      if (dst(f) != src(g)) continue;
      for (ArrowId h = 0; h < n; ++h) {
        if (dst(g) != src(h)) continue;
        if (compose(compose(f, g), h) != compose(f, compose(g, h))) {
          throw Error(ErrorCode::AssociativityViolation,
                      "associativity fails on (" + arrow_names_[f] + ", " +
                          arrow_names_[g] + ", " + arrow_names_[h] + ")");
        }
      }
    }
  }
}

ObjId FinCat::object_id(const std::string& name) const {
  auto it = std::lower_bound(object_names_.begin(), object_names_.end(), name);
  if (it == object_names_.end() || *it != name) {
    throw Error(ErrorCode::UnknownObject, "no object named '" + name + "'");
  }
  return ObjId(it - object_names_.begin());
}

ArrowId FinCat::arrow_id(const std::string& name) const {
  auto it = std::lower_bound(arrow_names_.begin(), arrow_names_.end(), name);
  if (it == arrow_names_.end() || *it != name) {
    throw Error(ErrorCode::UnknownArrow, "no arrow named '" + name + "'");
  }
  return ArrowId(it - arrow_names_.begin());
}

std::vector<ArrowId> FinCat::hom(ObjId a, ObjId b) const {
  if (a >= object_count() || b >= object_count()) {
    throw Error(ErrorCode::UnknownObject, "hom endpoint out of range");
  }
  std::vector<ArrowId> out;
  for (ArrowId f = 0; f < arrow_src_.size(); ++f) {
    if (arrow_src_[f] == a && arrow_dst_[f] == b) out.push_back(f);
  }
  return out;
}

std::vector<ArrowId> FinCat::arrows_into(ObjId b) const {
  std::vector<ArrowId> out;
  for (ArrowId f = 0; f < arrow_src_.size(); ++f) {
    if (arrow_dst_[f] == b) out.push_back(f);
  }
  return out;
}

std::shared_ptr<const FinCat> FinCat::opposite() const {
  auto cat = std::shared_ptr<FinCat>(new FinCat());
  cat->object_names_ = object_names_;
  cat->arrow_names_ = arrow_names_;
  cat->arrow_src_ = arrow_dst_;
  cat->arrow_dst_ = arrow_src_;
  cat->identity_ = identity_;
  const std::size_t n = arrow_src_.size();
  cat->compose_.assign(n * n, kNoArrow);
  for (ArrowId f = 0; f < n; ++f) {
    for (ArrowId g = 0; g < n; ++g) {
      // (f then g) in the opposite is (g then f) here.
      cat->compose_[std::size_t(f) * n + g] = compose_[std::size_t(g) * n + f];
    }
  }
  cat->check_invariants();
  return cat;
}

bool FinCat::operator==(const FinCat& other) const {
  return object_names_ == other.object_names_ &&
         arrow_names_ == other.arrow_names_ && arrow_src_ == other.arrow_src_ &&
         arrow_dst_ == other.arrow_dst_ && identity_ == other.identity_ &&
         compose_ == other.compose_;
}

FinFunctor::FinFunctor(FinCatPtr domain, FinCatPtr codomain,
                       std::vector<ObjId> object_map,
                       std::vector<ArrowId> arrow_map)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      object_map_(std::move(object_map)),
      arrow_map_(std::move(arrow_map)) {
  if (object_map_.size() != domain_->object_count() ||
      arrow_map_.size() != domain_->arrow_count()) {
    throw Error(ErrorCode::ShapeMismatch, "functor tables have wrong size");
  }
  for (ArrowId f = 0; f < domain_->arrow_count(); ++f) {
    ArrowId ff = arrow_map_[f];
    if (codomain_->src(ff) != object_map_[domain_->src(f)] ||
        codomain_->dst(ff) != object_map_[domain_->dst(f)]) {
      throw Error(ErrorCode::ValidationError,
                  "functor breaks sources/targets at '" + domain_->arrow_name(f) + "'");
    }
  }
  for (ObjId o = 0; o < domain_->object_count(); ++o) {
    if (arrow_map_[domain_->identity(o)] != codomain_->identity(object_map_[o])) {
      throw Error(ErrorCode::ValidationError,
                  "functor breaks the identity at '" + domain_->object_name(o) + "'");
    }
  }
  for (ArrowId f = 0; f < domain_->arrow_count(); ++f) {
    for (ArrowId g = 0; g < domain_->arrow_count(); ++g) {
      if (!domain_->composable(f, g)) continue;
      if (arrow_map_[domain_->compose(f, g)] !=
          codomain_->compose(arrow_map_[f], arrow_map_[g])) {
        throw Error(ErrorCode::ValidationError,
                    "functor breaks composition on (" + domain_->arrow_name(f) +
                        ", " + domain_->arrow_name(g) + ")");
      }
    }
  }
}

bool same_site(const FinCatPtr& a, const FinCatPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace toposcalc
