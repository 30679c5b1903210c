#include "toposcalc/factor.hpp"

namespace toposcalc {

Subobject closure(const LTTopology& lt, const Subobject& s) {
  PresheafMap chi = classify(lt.omega(), s);
  PresheafMap j_chi = compose_maps(chi, lt.j());
  return pullback_truth(lt.omega(), j_chi);
}

bool is_dense(const LTTopology& lt, const Subobject& s) {
  return closure(lt, s).is_whole();
}

bool is_closed(const LTTopology& lt, const Subobject& s) {
  return closure(lt, s) == s;
}

Factorization dense_closed_factor(const PresheafMap& mono,
                                  const LTTopology& lt) {
  if (!is_mono(mono)) {
    throw Error(ErrorCode::NotAMono, "dense-closed factorization of a non-mono");
  }
  Subobject s = subobject_of_map(mono);
  Subobject middle = closure(lt, s);
  PresheafMap right = mono_of_subobject(middle);
  auto left = factor_through_mono(mono, right);
  if (!left.has_value()) {
    throw Error(ErrorCode::ValidationError, "closure lost the subobject");
  }
  // The left part is dense in the middle and the middle is closed; both are
  // re-checked rather than trusted.
  if (!is_dense(lt, subobject_of_map(*left))) {
    throw Error(ErrorCode::ValidationError, "dense part is not dense");
  }
  if (!is_closed(lt, middle)) {
    throw Error(ErrorCode::ValidationError, "closure is not closed");
  }
  return Factorization{std::move(*left), std::move(right), std::move(middle)};
}

CoverClosedFactorization cover_closed_factor(const PresheafMap& f,
                                             const GrothTopology& g) {
  LTTopology lt = groth_to_lt(g);
  ImageFactorization image = image_factorization(f);
  Factorization dc = dense_closed_factor(image.im, lt);
  PresheafMap covering = compose_maps(image.coim, dc.left);
  if (!covering_class(g).member(covering)) {
    throw Error(ErrorCode::ValidationError,
                "left factor escaped the covering class");
  }
  return CoverClosedFactorization{std::move(covering), std::move(dc.right)};
}

std::size_t count_fillers(const LiftingProblem& p) {
  std::size_t count = 0;
  for (const PresheafMap& d : enumerate_maps(p.u.target(), p.f.source())) {
    if (compose_maps(p.u, d) == p.top && compose_maps(d, p.f) == p.bottom) {
      ++count;
    }
  }
  return count;
}

std::vector<LiftingProblem> enumerate_lifting_problems(const PresheafMap& u,
                                                       const PresheafMap& f) {
  std::vector<LiftingProblem> out;
  auto tops = enumerate_maps(u.source(), f.source());
  auto bottoms = enumerate_maps(u.target(), f.target());
  for (const auto& top : tops) {
    PresheafMap around = compose_maps(top, f);
    for (const auto& bottom : bottoms) {
      if (compose_maps(u, bottom) == around) {
        out.push_back(LiftingProblem{u, f, top, bottom});
      }
    }
  }
  return out;
}

bool check_orthogonal(const PresheafMap& u, const PresheafMap& f) {
  auto fillers = enumerate_maps(u.target(), f.source());
  auto tops = enumerate_maps(u.source(), f.source());
  auto bottoms = enumerate_maps(u.target(), f.target());
  for (const auto& top : tops) {
    PresheafMap around = compose_maps(top, f);
    for (const auto& bottom : bottoms) {
      if (compose_maps(u, bottom) != around) continue;
      std::size_t count = 0;
      for (const PresheafMap& d : fillers) {
        if (compose_maps(u, d) == top && compose_maps(d, f) == bottom) ++count;
        if (count > 1) break;
      }
      if (count != 1) return false;
    }
  }
  return true;
}

bool check_fiberwise_orthogonal(const PresheafMap& u, const PresheafMap& f,
                                const std::vector<PresheafMap>& universe) {
  for (const PresheafMap& g : universe) {
    if (g.target() != u.target()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "universe map does not land in the codomain of u");
    }
    PullbackResult pb = pullback(g, u);
    if (!check_orthogonal(pb.to_left, f)) return false;
  }
  return true;
}

}  // namespace toposcalc
