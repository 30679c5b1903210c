#pragma once

#include <vector>

#include "toposcalc/topology.hpp"

namespace toposcalc {

// j_A(S): pullback of the truth along j . chi_S. Action-closed, inflating,
// idempotent.
Subobject closure(const LTTopology& lt, const Subobject& s);

bool is_dense(const LTTopology& lt, const Subobject& s);
bool is_closed(const LTTopology& lt, const Subobject& s);

struct Factorization {
  PresheafMap left;
  PresheafMap right;
  Subobject middle;  // canonical subobject form of the middle object
};

// Unique dense-then-closed decomposition of a mono. Throws NotAMono.
Factorization dense_closed_factor(const PresheafMap& mono, const LTTopology& lt);

struct CoverClosedFactorization {
  PresheafMap covering;  // member of Cover(G)
  PresheafMap closed;    // j-closed mono
};

// f = Close(im f) . (Dense(im f) . coim f); the modality factorization.
CoverClosedFactorization cover_closed_factor(const PresheafMap& f,
                                             const GrothTopology& g);

struct LiftingProblem {
  PresheafMap u;       // left map A -> B
  PresheafMap f;       // right map X -> Y
  PresheafMap top;     // A -> X
  PresheafMap bottom;  // B -> Y, with f.top == bottom.u
};

std::size_t count_fillers(const LiftingProblem& p);

// All commuting squares from u to f.
std::vector<LiftingProblem> enumerate_lifting_problems(const PresheafMap& u,
                                                       const PresheafMap& f);

// u is left orthogonal to f: every square has exactly one filler.
bool check_orthogonal(const PresheafMap& u, const PresheafMap& f);

// Every base change of u along a universe map into cod(u) is orthogonal to f.
bool check_fiberwise_orthogonal(const PresheafMap& u, const PresheafMap& f,
                                const std::vector<PresheafMap>& universe);

}  // namespace toposcalc
