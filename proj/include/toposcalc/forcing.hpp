#pragma once

#include <string>
#include <vector>

#include "toposcalc/sheaf.hpp"

namespace toposcalc {

struct ThetaSpec {
  enum class Kind { Iso, Surj, Mono, Conn };
  Kind kind = Kind::Iso;
  int n = 0;  // connectivity index; kConnInfinity for the infinite case

  static ThetaSpec iso() { return {Kind::Iso, 0}; }
  static ThetaSpec surj() { return {Kind::Surj, 0}; }
  static ThetaSpec mono() { return {Kind::Mono, 0}; }
  static ThetaSpec conn(int n) { return {Kind::Conn, n}; }

  std::string name() const;
};

struct ForcingCondition {
  std::vector<PresheafMap> sigma;
  ThetaSpec theta;
};

struct GeneratorVerdict {
  std::size_t generator = 0;
  bool forced = false;
};

struct CompileResult {
  LocalizationHandle handle;
  std::vector<Sieve> generating_sieves;       // before saturation
  std::vector<GeneratorVerdict> verification;  // one entry per sigma member
};

// Rewrites the forcing condition to a Grothendieck topology:
//   Surj     -> generate(im Sigma)
//   Mono     -> compile(Delta Sigma, Iso)
//   Conn(n)  -> generate(im Delta^{<=n+1} Sigma)
//   Conn(oo) -> generate(im Sigma^Delta), tower truncated at stabilization
//   Iso      -> generate(im Sigma^Delta), then generator inversion verified
// The verification step checks that every sigma member acquires theta in the
// sheaf category, and raises IsoForcingIncomplete when Iso forcing fails.
CompileResult compile(const FinCatPtr& base, const ForcingCondition& fc);

// Whether all sigma members have theta after sheafification at g (the theta
// is read in the sheaf topos: surjectivity and connectivity via inverted
// images of diagonals, per the localization's covering characterization).
bool forces(const GrothTopology& g, const ForcingCondition& fc);

// The compiled topology must be the least element of the enumerated poset
// whose handle forces the condition. Throws EnumerationUnavailable when the
// site cannot be enumerated.
bool minimality_check(const FinCatPtr& base, const ForcingCondition& fc,
                      const GrothTopology& compiled);

// generate(im Delta^k f), the topological part of the congruence generated
// by Sigma; equals compile(Sigma, Conn(oo)).
GrothTopology topological_part(const FinCatPtr& base,
                               const std::vector<PresheafMap>& sigma);

// All iterated diagonals have covering images (tower truncated at its
// asserted stabilization height).
bool is_hypercovering(const PresheafMap& f, const GrothTopology& g);

struct TcFactorization {
  LocalizationHandle topological;
  // Per covering-sieve mono: whether the reflector inverts it; the trace of
  // W cap Mono used to rebuild the topological leg.
  std::vector<std::vector<bool>> inverted_sieves;
  bool residual_trivial = false;
};

// Extracts W cap Mono through the inverts predicate on representable sieves,
// regenerates the topological leg and checks the residual is trivial.
// Throws ResidualNotTrivial when the reflector inverts a non-covering sieve
// (impossible in this fragment; the check is the executable theorem).
TcFactorization tc_factor(const LocalizationHandle& handle);

struct LocConsEntry {
  std::size_t map_index = 0;
  bool source_iso = false;
  bool localized_iso = false;
  bool conservative_ok() const { return source_iso == localized_iso; }
};

struct LocConsResult {
  GrothTopology finer;  // G' of the nested pair
  std::vector<LocConsEntry> report;
  bool all_conservative = true;
};

// The induced morphism Sh(G) -> Sh(G') for nested topologies G <= G' is the
// localization leg; the conservative check runs on a corpus of maps between
// G'-sheaves. Throws NotNested.
LocConsResult loc_cons_factor(const LocalizationHandle& coarse,
                              const LocalizationHandle& fine,
                              const std::vector<PresheafMap>& corpus);

}  // namespace toposcalc
