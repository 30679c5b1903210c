#include "toposcalc/forcing.hpp"

#include <algorithm>

#include "toposcalc/caps.hpp"

namespace toposcalc {

std::string ThetaSpec::name() const {
  switch (kind) {
    case Kind::Iso: return "iso";
    case Kind::Surj: return "surj";
    case Kind::Mono: return "mono";
    case Kind::Conn:
      return n == kConnInfinity ? "conn:inf" : "conn:" + std::to_string(n);
  }
  return "?";
}

namespace {

// Iterated diagonals up to the stabilization height of the set-level tower:
// the first diagonal is mono, the second is invertible, so height 2 carries
// everything. The stabilization is asserted, not assumed.
std::vector<PresheafMap> diagonal_tower(const PresheafMap& f, unsigned max_height) {
  std::vector<PresheafMap> tower;
  tower.push_back(f);
  for (unsigned k = 1; k <= max_height; ++k) {
    tower.push_back(diagonal(tower.back()));
  }
  if (!is_iso(tower.back())) {
    throw Error(ErrorCode::ValidationError,
                "diagonal tower failed to stabilize at height " +
                    std::to_string(max_height));
  }
  return tower;
}

std::vector<PresheafMap> image_monos(const std::vector<PresheafMap>& maps) {
  std::vector<PresheafMap> out;
  out.reserve(maps.size());
  for (const auto& f : maps) out.push_back(image_factorization(f).im);
  return out;
}

// sigma members rewritten to the mono generators of the target topology.
std::vector<PresheafMap> generators_for(const ForcingCondition& fc) {
  std::vector<PresheafMap> gens;
  switch (fc.theta.kind) {
    case ThetaSpec::Kind::Surj:
      return image_monos(fc.sigma);
    case ThetaSpec::Kind::Mono: {
      std::vector<PresheafMap> diag;
      for (const auto& f : fc.sigma) diag.push_back(diagonal(f));
      ForcingCondition inner{std::move(diag), ThetaSpec::iso()};
      return generators_for(inner);
    }
    case ThetaSpec::Kind::Conn: {
      for (const auto& f : fc.sigma) {
        unsigned height =
            fc.theta.n == kConnInfinity
                ? 2u
                : std::min(unsigned(std::max(fc.theta.n, -1) + 1), 4u);
        auto tower = diagonal_tower(f, std::max(height, 2u));
        for (unsigned k = 0; k <= height; ++k) {
          gens.push_back(image_factorization(tower[k]).im);
        }
      }
      return gens;
    }
    case ThetaSpec::Kind::Iso: {
      for (const auto& f : fc.sigma) {
        auto tower = diagonal_tower(f, 2);
        for (const auto& d : tower) {
          gens.push_back(image_factorization(d).im);
        }
      }
      return gens;
    }
  }
  return gens;
}

// theta read in the sheaf category: invertibility and monicity transfer
// pointwise, surjectivity and connectivity go through inverted images of
// diagonals (a map becomes surjective in Sh(G) iff its image is inverted).
bool forced_in_sheaves(const LocalizationHandle& handle, const PresheafMap& f,
                       const ThetaSpec& theta) {
  switch (theta.kind) {
    case ThetaSpec::Kind::Iso:
      return handle.inverts(f);
    case ThetaSpec::Kind::Mono:
      return is_mono(handle.sheafify_map(f));
    case ThetaSpec::Kind::Surj:
      return handle.inverts(image_factorization(f).im);
    case ThetaSpec::Kind::Conn: {
      unsigned height = theta.n == kConnInfinity
                            ? 2u
                            : std::min(unsigned(std::max(theta.n, -1) + 1), 4u);
      auto tower = diagonal_tower(f, std::max(height, 2u));
      for (unsigned k = 0; k <= height; ++k) {
        if (!handle.inverts(image_factorization(tower[k]).im)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

CompileResult compile(const FinCatPtr& base, const ForcingCondition& fc) {
  for (const auto& f : fc.sigma) {
    if (!same_site(f.source().base(), base)) {
      throw Error(ErrorCode::ShapeMismatch, "sigma member lives on another site");
    }
  }
  std::vector<PresheafMap> gens = generators_for(fc);
  std::vector<Sieve> sieves;
  for (const auto& m : gens) {
    auto induced = sieves_of_mono(m);
    sieves.insert(sieves.end(), induced.begin(), induced.end());
  }
  GrothTopology topology = generate_from_sieves(base, sieves);
  LocalizationHandle handle(topology);

  CompileResult result{handle, std::move(sieves), {}};
  for (std::size_t i = 0; i < fc.sigma.size(); ++i) {
    bool ok = forced_in_sheaves(handle, fc.sigma[i], fc.theta);
    result.verification.push_back({i, ok});
    if (!ok) {
      if (fc.theta.kind == ThetaSpec::Kind::Iso) {
        throw Error(ErrorCode::IsoForcingIncomplete,
                    "generator " + std::to_string(i) +
                        " is not inverted by its own compiled localization");
      }
      throw Error(ErrorCode::ValidationError,
                  "generator " + std::to_string(i) +
                      " did not acquire " + fc.theta.name());
    }
  }
  return result;
}

bool forces(const GrothTopology& g, const ForcingCondition& fc) {
  LocalizationHandle handle(g);
  for (const auto& f : fc.sigma) {
    if (!forced_in_sheaves(handle, f, fc.theta)) return false;
  }
  return true;
}

bool minimality_check(const FinCatPtr& base, const ForcingCondition& fc,
                      const GrothTopology& compiled) {
  std::vector<GrothTopology> all;
  try {
    all = enumerate_topologies(base);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SizeCapExceeded) {
      throw Error(ErrorCode::EnumerationUnavailable,
                  "site too large for the enumerated minimality surrogate");
    }
    throw;
  }
  bool compiled_seen = false;
  for (const GrothTopology& g : all) {
    if (!forces(g, fc)) continue;
    if (g == compiled) compiled_seen = true;
    if (!topology_leq(compiled, g)) return false;
  }
  return compiled_seen;
}

GrothTopology topological_part(const FinCatPtr& base,
                               const std::vector<PresheafMap>& sigma) {
  ForcingCondition fc{sigma, ThetaSpec::conn(kConnInfinity)};
  std::vector<PresheafMap> gens = generators_for(fc);
  return generate(base, gens);
}

bool is_hypercovering(const PresheafMap& f, const GrothTopology& g) {
  auto tower = diagonal_tower(f, 2);
  for (const auto& d : tower) {
    if (!mono_in_topology(g, image_factorization(d).im)) return false;
  }
  return true;
}

TcFactorization tc_factor(const LocalizationHandle& handle) {
  const GrothTopology& g = handle.topology();
  const SieveTable& table = *g.table();
  const FinCat& cat = *g.base();

  std::vector<std::vector<bool>> inverted(cat.object_count());
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    inverted[c].resize(table.count(c));
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      inverted[c][i] = handle.inverts(sieve_mono(table.sieves(c)[i]));
    }
  }
  // W cap Mono on representable sieves must be exactly the covering sieves:
  // a strict excess means the residual would invert a mono, i.e. fail to be
  // cotopological; a deficit would mean a dense mono survived sheafification.
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (inverted[c][i] && !g.covers(c, i)) {
        throw Error(ErrorCode::ResidualNotTrivial,
                    "reflector inverts a non-covering sieve on '" +
                        cat.object_name(c) + "'");
      }
      if (!inverted[c][i] && g.covers(c, i)) {
        throw Error(ErrorCode::ResidualNotTrivial,
                    "covering sieve on '" + cat.object_name(c) +
                        "' is not inverted by the reflector");
      }
    }
  }

  std::vector<Sieve> trace;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    for (std::uint32_t i = 0; i < table.count(c); ++i) {
      if (inverted[c][i]) trace.push_back(table.sieves(c)[i]);
    }
  }
  GrothTopology regenerated = generate_from_sieves(g.base(), trace);
  if (!(regenerated == g)) {
    throw Error(ErrorCode::ResidualNotTrivial,
                "topological leg differs from the original localization");
  }
  return TcFactorization{LocalizationHandle(regenerated), std::move(inverted),
                         true};
}

LocConsResult loc_cons_factor(const LocalizationHandle& coarse,
                              const LocalizationHandle& fine,
                              const std::vector<PresheafMap>& corpus) {
  if (!same_site(coarse.base(), fine.base())) {
    throw Error(ErrorCode::ShapeMismatch, "handles live on different sites");
  }
  if (!topology_leq(coarse.topology(), fine.topology())) {
    throw Error(ErrorCode::NotNested, "topologies are not nested");
  }
  LocConsResult result{fine.topology(), {}, true};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    // Present the corpus map inside Sh(G'): sheafify at the fine topology,
    // then ask whether the identity-like conservative leg reflects isos.
    PresheafMap presented = fine.sheafify_map(corpus[i]);
    LocConsEntry entry;
    entry.map_index = i;
    entry.source_iso = is_iso(presented);
    entry.localized_iso = is_iso(fine.sheafify_map(presented));
    result.report.push_back(entry);
    if (!entry.conservative_ok()) result.all_conservative = false;
  }
  return result;
}

}  // namespace toposcalc
