#include "toposcalc/report.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "toposcalc/factor.hpp"

namespace toposcalc {

namespace {

std::vector<Presheaf> small_corpus(const FinCatPtr& site) {
  std::vector<Presheaf> out;
  out.push_back(initial_presheaf(site));
  out.push_back(terminal_presheaf(site));
  out.push_back(discrete_presheaf(site, 2));
  for (ObjId c = 0; c < site->object_count(); ++c) out.push_back(yoneda(site, c));
  SieveTablePtr table = sieve_table(site);
  for (ObjId c = 0; c < site->object_count(); ++c) {
    for (std::uint32_t i = 0; i + 1 < table->count(c); ++i) {
      Presheaf sp = sieve_presheaf(table->sieves(c)[i]);
      if (std::find(out.begin(), out.end(), sp) == out.end()) out.push_back(sp);
    }
  }
  return out;
}

std::vector<PresheafMap> small_map_corpus(const FinCatPtr& site,
                                          std::size_t per_pair = 8) {
  std::vector<PresheafMap> out;
  auto objs = small_corpus(site);
  for (const auto& x : objs) {
    for (const auto& y : objs) {
      auto maps = enumerate_maps(x, y);
      for (std::size_t i = 0; i < maps.size() && i < per_pair; ++i) {
        out.push_back(maps[i]);
      }
    }
  }
  return out;
}

std::vector<PresheafMap> sieve_monos(const FinCatPtr& site) {
  std::vector<PresheafMap> out;
  SieveTablePtr table = sieve_table(site);
  for (ObjId c = 0; c < site->object_count(); ++c) {
    for (std::uint32_t i = 0; i < table->count(c); ++i) {
      out.push_back(sieve_mono(table->sieves(c)[i]));
    }
  }
  return out;
}

Json suite_bijections(const FinCatPtr& site, bool& pass) {
  Json details;
  auto gts = enumerate_topologies(site);
  auto lts = enumerate_closure_operators(site);
  details["grothendieck_count"] = gts.size();
  details["lawvere_tierney_count"] = lts.size();
  pass = gts.size() == lts.size();
  bool round_trips = true;
  for (const auto& g : gts) {
    if (!(lt_to_groth(groth_to_lt(g)) == g)) round_trips = false;
  }
  bool order_iso = true;
  for (const auto& j1 : lts) {
    for (const auto& j2 : lts) {
      if (lt_leq(j1, j2) != topology_leq(lt_to_groth(j1), lt_to_groth(j2))) {
        order_iso = false;
      }
    }
  }
  details["round_trips"] = round_trips;
  details["order_isomorphism"] = order_iso;
  pass = pass && round_trips && order_iso;
  return details;
}

Json suite_frame(const FinCatPtr& site, bool& pass) {
  Json details;
  auto all = enumerate_topologies(site);
  const std::size_t n = all.size();
  details["poset_size"] = n;
  pass = true;
  if (n > 20) {
    throw Error(ErrorCode::SizeCapExceeded, "poset too large for the frame suite");
  }
  // Meets distribute over arbitrary joins: sweep every subset over
  // precomputed index-level meet/join tables.
  auto index_of = [&](const GrothTopology& g) {
    for (std::size_t i = 0; i < n; ++i) {
      if (all[i] == g) return i;
    }
    throw Error(ErrorCode::ValidationError, "operation left the poset");
  };
  std::vector<std::vector<std::size_t>> meet(n, std::vector<std::size_t>(n));
  std::vector<std::vector<std::size_t>> join(n, std::vector<std::size_t>(n));
  std::size_t bottom = index_of(minimal_topology(site));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      meet[i][j] = index_of(topology_meet(all[i], all[j]));
      join[i][j] = index_of(topology_join(all[i], all[j]));
    }
  }
  std::size_t checked = 0;
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      std::size_t join_all = bottom;
      std::size_t join_meets = bottom;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(mask >> i & 1)) continue;
        join_all = join[join_all][i];
        join_meets = join[join_meets][meet[g][i]];
      }
      if (meet[g][join_all] != join_meets) pass = false;
      ++checked;
    }
  }
  details["instances_checked"] = checked;
  return details;
}

Json suite_modality(const FinCatPtr& site, bool& pass) {
  Json details;
  pass = true;
  auto monos = sieve_monos(site);
  auto corpus = small_map_corpus(site, 4);
  std::size_t factored = 0, squares = 0;
  for (const GrothTopology& g : enumerate_topologies(site)) {
    LTTopology j = groth_to_lt(g);
    CoveringClass cover = covering_class(g);
    for (const PresheafMap& m : monos) {
      Factorization fact = dense_closed_factor(m, j);
      if (!(compose_maps(fact.left, fact.right) == m)) pass = false;
      if (!is_dense(j, subobject_of_map(fact.left))) pass = false;
      if (!is_closed(j, fact.middle)) pass = false;
    }
    std::vector<PresheafMap> dense, closed;
    for (const PresheafMap& m : monos) {
      if (is_dense(j, subobject_of_map(m))) dense.push_back(m);
      if (is_closed(j, subobject_of_map(m))) closed.push_back(m);
    }
    for (const PresheafMap& d : dense) {
      for (const PresheafMap& z : closed) {
        if (!check_orthogonal(d, z)) pass = false;
        ++squares;
      }
    }
    for (const PresheafMap& u : corpus) {
      CoverClosedFactorization fact = cover_closed_factor(u, g);
      if (!(compose_maps(fact.covering, fact.closed) == u)) pass = false;
      if (!cover.member(fact.covering)) pass = false;
      if (!is_closed(j, subobject_of_map(fact.closed))) pass = false;
      ++factored;
    }
  }
  details["maps_factored"] = factored;
  details["orthogonality_pairs"] = squares;
  return details;
}

Json suite_forcing(const FinCatPtr& site, bool& pass) {
  Json details;
  pass = true;
  auto corpus = small_map_corpus(site, 3);
  std::mt19937 rng(20240 + std::uint32_t(site->arrow_count()));
  std::size_t rounds = 0;
  for (int round = 0; round < 20 && !corpus.empty(); ++round) {
    std::vector<PresheafMap> sigma;
    std::size_t n = 1 + rng() % 2;
    for (std::size_t i = 0; i < n; ++i) sigma.push_back(corpus[rng() % corpus.size()]);
    CompileResult surj = compile(site, {sigma, ThetaSpec::surj()});
    std::vector<PresheafMap> images;
    for (const auto& f : sigma) images.push_back(image_factorization(f).im);
    CompileResult iso = compile(site, {images, ThetaSpec::iso()});
    if (!(surj.handle.topology() == iso.handle.topology())) pass = false;
    for (const Presheaf& x : small_corpus(site)) {
      if (is_sheaf(x, surj.handle.topology()) != is_sheaf(x, iso.handle.topology())) {
        pass = false;
      }
    }
    CompileResult mono = compile(site, {sigma, ThetaSpec::mono()});
    std::vector<PresheafMap> diagonals;
    for (const auto& f : sigma) diagonals.push_back(diagonal(f));
    CompileResult diso = compile(site, {diagonals, ThetaSpec::iso()});
    if (!(mono.handle.topology() == diso.handle.topology())) pass = false;
    ++rounds;
  }
  details["randomized_rounds"] = rounds;
  return details;
}

Json suite_degeneracy(const FinCatPtr& site, bool& pass) {
  Json details;
  pass = true;
  auto corpus = small_map_corpus(site, 3);
  for (const PresheafMap& u : corpus) {
    if (!is_mono(iterated_diagonal(u, 2))) pass = false;
    if (is_n_connected(u, kConnInfinity) != is_iso(u)) pass = false;
  }
  std::size_t handles = 0;
  for (const GrothTopology& g : enumerate_topologies(site)) {
    LocalizationHandle handle(g);
    TcFactorization fact = tc_factor(handle);
    if (!fact.residual_trivial) pass = false;
    if (!(fact.topological.topology() == g)) pass = false;
    for (const PresheafMap& m : sieve_monos(site)) {
      if (is_hypercovering(m, g) != mono_in_topology(g, m)) pass = false;
    }
    ++handles;
  }
  details["corpus_maps"] = corpus.size();
  details["handles"] = handles;
  return details;
}

}  // namespace

Json Report::to_json() const {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  j["input_digest"] = input_digest;
  j["ok"] = ok;
  j["results"] = results;
  return j;
}

namespace {

void render_json_lines(const Json& j, const std::string& prefix,
                       std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      render_json_lines(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& value : j) {
      render_json_lines(value, prefix + "[" + std::to_string(i++) + "]", out);
    }
  } else {
    out << prefix << " = " << j.dump() << "\n";
  }
}

}  // namespace

std::string Report::to_table() const {
  std::ostringstream out;
  out << "command        " << command << "\n";
  out << "input_digest   " << input_digest << "\n";
  out << "ok             " << (ok ? "true" : "false") << "\n";
  render_json_lines(results, "", out);
  return out.str();
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

GrothTopology topology_from_document(const SiteDocument& doc, bool strict) {
  if (!doc.has_coverage) return minimal_topology(doc.site);
  if (strict) {
    std::vector<std::vector<Sieve>> raw(doc.site->object_count());
    for (const auto& entry : doc.coverage) {
      raw[entry.object].push_back(entry.sieve);
    }
    return check_axioms(doc.site, raw);
  }
  std::vector<Sieve> sieves;
  for (const auto& entry : doc.coverage) sieves.push_back(entry.sieve);
  return generate_from_sieves(doc.site, sieves);
}

Json sieve_to_json(const FinCat& cat, const Sieve& s) {
  Json arr = Json::array();
  for (ArrowId f : s.arrows()) arr.push_back(cat.arrow_name(f));
  return arr;
}

Json topology_to_json(const GrothTopology& g) {
  const FinCat& cat = *g.base();
  Json covers;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    Json list = Json::array();
    for (const Sieve& s : g.covering_sieves(c)) {
      list.push_back(sieve_to_json(cat, s));
    }
    covers[cat.object_name(c)] = list;
  }
  return covers;
}

Report cmd_enumerate_topologies(const SiteDocument& doc,
                                const std::string& digest) {
  Report report{"enumerate-topologies", digest, Json::object(), true};
  auto all = enumerate_topologies(doc.site);
  report.results["count"] = all.size();
  Json list = Json::array();
  for (const auto& g : all) list.push_back(topology_to_json(g));
  report.results["topologies"] = list;
  return report;
}

Report cmd_omega(const SiteDocument& doc, const std::string& digest) {
  Report report{"omega", digest, Json::object(), true};
  OmegaObject om = omega(doc.site);
  const FinCat& cat = *doc.site;
  Json carriers;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    Json list = Json::array();
    for (const Sieve& s : om.table->sieves(c)) list.push_back(sieve_to_json(cat, s));
    carriers[cat.object_name(c)] = list;
  }
  report.results["carriers"] = carriers;
  Json counts;
  bool cross_check = true;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    std::size_t via_sieves = om.omega.card(c);
    std::size_t via_subobjects = subobjects(yoneda(doc.site, c)).size();
    counts[cat.object_name(c)] = {{"sieves", via_sieves},
                                  {"representable_subobjects", via_subobjects}};
    if (via_sieves != via_subobjects) cross_check = false;
  }
  report.results["counts"] = counts;
  report.results["cross_check"] = cross_check;
  report.ok = cross_check;
  return report;
}

Report cmd_sheafify(const SiteDocument& doc, const std::string& digest,
                    const std::string& presheaf_name, bool strict) {
  Report report{"sheafify", digest, Json::object(), true};
  GrothTopology g = topology_from_document(doc, strict);
  const auto& named = doc.presheaf(presheaf_name);
  report.results["presheaf"] = presheaf_name;
  report.results["topology"] = topology_to_json(g);
  report.results["was_sheaf"] = is_sheaf(named.value, g);

  const FinCat& cat = *doc.site;
  Json families;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    Json per_sieve = Json::array();
    for (const Sieve& s : g.covering_sieves(c)) {
      per_sieve.push_back(
          {{"sieve", sieve_to_json(cat, s)},
           {"matching_families", matching_families(s, named.value).size()}});
    }
    families[cat.object_name(c)] = per_sieve;
  }
  report.results["matching_families"] = families;

  SheafifyResult l = sheafify(named.value, g);
  Json carriers;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    carriers[cat.object_name(c)] = l.sheaf.card(c);
  }
  report.results["sheaf_carriers"] = carriers;
  Json unit;
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    Json comp = Json::array();
    for (std::uint32_t x = 0; x < named.value.card(c); ++x) {
      comp.push_back({{"element", named.labels[c][x]},
                      {"class", l.unit.at(c, x)}});
    }
    unit[cat.object_name(c)] = comp;
  }
  report.results["unit"] = unit;
  report.results["is_sheaf_after"] = is_sheaf(l.sheaf, g);
  report.results["unit_is_iso"] = is_iso(l.unit);
  report.ok = report.results["is_sheaf_after"].get<bool>();
  return report;
}

Report cmd_factor(const SiteDocument& doc, const std::string& digest,
                  const std::string& map_name, bool strict) {
  Report report{"factor", digest, Json::object(), true};
  GrothTopology g = topology_from_document(doc, strict);
  const auto& named = doc.map(map_name);
  report.results["map"] = map_name;
  report.results["topology"] = topology_to_json(g);
  const FinCat& cat = *doc.site;
  if (is_mono(named.value)) {
    LTTopology j = groth_to_lt(g);
    Factorization fact = dense_closed_factor(named.value, j);
    report.results["kind"] = "dense-closed";
    Json middle;
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      middle[cat.object_name(c)] = fact.middle.ambient().card(c) == 0
                                       ? Json::array()
                                       : [&] {
                                           Json sel = Json::array();
                                           for (std::uint32_t x = 0;
                                                x < fact.middle.ambient().card(c);
                                                ++x) {
                                             if (fact.middle.contains(c, x)) {
                                               sel.push_back(x);
                                             }
                                           }
                                           return sel;
                                         }();
    }
    report.results["middle_selection"] = middle;
    report.results["left_is_dense"] = is_dense(j, subobject_of_map(fact.left));
    report.results["right_is_closed"] = is_closed(j, fact.middle);
    report.ok = report.results["left_is_dense"].get<bool>() &&
                report.results["right_is_closed"].get<bool>();
  } else {
    CoverClosedFactorization fact = cover_closed_factor(named.value, g);
    report.results["kind"] = "cover-closed";
    Json middle;
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      middle[cat.object_name(c)] = fact.covering.target().card(c);
    }
    report.results["middle_carriers"] = middle;
    report.results["left_is_covering"] = covering_class(g).member(fact.covering);
    report.results["right_is_closed_mono"] =
        is_mono(fact.closed) &&
        is_closed(groth_to_lt(g), subobject_of_map(fact.closed));
    report.ok = report.results["left_is_covering"].get<bool>() &&
                report.results["right_is_closed_mono"].get<bool>();
  }
  return report;
}

Report cmd_force(const SiteDocument& doc, const SiteDocument& sigma_doc,
                 const std::string& digest, const ThetaSpec& theta,
                 bool strict) {
  (void)strict;
  Report report{"force", digest, Json::object(), true};
  std::vector<PresheafMap> sigma;
  Json names = Json::array();
  for (const auto& m : sigma_doc.maps) {
    sigma.push_back(m.value);
    names.push_back(m.name);
  }
  report.results["sigma"] = names;
  report.results["theta"] = theta.name();
  CompileResult r = compile(doc.site, {sigma, theta});
  report.results["topology"] = topology_to_json(r.handle.topology());
  Json transcript = Json::array();
  for (const auto& v : r.verification) {
    transcript.push_back({{"generator", sigma_doc.maps[v.generator].name},
                          {"forced", v.forced}});
  }
  report.results["verification"] = transcript;
  try {
    report.results["minimal"] =
        minimality_check(doc.site, {sigma, theta}, r.handle.topology());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EnumerationUnavailable) throw;
    report.results["minimal"] = nullptr;
  }
  for (const auto& v : r.verification) {
    if (!v.forced) report.ok = false;
  }
  if (report.results["minimal"].is_boolean() &&
      !report.results["minimal"].get<bool>()) {
    report.ok = false;
  }
  return report;
}

Report cmd_verify(const SiteDocument& doc, const std::string& digest,
                  const std::string& suite, bool strict) {
  (void)strict;
  Report report{"verify", digest, Json::object(), true};
  report.results["suite"] = suite;
  bool pass = false;
  if (suite == "bijections") {
    report.results["details"] = suite_bijections(doc.site, pass);
  } else if (suite == "frame") {
    report.results["details"] = suite_frame(doc.site, pass);
  } else if (suite == "modality") {
    report.results["details"] = suite_modality(doc.site, pass);
  } else if (suite == "forcing-equivalences") {
    report.results["details"] = suite_forcing(doc.site, pass);
  } else if (suite == "degeneracy") {
    report.results["details"] = suite_degeneracy(doc.site, pass);
  } else {
    throw Error(ErrorCode::SemanticError, "unknown suite '" + suite + "'");
  }
  report.results["pass"] = pass;
  report.ok = pass;
  return report;
}

std::string dot_topology_lattice(const FinCatPtr& site) {
  auto all = enumerate_topologies(site);
  std::ostringstream out;
  out << "digraph topologies {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::size_t covering = 0;
    for (ObjId c = 0; c < site->object_count(); ++c) {
      covering += all[i].covering_sieves(c).size();
    }
    out << "  t" << i << " [label=\"G" << i << " (" << covering
        << " covering)\"];\n";
  }
  // Hasse edges of the inclusion order.
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i == j || !topology_leq(all[i], all[j])) continue;
      if (all[i] == all[j]) continue;
      bool covered = true;
      for (std::size_t k = 0; k < all.size() && covered; ++k) {
        if (k == i || k == j) continue;
        if (topology_leq(all[i], all[k]) && topology_leq(all[k], all[j]) &&
            !(all[k] == all[i]) && !(all[k] == all[j])) {
          covered = false;
        }
      }
      if (covered) out << "  t" << i << " -> t" << j << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string dot_factorization(const SiteDocument& doc,
                              const std::string& map_name, bool strict) {
  GrothTopology g = topology_from_document(doc, strict);
  const auto& named = doc.map(map_name);
  std::ostringstream out;
  out << "digraph factorization {\n  rankdir=LR;\n";
  out << "  src [label=\"" << named.source_name << "\"];\n";
  out << "  dst [label=\"" << named.target_name << "\"];\n";
  if (is_mono(named.value)) {
    out << "  mid [label=\"closure\"];\n";
    out << "  src -> mid [label=\"dense\"];\n";
    out << "  mid -> dst [label=\"closed\"];\n";
  } else {
    CoverClosedFactorization fact = cover_closed_factor(named.value, g);
    (void)fact;
    out << "  mid [label=\"closure of image\"];\n";
    out << "  src -> mid [label=\"covering\"];\n";
    out << "  mid -> dst [label=\"closed mono\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace toposcalc
