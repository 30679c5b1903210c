#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <thread>

#include "testkit.hpp"
#include "toposcalc/forcing.hpp"

using namespace toposcalc;

// Values are immutable after construction and may be shared freely across
// tasks; this exercises the shared caches (sieve tables, sheaf memo) from
// several threads and checks the answers stay the ones computed serially.

TEST_CASE("shared sites, topologies and handles are safe to use concurrently") {
  auto site = tk::interval_site();
  Sieve just_f(site, site->object_id("b"), {site->arrow_id("f")});
  GrothTopology dense = generate_from_sieves(site, {just_f});
  LocalizationHandle handle(dense);
  auto corpus = tk::corpus_maps(site, 4);

  std::vector<bool> serial;
  serial.reserve(corpus.size());
  for (const auto& u : corpus) serial.push_back(handle.inverts(u));

  std::atomic<int> mismatches{0};
  auto worker = [&](unsigned offset) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      std::size_t k = (i + offset) % corpus.size();
      if (handle.inverts(corpus[k]) != serial[k]) ++mismatches;
      if (handle.is_sheaf(corpus[k].source()) !=
          is_sheaf(corpus[k].source(), dense)) {
        ++mismatches;
      }
    }
    // Fresh derived values from the shared site.
    auto om = omega(site);
    if (om.omega.card(site->object_id("b")) != 3) ++mismatches;
    if (!(lt_to_groth(groth_to_lt(dense)) == dense)) ++mismatches;
  };

  std::vector<std::thread> threads;
  for (unsigned t = 0; t < 8; ++t) threads.emplace_back(worker, t);
  for (auto& t : threads) t.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("concurrent enumeration gives identical posets") {
  auto site = tk::monoid_site();
  auto expected = enumerate_topologies(site);
  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      auto mine = enumerate_topologies(site);
      if (mine.size() != expected.size()) {
        ++mismatches;
        return;
      }
      for (std::size_t i = 0; i < mine.size(); ++i) {
        if (!(mine[i] == expected[i])) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(mismatches.load() == 0);
}
