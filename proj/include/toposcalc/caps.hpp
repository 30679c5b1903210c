#pragma once

#include <cstddef>

namespace toposcalc {

// Size limits that turn the exhaustive algorithms into total functions.
// Defaults follow the CLI contract; TOPOSCALC_SIZE_CAP overrides them,
// either as a single integer (arrow cap) or as a comma-separated list of
// `arrows=..`, `elements=..`, `enum=..` entries.
struct Caps {
  std::size_t max_arrows = 256;
  std::size_t max_elements_per_object = 64;
  std::size_t max_enumeration = std::size_t(1) << 20;
};

// Process-wide caps, parsed once from the environment.
const Caps& caps();

// Parses an override string; exposed for tests.
Caps parse_caps(const char* text);

// Throws Error(SizeCapExceeded) when count exceeds the cap.
void require_within_cap(std::size_t count, std::size_t cap, const char* what);

}  // namespace toposcalc
