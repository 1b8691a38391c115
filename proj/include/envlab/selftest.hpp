#pragma once

#include <cstdint>
#include <ostream>

namespace envlab {

/// Seeded sweep over the library's core guarantees: Schmidt round-trips,
/// the equal-modulus swap criterion, no-signaling descriptions, the
/// fine-graining gate, and the ensemble oracle. Writes one deterministic
/// line per check; identical seeds produce byte-identical reports.
/// Returns the number of failed checks.
int run_selftest(std::uint64_t seed, std::ostream& out);

} // namespace envlab
