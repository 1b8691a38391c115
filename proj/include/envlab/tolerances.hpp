#pragma once

#include <cstdint>

namespace envlab {

// Numerical tolerances used across the library. Double-precision SVD on the
// dimensions we support keeps errors orders of magnitude below these.
namespace tol {
inline constexpr double norm    = 1e-10;  // state / probability normalization
inline constexpr double orth    = 1e-10;  // basis orthonormality
inline constexpr double unitary = 1e-10;  // entrywise |U†U - 1|
inline constexpr double herm    = 1e-10;  // entrywise Hermiticity
inline constexpr double psd     = 1e-10;  // eigenvalue >= -psd
inline constexpr double recon   = 1e-8;   // decomposition round-trip
inline constexpr double eig     = 1e-8;   // eigenvalue comparisons
inline constexpr double rank    = 1e-12;  // modulus counted as nonzero
inline constexpr double eq      = 1e-9;   // modulus equality
inline constexpr double cert    = 1e-8;   // counter certificate slack
} // namespace tol

// Upper bound on the amplitude count of any constructed state. Defaults to
// 2^24; the ENVLAB_DIM_CAP environment variable (read once at first use)
// or set_dimension_cap override it.
std::int64_t dimension_cap();
void set_dimension_cap(std::int64_t cap);

} // namespace envlab
