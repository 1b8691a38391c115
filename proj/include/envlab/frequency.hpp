#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "envlab/hilbert.hpp"

namespace envlab {

using BigInt = boost::multiprecision::cpp_int;

/// Exact branch counts nu(n) and probabilities p(n) over an N-fold product
/// of fine-grained triplets. Counts are exact big integers; probabilities
/// are their floating ratios against M^N.
struct EnsembleDistribution {
    std::int64_t N = 0;
    std::int64_t m = 0;
    std::int64_t M = 0;
    std::vector<BigInt> counts;         // index n = 0..N
    std::vector<double> probabilities;  // counts[n] / M^N
};

/// nu(n) = C(N,n) m^n (M-m)^(N-n), exactly.
EnsembleDistribution ensemble_counts(std::int64_t N, std::int64_t m, std::int64_t M);

/// Binomial law p(n) = C(N,n) p0^n (1-p0)^(N-n), evaluated in log-space for
/// stability at large N.
std::vector<double> ensemble_probabilities(std::int64_t N, double p0);

/// Gaussian density with mean p0*N and standard deviation
/// sqrt(N p0 (1-p0)), evaluated at n. Rejects p0 in {0,1} (zero variance).
double gaussian_approx(std::int64_t N, double p0, double n);

/// Brute-force oracle at tiny sizes: materializes the N-fold tensor product
/// of fine-grained, c-shifted triplets, enumerates every term with nonzero
/// amplitude, classifies each counterweight index as recording "0" (k <= m)
/// or "1" (k > m), and tallies. Must equal ensemble_counts exactly.
EnsembleDistribution ensemble_oracle(std::int64_t N, std::int64_t m, std::int64_t M);

/// Floating ratio a/b of two nonnegative big integers.
double big_ratio(const BigInt& numerator, const BigInt& denominator);

} // namespace envlab
