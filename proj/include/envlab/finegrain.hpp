#pragma once

#include <span>
#include <vector>

#include "envlab/envariance.hpp"
#include "envlab/hilbert.hpp"

namespace envlab {

/// Integer pair m/M approximating a probability, with the certified error of
/// the rounded choice and the bracketing pair around p*M.
struct FineGraining {
    std::int64_t m = 0;
    std::int64_t M = 0;
    double error_bound = 0.0;      // |m/M - p| for the rounded m
    std::int64_t m_lower = 0;      // floor(p*M)
    std::int64_t m_upper = 0;      // m_lower + 1
    bool degenerate = false;       // p in {0,1}: no fine-graining needed

    bool interior() const { return !degenerate; }
    bool exact() const { return !degenerate && error_bound == 0.0; }
};

enum class BornMethod { exact_rational, bounded_approximation };

const char* to_string(BornMethod method);

/// Probabilities by branch counting: probabilities[k] = branch_counts[k] / M
/// exactly.
struct BornResult {
    std::vector<double> probabilities;
    std::vector<std::int64_t> branch_counts;
    std::int64_t M = 0;
    double error_bound = 0.0;
    BornMethod method = BornMethod::exact_rational;
};

/// Equal-modulus probability assignment: each of the N nonzero branches gets
/// 1/N, absent branches get 0. Rejects unequal moduli (those go through the
/// fine-graining pipeline instead).
std::vector<double> equal_coeff_probabilities(const SchmidtDecomposition& sd);

/// Probability n/N of a subset of n distinct nonzero branches.
double subset_probability(const SchmidtDecomposition& sd, std::span<const Index> subset);

/// m = round(p*M) clamped to the interior [1, M-1]; error bound <= 1/(2M)
/// before clamping, never increased by doubling M.
FineGraining rational_approximation(double p, std::int64_t M);

/// Smallest M <= 10^4 whose rounded approximation of p meets `tolerance`
/// (falls back to 10^4 when none does).
std::int64_t default_denominator(double p, double tolerance = 1e-3);

/// The pre-measurement state over S (x) C (x) E with dims (2, M, M):
/// branch 0 spread over counterweight states c_1..c_m, branch 1 over
/// c_{m+1}..c_M, environment in its initial basis state e_0. The E axis is
/// sized M up front so the later c-shift needs no resizing.
PureState build_fine_grained_state(double phi0, double phi1, const FineGraining& fg);

/// N-branch variant: branch k with phase phases[k] spread over counts[k]
/// counterweight states; sum(counts) = M.
PureState build_fine_grained_state(std::span<const double> phases,
                                   std::span<const std::int64_t> counts);

/// Counterweight-controlled shift |c_k>|e_0> -> |c_k>|e_k>. Requires every
/// populated branch to have E in the initial state e_0; applying it twice is
/// therefore an error.
PureState apply_cshift(const PureState& state);

/// The full Born pipeline for amplitudes (alpha, beta): rational
/// approximation, fine-grained state, c-shift, pairwise-swap envariance gate,
/// then probability extraction by branch counting. A gate failure signals an
/// engine bug and throws ContractViolation.
BornResult derive_born(Complex alpha, Complex beta, std::int64_t M);

/// Generalization to any number of outcomes with a common denominator M.
BornResult derive_born(std::span<const Complex> amplitudes, std::int64_t M);

} // namespace envlab
