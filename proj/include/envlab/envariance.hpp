#pragma once

#include <span>
#include <utility>

#include "envlab/hilbert.hpp"

namespace envlab {

/// Swap of two Schmidt branches (or, for swap_detectability, two basis
/// indices) with an attached phase, canonicalized to [0, 2*pi).
struct SwapSpec {
    Index i;
    Index j;
    double phase;

    SwapSpec(Index i, Index j, double phase = 0.0);
};

/// What an observer with access to the system alone can be told: moduli and
/// system branch vectors, phases and environment basis discarded.
struct EnvariantDescription {
    RealVector moduli;    // descending
    Matrix system_basis;  // matching columns
};

/// Outcome of the search for the best environment-side counter to a given
/// system transformation.
struct CounterResult {
    LocalUnitary counter;
    double residual;     // min over unitary u_E of ||(u_S (x) u_E)|psi> - |psi>||
    double certificate;  // nuclear norm of the cross operator; 1 iff residual 0
};

struct Detectability {
    Complex overlap;
    double distinguish_prob;
};

/// ||(u_S (x) u_E)|psi> - |psi>||. Strict vector difference, not up to a
/// global phase.
double envariance_residual(const PureState& state, const LocalUnitary& u_S,
                           const LocalUnitary& u_E);

/// |<psi|(u_S (x) u_E)|psi>|; diagnostic companion to the strict residual.
double envariance_fidelity(const PureState& state, const LocalUnitary& u_S,
                           const LocalUnitary& u_E);

bool is_envariant(const PureState& state, const LocalUnitary& u_S,
                  const LocalUnitary& u_E, double tolerance);

/// Branch-k phase rotation e^{i phi_k} on the system side together with the
/// environment-side counter-rotation e^{-i phi_k}. Identity on the
/// orthogonal complement of the branch span.
std::pair<LocalUnitary, LocalUnitary> phase_rotation_pair(const SchmidtDecomposition& sd,
                                                          std::span<const double> phases);

/// Swap of branches (i, j) and its counterswap. The pair is constructed even
/// when the moduli differ; envariance then fails, which is itself a tested
/// prediction.
std::pair<LocalUnitary, LocalUnitary> swap_pair(const SchmidtDecomposition& sd,
                                                const SwapSpec& spec);

/// Best environment-side counter for u_S. The environment is everything u_S
/// does not target; it must be nonempty. With C the system-by-environment
/// coefficient matrix, the certificate is the nuclear norm of C^dag u_S C
/// and the counter is assembled from that operator's singular vectors.
CounterResult optimal_counter(const PureState& state, const LocalUnitary& u_S);

EnvariantDescription envariant_description(const PureState& state, const Cut& cut);

/// True when moduli agree as multisets (within tol_modulus) and the spans of
/// each equal-modulus branch group agree (projector Frobenius distance within
/// tol_projector).
bool descriptions_match(const EnvariantDescription& a, const EnvariantDescription& b,
                        double tol_modulus = tol::eq, double tol_projector = tol::recon);

/// Swap detectability for an unentangled state: overlap <chi|u_swap|chi> and
/// the optimal two-hypothesis discrimination probability
/// (1 + sqrt(1 - |overlap|^2)) / 2. Rejects multi-subsystem input; the point
/// of the operation is the contrast with the entangled case.
Detectability swap_detectability(const PureState& chi, const SwapSpec& spec);

} // namespace envlab
