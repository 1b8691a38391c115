#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "envlab/errors.hpp"
#include "envlab/tolerances.hpp"

namespace envlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Normalized pure state over a labeled tensor product of finite subsystems.
/// Amplitudes are stored row-major with the first label varying slowest;
/// this layout is part of the file-format contract.
class PureState {
public:
    PureState(std::vector<std::string> labels, std::vector<Index> dims, Vector amplitudes);

    // Rescales to unit norm before constructing. Rejects (near-)zero vectors.
    static PureState normalized(std::vector<std::string> labels, std::vector<Index> dims,
                                Vector amplitudes);
    static PureState basis_state(std::vector<std::string> labels, std::vector<Index> dims,
                                 std::span<const Index> digits);

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Index>& dims() const { return dims_; }
    const Vector& amplitudes() const { return amps_; }
    Index dim() const { return amps_.size(); }
    Index num_subsystems() const { return static_cast<Index>(dims_.size()); }

    std::size_t axis_of(std::string_view label) const;  // throws on unknown label
    Index dim_of(std::string_view label) const { return dims_[axis_of(label)]; }

private:
    std::vector<std::string> labels_;
    std::vector<Index> dims_;
    Vector amps_;
};

/// Unitary acting on one subsystem, or on an ordered group of subsystems,
/// identity elsewhere. The matrix is indexed row-major over the targets in
/// the order given.
class LocalUnitary {
public:
    LocalUnitary(std::string target, Matrix matrix);
    LocalUnitary(std::vector<std::string> targets, Matrix matrix);

    const std::vector<std::string>& targets() const { return targets_; }
    const Matrix& matrix() const { return matrix_; }
    Index dim() const { return matrix_.rows(); }

private:
    std::vector<std::string> targets_;
    Matrix matrix_;
};

/// Bipartition of a state's labels. Both groups must be nonempty and
/// together cover every label exactly once.
struct Cut {
    std::vector<std::string> system;
    std::vector<std::string> env;
};

/// Canonical bipartite decomposition: moduli nonnegative and sorted
/// descending, coefficient phases absorbed into the environment basis so the
/// stored phases are zero for decompositions computed from a state. The
/// phases field exists so equal-modulus states with explicit branch phases
/// can be represented directly and round-tripped.
class SchmidtDecomposition {
public:
    static SchmidtDecomposition from_data(RealVector moduli, RealVector phases,
                                          Matrix system_basis, Matrix env_basis,
                                          std::vector<std::string> system_labels,
                                          std::vector<Index> system_dims,
                                          std::vector<std::string> env_labels,
                                          std::vector<Index> env_dims,
                                          std::vector<std::string> output_labels = {});
    // Two-subsystem convenience: labels default to "S" and "E".
    static SchmidtDecomposition from_data(RealVector moduli, RealVector phases,
                                          Matrix system_basis, Matrix env_basis);

    const RealVector& moduli() const { return moduli_; }
    const RealVector& phases() const { return phases_; }
    const Matrix& system_basis() const { return system_basis_; }
    const Matrix& env_basis() const { return env_basis_; }
    Index rank() const { return rank_; }
    Index num_branches() const { return moduli_.size(); }

    const std::vector<std::string>& system_labels() const { return system_labels_; }
    const std::vector<std::string>& env_labels() const { return env_labels_; }
    const std::vector<Index>& system_dims() const { return system_dims_; }
    const std::vector<Index>& env_dims() const { return env_dims_; }
    Index system_dim() const { return system_basis_.rows(); }
    Index env_dim() const { return env_basis_.rows(); }

    /// Rebuilds sum_k |a_k| e^{i phi_k} |sigma_k>|eps_k> in the layout of the
    /// state the decomposition was taken from.
    PureState reconstruct() const;

private:
    friend SchmidtDecomposition schmidt(const PureState&, const Cut&);
    SchmidtDecomposition() = default;

    RealVector moduli_;
    RealVector phases_;
    Matrix system_basis_;  // columns |sigma_k>
    Matrix env_basis_;     // columns |eps_k>
    Index rank_ = 0;
    std::vector<std::string> system_labels_, env_labels_;
    std::vector<Index> system_dims_, env_dims_;
    std::vector<std::string> output_labels_;  // original label order for reconstruct()
};

/// Hermitian, positive-semidefinite, unit-trace matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix matrix);
    const Matrix& matrix() const { return matrix_; }
    Index dim() const { return matrix_.rows(); }
    RealVector eigenvalues() const;  // ascending

private:
    Matrix matrix_;
};

// ---- operations ------------------------------------------------------------

/// Tensor product; labels are concatenated and must stay unique.
PureState tensor(std::span<const PureState> states);
PureState tensor(const PureState& a, const PureState& b);

/// Applies u to its target subsystem(s), identity elsewhere.
PureState apply_local(const PureState& state, const LocalUnitary& u);

SchmidtDecomposition schmidt(const PureState& state, const Cut& cut);

/// rho over `keep` (in the order given), tracing out the rest. This is a
/// cross-check facility only; the Born pipeline never calls it.
DensityMatrix reduced_density(const PureState& state, const std::vector<std::string>& keep);

/// <a|b>. Requires identical subsystem dimensions.
Complex overlap(const PureState& a, const PureState& b);

/// Same amplitudes under new labels.
PureState relabel(const PureState& state, std::vector<std::string> labels);

// Internal-but-reusable helpers.
Index checked_total_dim(std::span<const Index> dims);
void validate_cut(const PureState& state, const Cut& cut);
Vector permute_axes(const Vector& amps, std::span<const Index> dims,
                    std::span<const std::size_t> new_order);

} // namespace envlab
