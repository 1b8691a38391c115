#include "envlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace envlab {

namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMatrix = Eigen::Map<RowMatrix>;
using ConstMapRowMatrix = Eigen::Map<const RowMatrix>;

std::int64_t g_dimension_cap = 0;  // 0 = uninitialized

std::string join_labels(std::span<const std::string> labels) {
    std::string out;
    for (const auto& l : labels) {
        if (!out.empty()) out += ",";
        out += l;
    }
    return out;
}

double two_pi_wrap(double phase) {
    double p = std::fmod(phase, 2.0 * M_PI);
    if (p < 0.0) p += 2.0 * M_PI;
    return p;
}

// Lexicographic comparison of complex columns by (re, im) pairs.
bool column_less(const Matrix& basis, Index a, Index b) {
    for (Index r = 0; r < basis.rows(); ++r) {
        const Complex& x = basis(r, a);
        const Complex& y = basis(r, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

void check_orthonormal(const Matrix& basis, const char* which) {
    const Matrix gram = basis.adjoint() * basis;
    const double err =
        (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (err > tol::orth) {
        std::ostringstream msg;
        msg << which << " basis is not orthonormal (max deviation " << err << ")";
        throw ValidationError(msg.str());
    }
}

} // namespace

std::int64_t dimension_cap() {
    if (g_dimension_cap == 0) {
        std::int64_t cap = std::int64_t{1} << 24;
        if (const char* env = std::getenv("ENVLAB_DIM_CAP")) {
            char* end = nullptr;
            const long long parsed = std::strtoll(env, &end, 10);
            if (end && *end == '\0' && parsed > 0) cap = parsed;
        }
        g_dimension_cap = cap;
    }
    return g_dimension_cap;
}

void set_dimension_cap(std::int64_t cap) {
    if (cap <= 0) throw ValidationError("dimension cap must be positive");
    g_dimension_cap = cap;
}

Index checked_total_dim(std::span<const Index> dims) {
    if (dims.empty()) throw ValidationError("subsystem dimension list is empty");
    Index total = 1;
    for (const Index d : dims) {
        if (d <= 0) throw ValidationError("subsystem dimensions must be positive");
        if (total > dimension_cap() / d) {
            std::ostringstream msg;
            msg << "total dimension exceeds cap " << dimension_cap()
                << " (set ENVLAB_DIM_CAP to raise it)";
            throw ValidationError(msg.str());
        }
        total *= d;
    }
    return total;
}

// ---- PureState -------------------------------------------------------------

PureState::PureState(std::vector<std::string> labels, std::vector<Index> dims, Vector amplitudes)
    : labels_(std::move(labels)), dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    if (labels_.size() != dims_.size())
        throw ValidationError("labels and dims must have the same length");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw ValidationError("subsystem labels must be nonempty");
        if (!seen.insert(l).second)
            throw ValidationError("duplicate subsystem label '" + l + "'");
    }
    const Index total = checked_total_dim(dims_);
    if (amps_.size() != total) {
        std::ostringstream msg;
        msg << "amplitude vector length " << amps_.size() << " does not match product of dims "
            << total;
        throw ValidationError(msg.str());
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > tol::norm) {
        std::ostringstream msg;
        msg << "state is not normalized (norm " << norm << ")";
        throw ValidationError(msg.str());
    }
}

PureState PureState::normalized(std::vector<std::string> labels, std::vector<Index> dims,
                                Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm < tol::rank) throw ValidationError("cannot normalize a zero vector");
    amplitudes /= norm;
    return PureState(std::move(labels), std::move(dims), std::move(amplitudes));
}

PureState PureState::basis_state(std::vector<std::string> labels, std::vector<Index> dims,
                                 std::span<const Index> digits) {
    if (digits.size() != dims.size())
        throw ValidationError("basis_state digit count must match subsystem count");
    const Index total = checked_total_dim(dims);
    Index flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (digits[k] < 0 || digits[k] >= dims[k])
            throw ValidationError("basis_state digit out of range");
        flat = flat * dims[k] + digits[k];
    }
    Vector amps = Vector::Zero(total);
    amps[flat] = Complex{1.0, 0.0};
    return PureState(std::move(labels), std::move(dims), std::move(amps));
}

std::size_t PureState::axis_of(std::string_view label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
        if (labels_[k] == label) return k;
    throw ValidationError("unknown subsystem label '" + std::string(label) + "'");
}

// ---- LocalUnitary ----------------------------------------------------------

LocalUnitary::LocalUnitary(std::string target, Matrix matrix)
    : LocalUnitary(std::vector<std::string>{std::move(target)}, std::move(matrix)) {}

LocalUnitary::LocalUnitary(std::vector<std::string> targets, Matrix matrix)
    : targets_(std::move(targets)), matrix_(std::move(matrix)) {
    if (targets_.empty()) throw ValidationError("unitary needs at least one target label");
    std::unordered_set<std::string> seen;
    for (const auto& t : targets_)
        if (!seen.insert(t).second)
            throw ValidationError("duplicate target label '" + t + "'");
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw ValidationError("unitary matrix must be square and nonempty");
    const double err = (matrix_.adjoint() * matrix_ -
                        Matrix::Identity(matrix_.rows(), matrix_.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (err > tol::unitary) {
        std::ostringstream msg;
        msg << "matrix is not unitary (max |U^dag U - 1| = " << err << ")";
        throw ValidationError(msg.str());
    }
}

// ---- axis permutation ------------------------------------------------------

Vector permute_axes(const Vector& amps, std::span<const Index> dims,
                    std::span<const std::size_t> new_order) {
    const std::size_t n = dims.size();
    bool identity = true;
    for (std::size_t k = 0; k < n; ++k)
        if (new_order[k] != k) identity = false;
    if (identity) return amps;

    std::vector<Index> stride_old(n);
    stride_old[n - 1] = 1;
    for (std::size_t k = n - 1; k > 0; --k) stride_old[k - 1] = stride_old[k] * dims[k];

    std::vector<Index> dims_new(n), stride_in_old(n);
    for (std::size_t k = 0; k < n; ++k) {
        dims_new[k] = dims[new_order[k]];
        stride_in_old[k] = stride_old[new_order[k]];
    }

    Vector out(amps.size());
    std::vector<Index> digit(n, 0);
    Index old_idx = 0;
    for (Index new_idx = 0; new_idx < amps.size(); ++new_idx) {
        out[new_idx] = amps[old_idx];
        for (std::size_t k = n; k-- > 0;) {
            old_idx += stride_in_old[k];
            if (++digit[k] < dims_new[k]) break;
            old_idx -= dims_new[k] * stride_in_old[k];
            digit[k] = 0;
        }
    }
    return out;
}

namespace {

// Permutation that brings `front` labels (in their given order) to the front,
// followed by the remaining axes in state order.
std::vector<std::size_t> front_permutation(const PureState& state,
                                           std::span<const std::string> front) {
    std::vector<std::size_t> order;
    order.reserve(state.dims().size());
    std::vector<bool> used(state.dims().size(), false);
    for (const auto& label : front) {
        const std::size_t axis = state.axis_of(label);
        if (used[axis]) throw ValidationError("label '" + label + "' listed twice");
        used[axis] = true;
        order.push_back(axis);
    }
    for (std::size_t k = 0; k < state.dims().size(); ++k)
        if (!used[k]) order.push_back(k);
    return order;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> order) {
    std::vector<std::size_t> inv(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) inv[order[k]] = k;
    return inv;
}

} // namespace

// ---- tensor ----------------------------------------------------------------

PureState tensor(std::span<const PureState> states) {
    if (states.empty()) throw ValidationError("tensor of an empty state list");
    std::vector<std::string> labels;
    std::vector<Index> dims;
    for (const PureState& s : states) {
        labels.insert(labels.end(), s.labels().begin(), s.labels().end());
        dims.insert(dims.end(), s.dims().begin(), s.dims().end());
    }
    checked_total_dim(dims);  // cap before allocating
    Vector out = states[0].amplitudes();
    for (std::size_t k = 1; k < states.size(); ++k) {
        const Vector& next = states[k].amplitudes();
        Vector merged(out.size() * next.size());
        for (Index i = 0; i < out.size(); ++i)
            merged.segment(i * next.size(), next.size()) = out[i] * next;
        out = std::move(merged);
    }
    return PureState(std::move(labels), std::move(dims), std::move(out));
}

PureState tensor(const PureState& a, const PureState& b) {
    const PureState pair[] = {a, b};
    return tensor(std::span<const PureState>(pair, 2));
}

// ---- apply_local -----------------------------------------------------------

PureState apply_local(const PureState& state, const LocalUnitary& u) {
    Index target_dim = 1;
    for (const auto& label : u.targets()) target_dim *= state.dim_of(label);
    if (target_dim != u.dim()) {
        std::ostringstream msg;
        msg << "unitary of dimension " << u.dim() << " applied to target [";
        msg << join_labels(u.targets()) << "] of dimension " << target_dim;
        throw ValidationError(msg.str());
    }

    const auto order = front_permutation(state, u.targets());
    Vector permuted = permute_axes(state.amplitudes(), state.dims(), order);

    const Index rest = state.dim() / target_dim;
    MapRowMatrix block(permuted.data(), target_dim, rest);
    RowMatrix transformed = u.matrix() * block;

    std::vector<Index> dims_perm(state.dims().size());
    for (std::size_t k = 0; k < order.size(); ++k) dims_perm[k] = state.dims()[order[k]];
    Vector flat = Eigen::Map<Vector>(transformed.data(), state.dim());
    Vector restored = permute_axes(flat, dims_perm, inverse_permutation(order));
    return PureState(state.labels(), state.dims(), std::move(restored));
}

// ---- schmidt ---------------------------------------------------------------

void validate_cut(const PureState& state, const Cut& cut) {
    if (cut.system.empty() || cut.env.empty())
        throw ValidationError("both cut groups must be nonempty");
    std::unordered_set<std::string> seen;
    for (const auto& l : cut.system) {
        state.axis_of(l);
        if (!seen.insert(l).second) throw ValidationError("label '" + l + "' listed twice in cut");
    }
    for (const auto& l : cut.env) {
        state.axis_of(l);
        if (!seen.insert(l).second) throw ValidationError("label '" + l + "' listed twice in cut");
    }
    if (seen.size() != state.labels().size())
        throw ValidationError("cut must cover every subsystem label");
}

SchmidtDecomposition schmidt(const PureState& state, const Cut& cut) {
    validate_cut(state, cut);
    if (state.amplitudes().norm() < 0.5)
        throw ValidationError("cannot decompose a degenerate zero state");

    std::vector<std::string> front = cut.system;
    front.insert(front.end(), cut.env.begin(), cut.env.end());
    const auto order = front_permutation(state, front);
    Vector permuted = permute_axes(state.amplitudes(), state.dims(), order);

    Index sys_dim = 1, env_dim = 1;
    std::vector<Index> sys_dims, env_dims;
    for (const auto& l : cut.system) {
        sys_dims.push_back(state.dim_of(l));
        sys_dim *= sys_dims.back();
    }
    for (const auto& l : cut.env) {
        env_dims.push_back(state.dim_of(l));
        env_dim *= env_dims.back();
    }

    ConstMapRowMatrix coeff(permuted.data(), sys_dim, env_dim);
    Eigen::JacobiSVD<Matrix> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);

    RealVector moduli = svd.singularValues();
    Matrix system_basis = svd.matrixU();
    Matrix env_basis = svd.matrixV().conjugate();

    // Coefficient phases move into the bases: rotate each pair so the first
    // significant system component is real positive.
    for (Index k = 0; k < moduli.size(); ++k) {
        for (Index r = 0; r < system_basis.rows(); ++r) {
            const Complex entry = system_basis(r, k);
            if (std::abs(entry) > tol::rank) {
                const Complex rot = std::conj(entry) / std::abs(entry);
                system_basis.col(k) *= rot;
                env_basis.col(k) *= std::conj(rot);
                break;
            }
        }
    }

    // Singular values arrive sorted descending; within each group of ties the
    // SVD order is arbitrary, so reorder those lexicographically by the
    // gauge-fixed system column.
    std::vector<Index> perm(static_cast<std::size_t>(moduli.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index lo = 0; lo < moduli.size();) {
        Index hi = lo + 1;
        while (hi < moduli.size() && moduli[hi - 1] - moduli[hi] <= tol::eq) ++hi;
        std::sort(perm.begin() + lo, perm.begin() + hi,
                  [&](Index a, Index b) { return column_less(system_basis, a, b); });
        lo = hi;
    }
    RealVector moduli_sorted(moduli.size());
    Matrix sys_sorted(system_basis.rows(), system_basis.cols());
    Matrix env_sorted(env_basis.rows(), env_basis.cols());
    for (Index k = 0; k < moduli.size(); ++k) {
        moduli_sorted[k] = moduli[perm[k]];
        sys_sorted.col(k) = system_basis.col(perm[k]);
        env_sorted.col(k) = env_basis.col(perm[k]);
    }

    return SchmidtDecomposition::from_data(
        std::move(moduli_sorted), RealVector::Zero(moduli.size()), std::move(sys_sorted),
        std::move(env_sorted), cut.system, sys_dims, cut.env, env_dims, state.labels());
}

// ---- SchmidtDecomposition --------------------------------------------------

SchmidtDecomposition SchmidtDecomposition::from_data(
    RealVector moduli, RealVector phases, Matrix system_basis, Matrix env_basis,
    std::vector<std::string> system_labels, std::vector<Index> system_dims,
    std::vector<std::string> env_labels, std::vector<Index> env_dims,
    std::vector<std::string> output_labels) {
    SchmidtDecomposition sd;
    const Index branches = moduli.size();
    if (branches == 0) throw ValidationError("decomposition needs at least one branch");
    if (phases.size() != branches)
        throw ValidationError("phases length must match moduli length");
    if (system_basis.cols() != branches || env_basis.cols() != branches)
        throw ValidationError("basis column count must match moduli length");

    for (Index k = 0; k < branches; ++k) {
        if (moduli[k] < 0.0) throw ValidationError("Schmidt moduli must be nonnegative");
        // ties reordered by the lexicographic rule may be off by up to tol::eq
        if (k + 1 < branches && moduli[k] + tol::eq < moduli[k + 1])
            throw ValidationError("Schmidt moduli must be sorted descending");
    }
    const double total = moduli.squaredNorm();
    if (std::abs(total - 1.0) > tol::norm) {
        std::ostringstream msg;
        msg << "Schmidt moduli are not normalized (sum of squares " << total << ")";
        throw ValidationError(msg.str());
    }
    check_orthonormal(system_basis, "system");
    check_orthonormal(env_basis, "environment");

    const Index sys_total = checked_total_dim(system_dims);
    const Index env_total = checked_total_dim(env_dims);
    if (sys_total != system_basis.rows() || env_total != env_basis.rows())
        throw ValidationError("basis row count must match subsystem dimensions");
    if (system_labels.size() != system_dims.size() || env_labels.size() != env_dims.size())
        throw ValidationError("label and dimension lists must align");

    sd.moduli_ = std::move(moduli);
    sd.phases_ = std::move(phases);
    for (Index k = 0; k < branches; ++k) sd.phases_[k] = two_pi_wrap(sd.phases_[k]);
    sd.system_basis_ = std::move(system_basis);
    sd.env_basis_ = std::move(env_basis);
    sd.rank_ = 0;
    for (Index k = 0; k < branches; ++k)
        if (sd.moduli_[k] > tol::rank) ++sd.rank_;
    sd.system_labels_ = std::move(system_labels);
    sd.env_labels_ = std::move(env_labels);
    sd.system_dims_ = std::move(system_dims);
    sd.env_dims_ = std::move(env_dims);
    if (output_labels.empty()) {
        output_labels = sd.system_labels_;
        output_labels.insert(output_labels.end(), sd.env_labels_.begin(), sd.env_labels_.end());
    }
    sd.output_labels_ = std::move(output_labels);
    return sd;
}

SchmidtDecomposition SchmidtDecomposition::from_data(RealVector moduli, RealVector phases,
                                                     Matrix system_basis, Matrix env_basis) {
    const Index sys_rows = system_basis.rows();
    const Index env_rows = env_basis.rows();
    return from_data(std::move(moduli), std::move(phases), std::move(system_basis),
                     std::move(env_basis), {"S"}, {sys_rows}, {"E"}, {env_rows});
}

PureState SchmidtDecomposition::reconstruct() const {
    Vector coeff(moduli_.size());
    for (Index k = 0; k < moduli_.size(); ++k)
        coeff[k] = std::polar(moduli_[k], phases_[k]);
    RowMatrix joint = system_basis_ * coeff.asDiagonal() * env_basis_.transpose();
    Vector flat = Eigen::Map<Vector>(joint.data(), joint.size());

    std::vector<std::string> labels = system_labels_;
    labels.insert(labels.end(), env_labels_.begin(), env_labels_.end());
    std::vector<Index> dims = system_dims_;
    dims.insert(dims.end(), env_dims_.begin(), env_dims_.end());

    // Restore the axis order of the state this decomposition came from.
    std::vector<std::size_t> order;
    order.reserve(labels.size());
    for (const auto& want : output_labels_) {
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k] == want) {
                order.push_back(k);
                break;
            }
        }
    }
    if (order.size() != labels.size())
        throw ContractViolation("decomposition output labels do not cover the cut labels");
    Vector restored = permute_axes(flat, dims, order);
    std::vector<Index> out_dims(dims.size());
    for (std::size_t k = 0; k < order.size(); ++k) out_dims[k] = dims[order[k]];
    return PureState(output_labels_, std::move(out_dims), std::move(restored));
}

// ---- DensityMatrix ---------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw ValidationError("density matrix must be square and nonempty");
    const double herm_err = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > tol::herm) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (max deviation " << herm_err << ")";
        throw ValidationError(msg.str());
    }
    const double trace_err = std::abs(matrix_.trace() - Complex{1.0, 0.0});
    if (trace_err > tol::norm) {
        std::ostringstream msg;
        msg << "density matrix trace deviates from 1 by " << trace_err;
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol::psd)
        throw ValidationError("density matrix has a negative eigenvalue");
}

RealVector DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

// ---- reduced density, overlap, relabel --------------------------------------

DensityMatrix reduced_density(const PureState& state, const std::vector<std::string>& keep) {
    if (keep.empty()) throw ValidationError("keep group must be nonempty");
    const auto order = front_permutation(state, keep);
    Vector permuted = permute_axes(state.amplitudes(), state.dims(), order);
    Index keep_dim = 1;
    for (const auto& l : keep) keep_dim *= state.dim_of(l);
    const Index rest = state.dim() / keep_dim;
    ConstMapRowMatrix coeff(permuted.data(), keep_dim, rest);
    return DensityMatrix(coeff * coeff.adjoint());
}

Complex overlap(const PureState& a, const PureState& b) {
    if (a.dims() != b.dims())
        throw ValidationError("overlap requires identical subsystem dimensions");
    return a.amplitudes().dot(b.amplitudes());
}

PureState relabel(const PureState& state, std::vector<std::string> labels) {
    return PureState(std::move(labels), state.dims(), state.amplitudes());
}

} // namespace envlab
