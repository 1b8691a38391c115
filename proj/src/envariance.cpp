#include "envlab/envariance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <Eigen/SVD>

namespace envlab {

namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double two_pi_wrap(double phase) {
    double p = std::fmod(phase, 2.0 * M_PI);
    if (p < 0.0) p += 2.0 * M_PI;
    return p;
}

void check_disjoint_targets(const LocalUnitary& u_S, const LocalUnitary& u_E) {
    std::unordered_set<std::string> sys(u_S.targets().begin(), u_S.targets().end());
    for (const auto& label : u_E.targets())
        if (sys.count(label))
            throw ValidationError("system and environment unitaries overlap on '" + label + "'");
}

// Identity plus a two-level block: phase*|a><b| + conj(phase)*|b><a| on the
// span of columns a and b, identity on the orthogonal complement.
Matrix two_level_unitary(const Matrix& basis, Index a, Index b, Complex phase) {
    const Index dim = basis.rows();
    Matrix u = Matrix::Identity(dim, dim);
    const Vector va = basis.col(a);
    const Vector vb = basis.col(b);
    u -= va * va.adjoint();
    u -= vb * vb.adjoint();
    u += phase * (va * vb.adjoint());
    u += std::conj(phase) * (vb * va.adjoint());
    return u;
}

Complex expi(double phase) { return std::polar(1.0, phase); }

} // namespace

SwapSpec::SwapSpec(Index i_, Index j_, double phase_) : i(i_), j(j_), phase(two_pi_wrap(phase_)) {
    if (i < 0 || j < 0) throw ValidationError("swap indices must be nonnegative");
    if (i == j) throw ValidationError("swap indices must differ");
}

double envariance_residual(const PureState& state, const LocalUnitary& u_S,
                           const LocalUnitary& u_E) {
    check_disjoint_targets(u_S, u_E);
    const PureState transformed = apply_local(apply_local(state, u_E), u_S);
    return (transformed.amplitudes() - state.amplitudes()).norm();
}

double envariance_fidelity(const PureState& state, const LocalUnitary& u_S,
                           const LocalUnitary& u_E) {
    check_disjoint_targets(u_S, u_E);
    const PureState transformed = apply_local(apply_local(state, u_E), u_S);
    return std::abs(state.amplitudes().dot(transformed.amplitudes()));
}

bool is_envariant(const PureState& state, const LocalUnitary& u_S, const LocalUnitary& u_E,
                  double tolerance) {
    return envariance_residual(state, u_S, u_E) <= tolerance;
}

std::pair<LocalUnitary, LocalUnitary> phase_rotation_pair(const SchmidtDecomposition& sd,
                                                          std::span<const double> phases) {
    if (static_cast<Index>(phases.size()) != sd.rank())
        throw ValidationError("need exactly one phase per Schmidt branch");

    Matrix u_s = Matrix::Identity(sd.system_dim(), sd.system_dim());
    Matrix u_e = Matrix::Identity(sd.env_dim(), sd.env_dim());
    for (Index k = 0; k < sd.rank(); ++k) {
        const Vector sigma = sd.system_basis().col(k);
        const Vector eps = sd.env_basis().col(k);
        u_s += (expi(phases[k]) - 1.0) * (sigma * sigma.adjoint());
        u_e += (expi(-phases[k]) - 1.0) * (eps * eps.adjoint());
    }
    return {LocalUnitary(sd.system_labels(), std::move(u_s)),
            LocalUnitary(sd.env_labels(), std::move(u_e))};
}

std::pair<LocalUnitary, LocalUnitary> swap_pair(const SchmidtDecomposition& sd,
                                                const SwapSpec& spec) {
    if (spec.i >= sd.rank() || spec.j >= sd.rank())
        throw ValidationError("swap indices must address branches below the Schmidt rank");

    // The counterswap phase: undoing the swap on branch coefficients
    // |a| e^{i phi_i}, |a| e^{i phi_j} requires the environment block phase
    // phi_i - phi_j - phi_swap.
    const double counter_phase =
        sd.phases()[spec.i] - sd.phases()[spec.j] - spec.phase;

    Matrix u_s = two_level_unitary(sd.system_basis(), spec.i, spec.j, expi(spec.phase));
    Matrix u_e = two_level_unitary(sd.env_basis(), spec.i, spec.j, expi(counter_phase));
    return {LocalUnitary(sd.system_labels(), std::move(u_s)),
            LocalUnitary(sd.env_labels(), std::move(u_e))};
}

CounterResult optimal_counter(const PureState& state, const LocalUnitary& u_S) {
    std::unordered_set<std::string> sys(u_S.targets().begin(), u_S.targets().end());
    std::vector<std::string> env_labels;
    for (const auto& label : state.labels())
        if (!sys.count(label)) env_labels.push_back(label);
    if (env_labels.empty())
        throw ValidationError("counter search needs a nonempty environment side");
    if (sys.size() != u_S.targets().size() ||
        sys.size() + env_labels.size() != state.labels().size())
        throw ValidationError("system unitary targets must be state labels");

    Cut cut{u_S.targets(), env_labels};
    validate_cut(state, cut);
    std::vector<std::string> front = cut.system;
    front.insert(front.end(), cut.env.begin(), cut.env.end());
    std::vector<std::size_t> order;
    for (const auto& label : front) order.push_back(state.axis_of(label));
    Vector permuted = permute_axes(state.amplitudes(), state.dims(), order);

    Index sys_dim = 1;
    for (const auto& label : cut.system) sys_dim *= state.dim_of(label);
    const Index env_dim = state.dim() / sys_dim;
    if (u_S.dim() != sys_dim)
        throw ValidationError("system unitary dimension does not match the cut");

    Eigen::Map<const RowMatrix> coeff(permuted.data(), sys_dim, env_dim);
    const Matrix cross = coeff.adjoint() * u_S.matrix() * coeff;

    // max over unitary u_E of Re tr(u_E * cross^T) is the nuclear norm of
    // cross, attained at u_E = V W^dag for cross^T = W S V^dag.
    Eigen::JacobiSVD<Matrix> svd(cross.transpose(),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double certificate = svd.singularValues().sum();
    Matrix counter_matrix = svd.matrixV() * svd.matrixU().adjoint();
    const double residual = std::sqrt(std::max(0.0, 2.0 - 2.0 * certificate));

    LocalUnitary counter(env_labels, std::move(counter_matrix));
    if (!is_envariant(state, u_S, counter, residual + tol::cert)) {
        throw ContractViolation(
            "optimal counter failed to reach its certified residual");
    }
    return CounterResult{std::move(counter), residual, certificate};
}

EnvariantDescription envariant_description(const PureState& state, const Cut& cut) {
    const SchmidtDecomposition sd = schmidt(state, cut);
    EnvariantDescription desc;
    desc.moduli = sd.moduli().head(sd.rank());
    desc.system_basis = sd.system_basis().leftCols(sd.rank());
    return desc;
}

bool descriptions_match(const EnvariantDescription& a, const EnvariantDescription& b,
                        double tol_modulus, double tol_projector) {
    if (a.moduli.size() != b.moduli.size()) return false;
    const Index n = a.moduli.size();
    for (Index k = 0; k < n; ++k)
        if (std::abs(a.moduli[k] - b.moduli[k]) > tol_modulus) return false;
    if (a.system_basis.rows() != b.system_basis.rows()) return false;

    // Branch vectors are only defined up to rotations inside equal-modulus
    // groups; compare spans group by group.
    for (Index lo = 0; lo < n;) {
        Index hi = lo + 1;
        while (hi < n && a.moduli[hi - 1] - a.moduli[hi] <= tol_modulus) ++hi;
        const Matrix pa = a.system_basis.middleCols(lo, hi - lo) *
                          a.system_basis.middleCols(lo, hi - lo).adjoint();
        const Matrix pb = b.system_basis.middleCols(lo, hi - lo) *
                          b.system_basis.middleCols(lo, hi - lo).adjoint();
        if ((pa - pb).norm() > tol_projector) return false;
        lo = hi;
    }
    return true;
}

Detectability swap_detectability(const PureState& chi, const SwapSpec& spec) {
    if (chi.num_subsystems() != 1)
        throw ValidationError(
            "swap detectability is defined for a single unentangled subsystem; "
            "entangled inputs go through the envariance operations instead");
    if (spec.i >= chi.dim() || spec.j >= chi.dim())
        throw ValidationError("swap indices out of range for the state dimension");

    Matrix u = two_level_unitary(Matrix::Identity(chi.dim(), chi.dim()), spec.i, spec.j,
                                 expi(spec.phase));
    const PureState swapped = apply_local(chi, LocalUnitary(chi.labels()[0], std::move(u)));
    const Complex ov = overlap(chi, swapped);
    const double dp = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - std::norm(ov))));
    return Detectability{ov, dp};
}

} // namespace envlab
