#include "envlab/finegrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "envlab/random.hpp"

namespace envlab {

namespace {

constexpr Index kFullGateCap = 48;     // all-pairs gate on the materialized state
constexpr std::int64_t kPairBudget = 1024;  // sampled pairs beyond that

std::vector<std::string> sce_labels() { return {"S", "C", "E"}; }

Index flat_sce(Index s, Index c, Index e, Index M) { return (s * M + c) * M + e; }

/// Envariance of a swap between two equal-modulus branches depends only on
/// the two branch coefficients: the swap pair acts as the identity on every
/// other branch. This checks the pair on the exact two-branch reduction, so
/// it stays O(1) per pair at any M.
bool pair_swappable(double phase_i, double phase_j) {
    RealVector moduli(2);
    moduli << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    RealVector phases(2);
    phases << phase_i, phase_j;
    const auto sd = SchmidtDecomposition::from_data(moduli, phases, Matrix::Identity(2, 2),
                                                    Matrix::Identity(2, 2));
    const PureState two_branch = sd.reconstruct();
    const auto [u_s, u_e] = swap_pair(sd, SwapSpec(0, 1));
    return is_envariant(two_branch, u_s, u_e, tol::recon);
}

void gate_reduced(const std::vector<double>& branch_phases) {
    const std::int64_t M = static_cast<std::int64_t>(branch_phases.size());
    const std::int64_t all_pairs = M * (M - 1) / 2;
    if (all_pairs <= kPairBudget) {
        for (std::int64_t i = 0; i < M; ++i)
            for (std::int64_t j = i + 1; j < M; ++j)
                if (!pair_swappable(branch_phases[i], branch_phases[j]))
                    throw ContractViolation("fine-grained branches failed the swap gate");
        return;
    }
    // Deterministic sample: seeded by the branch count alone so identical
    // configurations always verify identical pairs.
    Rng rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(M));
    for (std::int64_t t = 0; t < kPairBudget; ++t) {
        const std::int64_t i = rng.uniform_int(0, M - 1);
        std::int64_t j = rng.uniform_int(0, M - 2);
        if (j >= i) ++j;
        if (!pair_swappable(branch_phases[i], branch_phases[j]))
            throw ContractViolation("fine-grained branches failed the swap gate");
    }
}

void gate_full(const PureState& shifted, std::int64_t M) {
    const SchmidtDecomposition sd = schmidt(shifted, Cut{{"S", "C"}, {"E"}});
    if (sd.rank() != M)
        throw ContractViolation("fine-grained state does not have one branch per slot");
    const double expected = 1.0 / std::sqrt(static_cast<double>(M));
    for (Index k = 0; k < sd.rank(); ++k)
        if (std::abs(sd.moduli()[k] - expected) > tol::recon)
            throw ContractViolation("fine-grained Schmidt moduli are not equalized");
    for (Index i = 0; i < M; ++i) {
        for (Index j = i + 1; j < M; ++j) {
            const auto [u_s, u_e] = swap_pair(sd, SwapSpec(i, j));
            if (!is_envariant(shifted, u_s, u_e, tol::recon))
                throw ContractViolation("fine-grained branch swap is not envariant");
        }
    }
}

BornResult assemble_result(std::vector<std::int64_t> counts, std::int64_t M,
                           double error_bound) {
    BornResult result;
    result.branch_counts = std::move(counts);
    result.M = M;
    result.error_bound = error_bound;
    result.method =
        error_bound == 0.0 ? BornMethod::exact_rational : BornMethod::bounded_approximation;
    result.probabilities.reserve(result.branch_counts.size());
    for (const std::int64_t c : result.branch_counts)
        result.probabilities.push_back(static_cast<double>(c) / static_cast<double>(M));
    return result;
}

/// Shared tail of the pipeline: build the fine-grained state, apply the
/// c-shift, run the envariance gate, count. Branch k carries counts[k]
/// counterweight slots and phase phases[k].
void run_pipeline_gate(std::span<const double> phases, std::span<const std::int64_t> counts,
                       std::int64_t M) {
    std::vector<double> slot_phases;
    slot_phases.reserve(static_cast<std::size_t>(M));
    std::vector<double> nz_phases;
    std::vector<std::int64_t> nz_counts;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        nz_phases.push_back(phases[k]);
        nz_counts.push_back(counts[k]);
        for (std::int64_t s = 0; s < counts[k]; ++s) slot_phases.push_back(phases[k]);
    }
    const Index sys_dim = static_cast<Index>(nz_counts.size());
    const bool fits = sys_dim * M <= dimension_cap() / M;
    if (fits) {
        const PureState psi = build_fine_grained_state(nz_phases, nz_counts);
        const PureState shifted = apply_cshift(psi);
        const double expected = 1.0 / std::sqrt(static_cast<double>(M));
        Index populated = 0;
        for (Index idx = 0; idx < shifted.dim(); ++idx) {
            const double mag = std::abs(shifted.amplitudes()[idx]);
            if (mag <= tol::rank) continue;
            ++populated;
            if (std::abs(mag - expected) > tol::recon)
                throw ContractViolation("fine-grained amplitudes are not equal-modulus");
        }
        if (populated != M)
            throw ContractViolation("fine-grained state does not populate M branches");
        if (M <= kFullGateCap) {
            gate_full(shifted, M);
            return;
        }
    }
    gate_reduced(slot_phases);
}

} // namespace

const char* to_string(BornMethod method) {
    return method == BornMethod::exact_rational ? "exact-rational" : "bounded-approximation";
}

std::vector<double> equal_coeff_probabilities(const SchmidtDecomposition& sd) {
    const Index N = sd.rank();
    if (N == 0) throw ValidationError("state has no nonzero Schmidt branches");
    const double spread = sd.moduli()[0] - sd.moduli()[N - 1];
    if (spread > tol::eq) {
        std::ostringstream msg;
        msg << "Schmidt moduli are not all equal (spread " << spread
            << "); unequal coefficients go through the fine-graining pipeline";
        throw ValidationError(msg.str());
    }
    std::vector<double> probs(static_cast<std::size_t>(sd.num_branches()), 0.0);
    for (Index k = 0; k < N; ++k) probs[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(N);
    return probs;
}

double subset_probability(const SchmidtDecomposition& sd, std::span<const Index> subset) {
    equal_coeff_probabilities(sd);  // same precondition
    std::vector<Index> seen(subset.begin(), subset.end());
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw ValidationError("subset indices must be distinct");
    Index n = 0;
    for (const Index k : subset) {
        if (k < 0 || k >= sd.num_branches())
            throw ValidationError("subset index out of range");
        if (sd.moduli()[k] > tol::rank) ++n;
    }
    return static_cast<double>(n) / static_cast<double>(sd.rank());
}

FineGraining rational_approximation(double p, std::int64_t M) {
    if (M < 2) throw ValidationError("denominator M must be at least 2");
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
        throw ValidationError("probability must lie in [0, 1]");
    p = std::clamp(p, 0.0, 1.0);

    FineGraining fg;
    fg.M = M;
    if (p == 0.0 || p == 1.0) {
        fg.degenerate = true;
        fg.m = p == 0.0 ? 0 : M;
        fg.m_lower = fg.m;
        fg.m_upper = fg.m;
        fg.error_bound = 0.0;
        return fg;
    }

    const double target = p * static_cast<double>(M);
    std::int64_t lower = static_cast<std::int64_t>(std::floor(target));
    if (static_cast<double>(lower + 1) <= target) ++lower;  // guard fp floor
    if (static_cast<double>(lower) > target) --lower;
    fg.m_lower = lower;
    fg.m_upper = lower + 1;

    std::int64_t m = (target - static_cast<double>(lower) >= 0.5) ? fg.m_upper : fg.m_lower;
    m = std::clamp<std::int64_t>(m, 1, M - 1);
    fg.m = m;
    fg.error_bound = std::abs(static_cast<double>(m) / static_cast<double>(M) - p);
    return fg;
}

std::int64_t default_denominator(double p, double tolerance) {
    if (tolerance <= 0.0) throw ValidationError("tolerance must be positive");
    constexpr std::int64_t kMaxDenominator = 10000;
    if (p <= 0.0 || p >= 1.0) return 2;
    for (std::int64_t M = 2; M <= kMaxDenominator; ++M)
        if (rational_approximation(p, M).error_bound <= tolerance) return M;
    return kMaxDenominator;
}

PureState build_fine_grained_state(double phi0, double phi1, const FineGraining& fg) {
    if (!fg.interior())
        throw ValidationError("degenerate fine-graining has nothing to build");
    const double phases[] = {phi0, phi1};
    const std::int64_t counts[] = {fg.m, fg.M - fg.m};
    return build_fine_grained_state(phases, counts);
}

PureState build_fine_grained_state(std::span<const double> phases,
                                   std::span<const std::int64_t> counts) {
    if (counts.empty() || counts.size() != phases.size())
        throw ValidationError("need one phase per branch count");
    std::int64_t M = 0;
    for (const std::int64_t c : counts) {
        if (c <= 0) throw ValidationError("branch counts must be positive");
        M += c;
    }
    if (M < 2) throw ValidationError("fine-graining needs at least two slots");

    const Index sys_dim = static_cast<Index>(counts.size());
    const std::vector<Index> dims{sys_dim, static_cast<Index>(M), static_cast<Index>(M)};
    const Index total = checked_total_dim(dims);

    Vector amps = Vector::Zero(total);
    const double slot_amp = 1.0 / std::sqrt(static_cast<double>(M));
    Index slot = 0;
    for (Index branch = 0; branch < sys_dim; ++branch) {
        const Complex value = std::polar(slot_amp, phases[branch]);
        for (std::int64_t k = 0; k < counts[branch]; ++k, ++slot)
            amps[flat_sce(branch, slot, 0, M)] = value;
    }
    return PureState(sce_labels(), dims, std::move(amps));
}

PureState apply_cshift(const PureState& state) {
    if (state.num_subsystems() != 3)
        throw ValidationError("c-shift expects a system/counterweight/environment triple");
    const Index sys_dim = state.dims()[0];
    const Index c_dim = state.dims()[1];
    const Index e_dim = state.dims()[2];
    if (e_dim < c_dim)
        throw ValidationError("environment axis is too small to absorb the counterweight index");

    const Vector& in = state.amplitudes();
    Vector out = Vector::Zero(in.size());
    for (Index s = 0; s < sys_dim; ++s) {
        for (Index c = 0; c < c_dim; ++c) {
            for (Index e = 0; e < e_dim; ++e) {
                const Complex value = in[(s * c_dim + c) * e_dim + e];
                if (std::abs(value) <= tol::rank) continue;
                if (e != 0)
                    throw ValidationError(
                        "environment register is not in its initial state e_0");
                out[(s * c_dim + c) * e_dim + c] = value;
            }
        }
    }
    return PureState(state.labels(), state.dims(), std::move(out));
}

BornResult derive_born(Complex alpha, Complex beta, std::int64_t M) {
    if (M < 2) throw ValidationError("denominator M must be at least 2");
    const double p = std::norm(alpha);
    const double q = std::norm(beta);
    if (std::abs(p + q - 1.0) > tol::norm)
        throw ValidationError("amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");

    if (p < tol::rank) return assemble_result({0, M}, M, 0.0);
    if (q < tol::rank) return assemble_result({M, 0}, M, 0.0);

    const FineGraining fg = rational_approximation(p, M);
    const double phases[] = {std::arg(alpha), std::arg(beta)};
    const std::int64_t counts[] = {fg.m, fg.M - fg.m};
    run_pipeline_gate(phases, counts, M);
    return assemble_result({fg.m, fg.M - fg.m}, M, fg.error_bound);
}

BornResult derive_born(std::span<const Complex> amplitudes, std::int64_t M) {
    if (M < 2) throw ValidationError("denominator M must be at least 2");
    if (amplitudes.size() < 2)
        throw ValidationError("need at least two outcome amplitudes");
    double total = 0.0;
    for (const Complex a : amplitudes) total += std::norm(a);
    if (std::abs(total - 1.0) > tol::norm)
        throw ValidationError("amplitudes must be normalized");

    // Apportion M counterweight slots by largest remainder.
    const std::size_t K = amplitudes.size();
    std::vector<std::int64_t> counts(K, 0);
    std::vector<double> fractions(K, 0.0);
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double share = std::norm(amplitudes[k]) * static_cast<double>(M);
        counts[k] = static_cast<std::int64_t>(std::floor(share));
        fractions[k] = share - std::floor(share);
        assigned += counts[k];
    }
    std::vector<std::size_t> by_fraction(K);
    std::iota(by_fraction.begin(), by_fraction.end(), std::size_t{0});
    std::stable_sort(by_fraction.begin(), by_fraction.end(),
                     [&](std::size_t a, std::size_t b) { return fractions[a] > fractions[b]; });
    for (std::size_t r = 0; assigned < M; ++r, ++assigned) ++counts[by_fraction[r % K]];

    std::vector<double> phases(K, 0.0);
    double error_bound = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        phases[k] = std::arg(amplitudes[k]);
        error_bound = std::max(error_bound,
                               std::abs(static_cast<double>(counts[k]) / static_cast<double>(M) -
                                        std::norm(amplitudes[k])));
    }
    run_pipeline_gate(phases, counts, M);
    return assemble_result(std::move(counts), M, error_bound);
}

} // namespace envlab
