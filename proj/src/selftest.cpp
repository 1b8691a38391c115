#include "envlab/selftest.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "envlab/envariance.hpp"
#include "envlab/finegrain.hpp"
#include "envlab/frequency.hpp"
#include "envlab/io.hpp"
#include "envlab/random.hpp"

namespace envlab {

namespace {

struct RandomSchmidt {
    SchmidtDecomposition sd;
    PureState state;
    Index pair_i;
    Index pair_j;

    RandomSchmidt(SchmidtDecomposition sd_, PureState state_, Index i, Index j)
        : sd(std::move(sd_)), state(std::move(state_)), pair_i(i), pair_j(j) {}
};

RandomSchmidt random_schmidt_state(Rng& rng, Index max_rank, bool force_equal_pair) {
    const Index rank = rng.uniform_int(2, max_rank);
    const Index sys_dim = rank + rng.uniform_int(0, 2);
    const Index env_dim = rank + rng.uniform_int(0, 2);

    RealVector squared(rank);
    for (Index k = 0; k < rank; ++k) squared[k] = -std::log(std::max(rng.uniform(), 0x1.0p-53));
    squared /= squared.sum();
    std::sort(squared.data(), squared.data() + rank, std::greater<double>());

    Index i = rng.uniform_int(0, rank - 2);
    Index j = i + 1;
    if (force_equal_pair) {
        const double mean = 0.5 * (squared[i] + squared[j]);
        squared[i] = squared[j] = mean;
    }

    RealVector moduli = squared.cwiseSqrt();
    RealVector phases(rank);
    for (Index k = 0; k < rank; ++k) phases[k] = rng.uniform(0.0, 2.0 * M_PI);

    const Matrix sys_basis = rng.random_unitary(sys_dim).leftCols(rank);
    const Matrix env_basis = rng.random_unitary(env_dim).leftCols(rank);
    auto sd = SchmidtDecomposition::from_data(std::move(moduli), std::move(phases), sys_basis,
                                              env_basis);
    PureState state = sd.reconstruct();
    return RandomSchmidt(std::move(sd), std::move(state), i, j);
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

Check schmidt_roundtrip(Rng& rng, int trials) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Index d_s = rng.uniform_int(2, 8);
        const Index d_e = rng.uniform_int(2, 8);
        const PureState state = rng.random_state({"S", "E"}, {d_s, d_e});
        const SchmidtDecomposition sd = schmidt(state, Cut{{"S"}, {"E"}});
        const double err = (sd.reconstruct().amplitudes() - state.amplitudes()).norm();
        worst = std::max(worst, err);
    }
    return {"schmidt-roundtrip",
            worst < tol::recon,
            "trials=" + std::to_string(trials) + " worst=" + format_double(worst)};
}

Check equal_modulus_criterion(Rng& rng, int trials) {
    double worst_equal = 0.0;     // residual when moduli forced equal
    double best_unequal = 1e300;  // optimal-counter residual when they differ
    for (int t = 0; t < trials; ++t) {
        const bool equal = (t % 2) == 0;
        const RandomSchmidt rs = random_schmidt_state(rng, 6, equal);
        const double gap =
            std::abs(rs.sd.moduli()[rs.pair_i] - rs.sd.moduli()[rs.pair_j]);
        const SwapSpec spec(rs.pair_i, rs.pair_j, rng.uniform(0.0, 2.0 * M_PI));
        const auto [u_s, u_e] = swap_pair(rs.sd, spec);
        const double residual = envariance_residual(rs.state, u_s, u_e);
        if (gap < tol::eq) {
            worst_equal = std::max(worst_equal, residual);
        } else if (gap > 0.05) {
            const CounterResult counter = optimal_counter(rs.state, u_s);
            best_unequal = std::min(best_unequal, counter.residual);
        }
    }
    const bool pass = worst_equal < tol::recon && best_unequal > 0.01;
    return {"equal-modulus-criterion",
            pass,
            "trials=" + std::to_string(trials) + " worst_equal=" + format_double(worst_equal) +
                " min_unequal=" + format_double(best_unequal)};
}

Check no_signaling(Rng& rng, int trials) {
    int mismatches = 0;
    for (int t = 0; t < trials; ++t) {
        const Index d_s = rng.uniform_int(2, 5);
        const Index d_e = rng.uniform_int(2, 5);
        const PureState state = rng.random_state({"S", "E"}, {d_s, d_e});
        const LocalUnitary u_e("E", rng.random_unitary(d_e));
        const PureState kicked = apply_local(state, u_e);
        const Cut cut{{"S"}, {"E"}};
        if (!descriptions_match(envariant_description(state, cut),
                                envariant_description(kicked, cut)))
            ++mismatches;
    }
    return {"no-signaling",
            mismatches == 0,
            "trials=" + std::to_string(trials) + " mismatches=" + std::to_string(mismatches)};
}

Check finegrain_gate(Rng& rng, std::int64_t max_M) {
    double worst = 0.0;
    for (std::int64_t M = 2; M <= max_M; ++M) {
        for (std::int64_t m = 1; m < M; ++m) {
            const double phi0 = rng.uniform(0.0, 2.0 * M_PI);
            const double phi1 = rng.uniform(0.0, 2.0 * M_PI);
            const Complex alpha = std::polar(std::sqrt(static_cast<double>(m) / M), phi0);
            const Complex beta =
                std::polar(std::sqrt(static_cast<double>(M - m) / M), phi1);
            const BornResult born = derive_born(alpha, beta, M);
            worst = std::max(worst, std::abs(born.probabilities[0] -
                                             static_cast<double>(m) / static_cast<double>(M)));
            if (born.branch_counts[0] != m) worst = std::max(worst, 1.0);
        }
    }
    return {"finegrain-gate",
            worst < 1e-15,
            "max_M=" + std::to_string(max_M) + " worst=" + format_double(worst)};
}

Check oracle_equivalence() {
    bool pass = true;
    for (std::int64_t N = 1; N <= 2; ++N)
        for (std::int64_t M = 2; M <= 3; ++M)
            for (std::int64_t m = 1; m < M; ++m) {
                const EnsembleDistribution exact = ensemble_counts(N, m, M);
                const EnsembleDistribution oracle = ensemble_oracle(N, m, M);
                if (exact.counts != oracle.counts) pass = false;
            }
    return {"oracle-equivalence", pass, "N<=2 M<=3"};
}

Check certificate_law(Rng& rng, int trials) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const RandomSchmidt rs = random_schmidt_state(rng, 4, (t % 2) == 0);
        const SwapSpec spec(rs.pair_i, rs.pair_j, rng.uniform(0.0, 2.0 * M_PI));
        const auto [u_s, u_e] = swap_pair(rs.sd, spec);
        const CounterResult counter = optimal_counter(rs.state, u_s);
        worst = std::max(worst, std::abs(counter.residual * counter.residual +
                                         2.0 * counter.certificate - 2.0));
        worst = std::max(worst, counter.certificate - 1.0);
    }
    return {"certificate-law", worst <= tol::cert,
            "trials=" + std::to_string(trials) + " worst=" + format_double(worst)};
}

} // namespace

int run_selftest(std::uint64_t seed, std::ostream& out) {
    Rng rng(seed);
    std::vector<Check> checks;
    checks.push_back(schmidt_roundtrip(rng, 200));
    checks.push_back(equal_modulus_criterion(rng, 200));
    checks.push_back(no_signaling(rng, 100));
    checks.push_back(finegrain_gate(rng, 12));
    checks.push_back(oracle_equivalence());
    checks.push_back(certificate_law(rng, 50));

    int failures = 0;
    out << "selftest seed=" << seed << "\n";
    for (const Check& check : checks) {
        if (!check.pass) ++failures;
        out << (check.pass ? "ok   " : "FAIL ") << check.name << " " << check.detail << "\n";
    }
    out << (failures == 0 ? "all checks passed" : "checks failed") << " (" << checks.size() - failures
        << "/" << checks.size() << ")\n";
    return failures;
}

} // namespace envlab
