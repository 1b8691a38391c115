#include <doctest.h>

#include <cmath>

#include "envlab/finegrain.hpp"
#include "envlab/random.hpp"

using namespace envlab;

namespace {

SchmidtDecomposition equal_schmidt(Index n, Index total = -1) {
    if (total < 0) total = n;
    RealVector moduli = RealVector::Zero(total);
    for (Index k = 0; k < n; ++k) moduli[k] = 1.0 / std::sqrt(static_cast<double>(n));
    return SchmidtDecomposition::from_data(moduli, RealVector::Zero(total),
                                           Matrix::Identity(total, total),
                                           Matrix::Identity(total, total));
}

} // namespace

TEST_CASE("equal-coefficient probabilities") {
    SUBCASE("two equal branches") {
        const auto probs = equal_coeff_probabilities(equal_schmidt(2));
        REQUIRE(probs.size() == 2);
        CHECK(probs[0] == 0.5);
        CHECK(probs[1] == 0.5);
    }
    SUBCASE("a single branch carries everything") {
        const auto probs = equal_coeff_probabilities(equal_schmidt(1, 2));
        REQUIRE(probs.size() == 2);
        CHECK(probs[0] == 1.0);
        CHECK(probs[1] == 0.0);  // absent branches have zero probability
    }
    SUBCASE("unequal moduli are rejected toward the fine-graining pipeline") {
        RealVector moduli(2);
        moduli << std::sqrt(0.8), std::sqrt(0.2);
        const auto sd = SchmidtDecomposition::from_data(moduli, RealVector::Zero(2),
                                                        Matrix::Identity(2, 2),
                                                        Matrix::Identity(2, 2));
        CHECK_THROWS_WITH_AS(equal_coeff_probabilities(sd),
                             doctest::Contains("fine-graining"), ValidationError);
    }
}

TEST_CASE("subset probability counts members over N") {
    const auto sd = equal_schmidt(4);
    const Index pair[] = {0, 2};
    CHECK(subset_probability(sd, pair) == 0.5);
    const Index one[] = {3};
    CHECK(subset_probability(sd, one) == 0.25);
    const Index dup[] = {1, 1};
    CHECK_THROWS_AS(subset_probability(sd, dup), ValidationError);
    const Index oob[] = {9};
    CHECK_THROWS_AS(subset_probability(sd, oob), ValidationError);
}

TEST_CASE("rational approximation hits exact fractions") {
    const FineGraining third = rational_approximation(1.0 / 3.0, 3);
    CHECK(third.m == 1);
    CHECK(third.error_bound == 0.0);
    CHECK(third.exact());

    const FineGraining tenths = rational_approximation(0.3, 10);
    CHECK(tenths.m == 3);
    CHECK(tenths.error_bound == 0.0);
}

TEST_CASE("rational approximation of 1/pi matches a brute-force scan") {
    const double p = 1.0 / M_PI;
    const FineGraining fg = rational_approximation(p, 100);
    CHECK(fg.m == 32);
    CHECK(fg.error_bound <= 0.005);
    CHECK_FALSE(fg.exact());

    // oracle: scan every interior numerator for the minimizer
    std::int64_t best_m = 1;
    double best_err = 2.0;
    for (std::int64_t m = 1; m <= 99; ++m) {
        const double err = std::abs(static_cast<double>(m) / 100.0 - p);
        if (err < best_err) {
            best_err = err;
            best_m = m;
        }
    }
    CHECK(fg.m == best_m);
    CHECK(fg.error_bound == doctest::Approx(best_err).epsilon(1e-15));
    CHECK(fg.m_lower == 31);
    CHECK(fg.m_upper == 32);
}

TEST_CASE("rational approximation degenerate and invalid input") {
    CHECK(rational_approximation(0.0, 8).degenerate);
    CHECK(rational_approximation(1.0, 8).degenerate);
    CHECK_FALSE(rational_approximation(0.5, 8).degenerate);
    CHECK_THROWS_AS(rational_approximation(0.5, 1), ValidationError);
    CHECK_THROWS_AS(rational_approximation(1.5, 8), ValidationError);
    CHECK_THROWS_AS(rational_approximation(-0.2, 8), ValidationError);
}

TEST_CASE("doubling the denominator never increases the error bound") {
    Rng rng(211);
    for (int t = 0; t < 200; ++t) {
        const double p = rng.uniform(0.001, 0.999);
        double prev = rational_approximation(p, 2).error_bound;
        for (std::int64_t M = 4; M <= 4096; M *= 2) {
            const double err = rational_approximation(p, M).error_bound;
            CHECK(err <= prev + 1e-18);
            prev = err;
        }
    }
}

TEST_CASE("default denominator meets the requested tolerance") {
    const std::int64_t M = default_denominator(1.0 / M_PI, 1e-3);
    CHECK(M <= 10000);
    CHECK(rational_approximation(1.0 / M_PI, M).error_bound <= 1e-3);
    CHECK(default_denominator(1.0 / 3.0, 1e-3) == 3);
}

TEST_CASE("fine-grained state for m=1, M=2") {
    const FineGraining fg = rational_approximation(0.5, 2);
    const PureState psi = build_fine_grained_state(0.0, 0.0, fg);
    CHECK(psi.dims() == std::vector<Index>{2, 2, 2});
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Index nonzero = 0;
    for (Index k = 0; k < psi.dim(); ++k) {
        const double mag = std::abs(psi.amplitudes()[k]);
        if (mag == 0.0) continue;
        ++nonzero;
        CHECK(mag == doctest::Approx(inv_sqrt2).epsilon(1e-15));
    }
    CHECK(nonzero == 2);
}

TEST_CASE("fine-grained state for m=1, M=3 spreads the second branch") {
    const FineGraining fg = rational_approximation(1.0 / 3.0, 3);
    const PureState psi = build_fine_grained_state(0.0, 0.0, fg);
    // branch |1> carries slots c_2, c_3, each with amplitude 1/sqrt(3)
    const double expected = 1.0 / std::sqrt(3.0);
    const Index m_count = 3;
    const Index base = 1 * m_count * m_count;  // s=1, c, e=0
    CHECK(std::abs(psi.amplitudes()[base + 1 * m_count + 0]) ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs(psi.amplitudes()[base + 2 * m_count + 0]) ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fine-grained state carries the branch phases") {
    Rng rng(223);
    for (int t = 0; t < 10; ++t) {
        const double phi0 = rng.uniform(0.0, 2.0 * M_PI);
        const double phi1 = rng.uniform(0.0, 2.0 * M_PI);
        const FineGraining fg = rational_approximation(0.4, 5);
        const PureState psi = build_fine_grained_state(phi0, phi1, fg);
        CHECK(std::arg(psi.amplitudes()[0]) == doctest::Approx(phi0 > M_PI ? phi0 - 2.0 * M_PI : phi0));
        CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("degenerate fine-graining cannot be built") {
    CHECK_THROWS_AS(build_fine_grained_state(0.0, 0.0, rational_approximation(0.0, 4)),
                    ValidationError);
}

TEST_CASE("c-shift correlates counterweight and environment") {
    const FineGraining fg = rational_approximation(0.5, 2);
    const PureState psi = build_fine_grained_state(0.3, 1.9, fg);
    const PureState shifted = apply_cshift(psi);
    // (e^{i phi0}|0, c_0, e_0> + e^{i phi1}|1, c_1, e_1>) / sqrt(2)
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(shifted.amplitudes()[0] - std::polar(inv_sqrt2, 0.3)) < 1e-15);
    CHECK(std::abs(shifted.amplitudes()[7] - std::polar(inv_sqrt2, 1.9)) < 1e-15);
    CHECK(shifted.amplitudes().cwiseAbs().sum() ==
          doctest::Approx(2.0 * inv_sqrt2).epsilon(1e-14));
}

TEST_CASE("c-shift equalizes the SC|E schmidt spectrum") {
    const FineGraining fg = rational_approximation(0.4, 5);  // m=2, M=5
    const PureState shifted = apply_cshift(build_fine_grained_state(0.0, 0.0, fg));
    const SchmidtDecomposition sd = schmidt(shifted, Cut{{"S", "C"}, {"E"}});
    CHECK(sd.rank() == 5);
    const double expected = 1.0 / std::sqrt(5.0);
    for (Index k = 0; k < sd.rank(); ++k)
        CHECK(sd.moduli()[k] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("c-shift preconditions") {
    const FineGraining fg = rational_approximation(0.5, 4);
    const PureState psi = build_fine_grained_state(0.0, 0.0, fg);
    const PureState shifted = apply_cshift(psi);
    CHECK_THROWS_WITH_AS(apply_cshift(shifted), doctest::Contains("initial state"),
                         ValidationError);

    Rng rng(227);
    CHECK_THROWS_AS(apply_cshift(rng.random_state({"S", "E"}, {2, 2})), ValidationError);
    // environment axis smaller than the counterweight axis
    Vector amps = Vector::Zero(2 * 3 * 2);
    amps[0] = 1.0;
    CHECK_THROWS_AS(apply_cshift(PureState({"S", "C", "E"}, {2, 3, 2}, amps)), ValidationError);
}

TEST_CASE("c-shift commutes with earlier system-side rotations") {
    Rng rng(229);
    for (int t = 0; t < 10; ++t) {
        const FineGraining fg = rational_approximation(0.4, 5);
        const PureState psi =
            build_fine_grained_state(rng.uniform(0.0, 2.0 * M_PI), rng.uniform(0.0, 2.0 * M_PI), fg);
        Matrix u = Matrix::Zero(2, 2);
        u(0, 0) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
        u(1, 1) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
        const LocalUnitary u_s("S", u);
        const PureState rotate_then_shift = apply_cshift(apply_local(psi, u_s));
        const PureState shift_then_rotate = apply_local(apply_cshift(psi), u_s);
        CHECK((rotate_then_shift.amplitudes() - shift_then_rotate.amplitudes()).norm() <
              tol::recon);
    }
}

TEST_CASE("derive_born on an exact rational weight") {
    const BornResult result = derive_born(std::sqrt(1.0 / 3.0), std::sqrt(2.0 / 3.0), 3);
    REQUIRE(result.probabilities.size() == 2);
    CHECK(result.probabilities[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(result.probabilities[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(result.branch_counts == std::vector<std::int64_t>{1, 2});
    CHECK(result.method == BornMethod::exact_rational);
    CHECK(std::string(to_string(result.method)) == "exact-rational");
}

TEST_CASE("derive_born handles certainty without fine-graining") {
    const BornResult result = derive_born(1.0, 0.0, 16);
    CHECK(result.probabilities == std::vector<double>{1.0, 0.0});
    CHECK(result.branch_counts == std::vector<std::int64_t>{16, 0});
    const BornResult flipped = derive_born(0.0, {0.0, 1.0}, 16);
    CHECK(flipped.probabilities == std::vector<double>{0.0, 1.0});
}

TEST_CASE("derive_born at a large denominator stays within the bracketing bound") {
    const double p = 1.0 / std::sqrt(2.0);
    const BornResult result = derive_born(std::sqrt(p), std::sqrt(1.0 - p), 10000);
    CHECK(result.branch_counts[0] == 7071);
    CHECK(std::abs(result.probabilities[0] - p) <= 5e-5);
    CHECK(result.method == BornMethod::bounded_approximation);
    CHECK(result.error_bound <= 5e-5);
}

TEST_CASE("derive_born validates its amplitudes") {
    CHECK_THROWS_AS(derive_born(1.0, 1.0, 4), ValidationError);
    CHECK_THROWS_AS(derive_born(1.0, 0.0, 1), ValidationError);
}

TEST_CASE("derive_born output is independent of branch phases") {
    Rng rng(233);
    const double p = 0.37;
    const BornResult base = derive_born(std::sqrt(p), std::sqrt(1.0 - p), 64);
    for (int t = 0; t < 5; ++t) {
        const Complex alpha = std::polar(std::sqrt(p), rng.uniform(0.0, 2.0 * M_PI));
        const Complex beta = std::polar(std::sqrt(1.0 - p), rng.uniform(0.0, 2.0 * M_PI));
        const BornResult turned = derive_born(alpha, beta, 64);
        CHECK(turned.probabilities == base.probabilities);  // exactly equal
        CHECK(turned.branch_counts == base.branch_counts);
    }
}

TEST_CASE("derive_born convergence for an irrational weight") {
    const double p = 1.0 / M_PI;
    double prev_err = 1.0;
    for (std::int64_t M = 2; M <= 8192; M *= 2) {
        const BornResult result =
            derive_born(std::sqrt(p), std::sqrt(1.0 - p), M);
        const double err = std::abs(result.probabilities[0] - p);
        CHECK(err <= 0.5 / static_cast<double>(M));
        CHECK(err <= prev_err + 1e-18);
        prev_err = err;
    }
}

TEST_CASE("derive_born gate holds for random fine-grainings") {
    Rng rng(239);
    for (int t = 0; t < 30; ++t) {
        const std::int64_t M = rng.uniform_int(2, 32);
        const std::int64_t m = rng.uniform_int(1, M - 1);
        const double p = static_cast<double>(m) / static_cast<double>(M);
        const Complex alpha = std::polar(std::sqrt(p), rng.uniform(0.0, 2.0 * M_PI));
        const Complex beta = std::polar(std::sqrt(1.0 - p), rng.uniform(0.0, 2.0 * M_PI));
        const BornResult result = derive_born(alpha, beta, M);  // gate must not throw
        CHECK(result.branch_counts[0] == m);
        CHECK(result.probabilities[0] * static_cast<double>(M) ==
              doctest::Approx(static_cast<double>(m)).epsilon(1e-15));
    }
}

TEST_CASE("derive_born generalizes to several outcomes") {
    const std::vector<Complex> amps = {std::sqrt(1.0 / 6.0), std::sqrt(2.0 / 6.0),
                                       std::sqrt(3.0 / 6.0)};
    const BornResult result = derive_born(amps, 6);
    CHECK(result.branch_counts == std::vector<std::int64_t>{1, 2, 3});
    CHECK(result.probabilities[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(result.probabilities[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(result.probabilities[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
    // sqrt/|.|^2 round-trips of the input amplitudes may leave an ulp behind
    CHECK(result.error_bound <= 1e-15);

    // counts must sum to M even when shares do not divide evenly
    const std::vector<Complex> uneven = {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
    const BornResult apportioned = derive_born(uneven, 7);
    std::int64_t total = 0;
    for (const std::int64_t c : apportioned.branch_counts) total += c;
    CHECK(total == 7);
}
