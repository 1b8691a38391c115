#include <doctest.h>

#include <cmath>

#include "envlab/hilbert.hpp"
#include "envlab/random.hpp"

using namespace envlab;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState bell_state() {
    Vector amps(4);
    amps << kInvSqrt2, 0.0, 0.0, kInvSqrt2;
    return PureState({"S", "E"}, {2, 2}, amps);
}

PureState qubit(Complex a0, Complex a1, const std::string& label = "S") {
    Vector amps(2);
    amps << a0, a1;
    return PureState::normalized({label}, {2}, amps);
}

} // namespace

TEST_CASE("pure state validation") {
    Vector amps(4);
    amps << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(PureState({"S"}, {2, 2}, amps), ValidationError);        // label/dim mismatch
    CHECK_THROWS_AS(PureState({"S", "S"}, {2, 2}, amps), ValidationError);   // duplicate label
    CHECK_THROWS_AS(PureState({"S", "E"}, {2, 3}, amps), ValidationError);   // wrong length
    Vector unnormalized(4);
    unnormalized << 1.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(PureState({"S", "E"}, {2, 2}, unnormalized), ValidationError);
    CHECK_NOTHROW(PureState::normalized({"S", "E"}, {2, 2}, unnormalized));
}

TEST_CASE("tensor of basis states") {
    const PureState zero_s = PureState::basis_state({"A"}, {2}, std::vector<Index>{0});
    const PureState zero_e = PureState::basis_state({"B"}, {2}, std::vector<Index>{0});
    const PureState joint = tensor(zero_s, zero_e);
    Vector expected(4);
    expected << 1.0, 0.0, 0.0, 0.0;
    CHECK((joint.amplitudes() - expected).norm() == 0.0);
}

TEST_CASE("tensor of bell state with a qubit") {
    const PureState third = PureState::basis_state({"A"}, {2}, std::vector<Index>{0});
    const PureState joint = tensor(bell_state(), third);
    REQUIRE(joint.dim() == 8);
    CHECK(joint.amplitudes()[0].real() == doctest::Approx(kInvSqrt2).epsilon(1e-15));
    CHECK(joint.amplitudes()[6].real() == doctest::Approx(kInvSqrt2).epsilon(1e-15));
    for (const Index k : {1, 2, 3, 4, 5, 7}) CHECK(std::abs(joint.amplitudes()[k]) == 0.0);
}

TEST_CASE("tensor of two unbalanced qubits") {
    const PureState q = qubit(std::sqrt(1.0 / 3.0), std::sqrt(2.0 / 3.0), "A");
    const PureState joint = tensor(q, relabel(q, {"B"}));
    CHECK(joint.amplitudes()[3].real() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("tensor errors") {
    CHECK_THROWS_AS(tensor(std::span<const PureState>{}), ValidationError);
    const PureState q = qubit(1.0, 0.0);
    CHECK_THROWS_AS(tensor(q, q), ValidationError);  // duplicate labels

    set_dimension_cap(8);
    const PureState a = qubit(1.0, 0.0, "A");
    const PureState b = qubit(1.0, 0.0, "B");
    const PureState c = qubit(1.0, 0.0, "C");
    const PureState d = qubit(1.0, 0.0, "D");
    const PureState abc[] = {a, b, c};
    CHECK_NOTHROW(tensor(std::span<const PureState>(abc, 3)));
    const PureState abcd[] = {a, b, c, d};
    CHECK_THROWS_AS(tensor(std::span<const PureState>(abcd, 4)), ValidationError);
    set_dimension_cap(std::int64_t{1} << 24);
}

TEST_CASE("tensor is associative up to relabeling") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const PureState a = rng.random_state({"A"}, {rng.uniform_int(2, 4)});
        const PureState b = rng.random_state({"B"}, {rng.uniform_int(2, 4)});
        const PureState c = rng.random_state({"C"}, {rng.uniform_int(2, 4)});
        const PureState left = tensor(tensor(a, b), c);
        const PureState abc[] = {a, b, c};
        const PureState flat = tensor(std::span<const PureState>(abc, 3));
        CHECK((left.amplitudes() - flat.amplitudes()).norm() == 0.0);
    }
}

TEST_CASE("apply_local identity leaves the state unchanged") {
    const PureState bell = bell_state();
    const LocalUnitary id("E", Matrix::Identity(2, 2));
    const PureState out = apply_local(bell, id);
    CHECK((out.amplitudes() - bell.amplitudes()).norm() == 0.0);
}

TEST_CASE("matched swaps on both sides fix the bell state") {
    const PureState bell = bell_state();
    Matrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    const PureState once = apply_local(bell, LocalUnitary("S", x));
    CHECK((once.amplitudes() - bell.amplitudes()).norm() > 0.5);  // swap alone moves it
    const PureState both = apply_local(once, LocalUnitary("E", x));
    CHECK((both.amplitudes() - bell.amplitudes()).norm() < 1e-15);
}

TEST_CASE("phase rotation on one side shifts the overlap") {
    const PureState bell = bell_state();
    Matrix phase = Matrix::Identity(2, 2);
    phase(0, 0) = std::polar(1.0, M_PI / 3.0);
    const PureState rotated = apply_local(bell, LocalUnitary("S", phase));
    const Complex expected = (std::polar(1.0, M_PI / 3.0) + 1.0) / 2.0;
    CHECK(std::abs(overlap(bell, rotated) - expected) < 1e-14);
}

TEST_CASE("apply_local errors") {
    const PureState bell = bell_state();
    CHECK_THROWS_AS(apply_local(bell, LocalUnitary("X", Matrix::Identity(2, 2))),
                    ValidationError);  // unknown label
    CHECK_THROWS_AS(apply_local(bell, LocalUnitary("S", Matrix::Identity(3, 3))),
                    ValidationError);  // dimension mismatch
    Matrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(LocalUnitary("S", bad), ValidationError);  // non-unitary
}

TEST_CASE("apply_local preserves norm for random unitaries") {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const Index d_s = rng.uniform_int(2, 5);
        const Index d_e = rng.uniform_int(2, 5);
        const PureState state = rng.random_state({"S", "E"}, {d_s, d_e});
        const LocalUnitary u("S", rng.random_unitary(d_s));
        CHECK(apply_local(state, u).amplitudes().norm() == doctest::Approx(1.0).epsilon(tol::norm));
    }
}

TEST_CASE("apply_local on disjoint targets commutes") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const PureState state = rng.random_state({"S", "C", "E"}, {2, 3, 2});
        const LocalUnitary u_s("S", rng.random_unitary(2));
        const LocalUnitary u_c("C", rng.random_unitary(3));
        const PureState sc = apply_local(apply_local(state, u_s), u_c);
        const PureState cs = apply_local(apply_local(state, u_c), u_s);
        CHECK((sc.amplitudes() - cs.amplitudes()).norm() < tol::recon);
    }
}

TEST_CASE("apply_local to a grouped target") {
    Rng rng(17);
    const PureState state = rng.random_state({"S", "C", "E"}, {2, 3, 2});
    const Matrix u = rng.random_unitary(6);
    const PureState grouped = apply_local(state, LocalUnitary(std::vector<std::string>{"S", "C"}, u));
    CHECK(grouped.amplitudes().norm() == doctest::Approx(1.0).epsilon(tol::norm));
    // identity on the group is still the identity
    const PureState id = apply_local(state, LocalUnitary(std::vector<std::string>{"C", "E"}, Matrix::Identity(6, 6)));
    CHECK((id.amplitudes() - state.amplitudes()).norm() == 0.0);
}

TEST_CASE("schmidt of the bell state") {
    const SchmidtDecomposition sd = schmidt(bell_state(), Cut{{"S"}, {"E"}});
    CHECK(sd.rank() == 2);
    CHECK(sd.moduli()[0] == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(sd.moduli()[1] == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(sd.phases().norm() == 0.0);
}

TEST_CASE("schmidt of a product state has rank 1") {
    const PureState plus = qubit(kInvSqrt2, kInvSqrt2, "E");
    const PureState zero = qubit(1.0, 0.0, "S");
    const SchmidtDecomposition sd = schmidt(tensor(zero, plus), Cut{{"S"}, {"E"}});
    CHECK(sd.rank() == 1);
    CHECK(sd.moduli()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("schmidt sorts moduli descending") {
    Vector amps(4);
    amps << std::sqrt(1.0 / 3.0), 0.0, 0.0, std::sqrt(2.0 / 3.0);
    const PureState state({"S", "E"}, {2, 2}, amps);
    const SchmidtDecomposition sd = schmidt(state, Cut{{"S"}, {"E"}});
    CHECK(sd.moduli()[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(sd.moduli()[1] == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("schmidt cut validation") {
    const PureState bell = bell_state();
    CHECK_THROWS_AS(schmidt(bell, Cut{{"S"}, {"X"}}), ValidationError);
    CHECK_THROWS_AS(schmidt(bell, Cut{{"S", "E"}, {}}), ValidationError);
    CHECK_THROWS_AS(schmidt(bell, Cut{{"S"}, {"S"}}), ValidationError);
    const PureState three = tensor(bell, qubit(1.0, 0.0, "C"));
    CHECK_THROWS_AS(schmidt(three, Cut{{"S"}, {"E"}}), ValidationError);  // C not covered
}

TEST_CASE("schmidt round-trip on random bipartite states") {
    Rng rng(23);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Index d_s = rng.uniform_int(2, 8);
        const Index d_e = rng.uniform_int(2, 8);
        const PureState state = rng.random_state({"S", "E"}, {d_s, d_e});
        const SchmidtDecomposition sd = schmidt(state, Cut{{"S"}, {"E"}});
        worst = std::max(worst, (sd.reconstruct().amplitudes() - state.amplitudes()).norm());
    }
    CHECK(worst < tol::recon);
}

TEST_CASE("schmidt round-trip respects multipartite layouts") {
    Rng rng(29);
    for (int t = 0; t < 50; ++t) {
        const PureState state = rng.random_state({"S", "C", "E"}, {2, 3, 4});
        const SchmidtDecomposition sd = schmidt(state, Cut{{"S", "E"}, {"C"}});
        CHECK(sd.reconstruct().labels() == state.labels());
        CHECK((sd.reconstruct().amplitudes() - state.amplitudes()).norm() < tol::recon);
    }
}

TEST_CASE("explicit phases round-trip through from_data") {
    RealVector moduli(2);
    moduli << kInvSqrt2, kInvSqrt2;
    RealVector phases(2);
    phases << 0.3, 5.1;
    const auto sd = SchmidtDecomposition::from_data(moduli, phases, Matrix::Identity(2, 2),
                                                    Matrix::Identity(2, 2));
    const PureState state = sd.reconstruct();
    CHECK(std::abs(state.amplitudes()[0] - std::polar(kInvSqrt2, 0.3)) < 1e-15);
    CHECK(std::abs(state.amplitudes()[3] - std::polar(kInvSqrt2, 5.1)) < 1e-15);
}

TEST_CASE("reduced density of the bell state is maximally mixed") {
    const DensityMatrix rho = reduced_density(bell_state(), {"S"});
    CHECK((rho.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reduced density reproduces squared schmidt moduli") {
    Vector amps(4);
    amps << std::sqrt(1.0 / 3.0), 0.0, 0.0, std::sqrt(2.0 / 3.0);
    const PureState state({"S", "E"}, {2, 2}, amps);
    const DensityMatrix rho = reduced_density(state, {"S"});
    CHECK(rho.matrix()(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rho.matrix()(1, 1).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(rho.matrix()(0, 1)) < 1e-14);
}

TEST_CASE("reduced density eigenvalues equal squared moduli for random states") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        const Index d_s = rng.uniform_int(2, 6);
        const Index d_e = rng.uniform_int(2, 6);
        const PureState state = rng.random_state({"S", "E"}, {d_s, d_e});
        const SchmidtDecomposition sd = schmidt(state, Cut{{"S"}, {"E"}});
        RealVector eig = reduced_density(state, {"S"}).eigenvalues();  // ascending
        std::reverse(eig.data(), eig.data() + eig.size());
        for (Index k = 0; k < std::min<Index>(eig.size(), sd.moduli().size()); ++k)
            CHECK(std::abs(eig[k] - sd.moduli()[k] * sd.moduli()[k]) < tol::eig);
    }
}

TEST_CASE("reduced density of a product state is a rank-1 projector") {
    const PureState prod = tensor(qubit(0.6, 0.8, "S"), qubit(1.0, 0.0, "E"));
    const DensityMatrix rho = reduced_density(prod, {"S"});
    CHECK((rho.matrix() * rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("overlap basics") {
    const PureState bell = bell_state();
    CHECK(std::abs(overlap(bell, bell) - 1.0) < 1e-15);
    const PureState e0 = PureState::basis_state({"S"}, {3}, std::vector<Index>{0});
    const PureState e1 = PureState::basis_state({"S"}, {3}, std::vector<Index>{1});
    CHECK(std::abs(overlap(e0, e1)) == 0.0);
    CHECK_THROWS_AS(overlap(bell, e0), ValidationError);
}

TEST_CASE("overlap of the interference pair") {
    const double s = 1.0 / std::sqrt(3.0);
    Vector a(3), b(3);
    a << s, s, -s;
    b << -s, s, s;
    const PureState chi({"S"}, {3}, a);
    const PureState swapped({"S"}, {3}, b);
    CHECK(overlap(chi, swapped).real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(overlap(chi, swapped).imag()) < 1e-15);
}
