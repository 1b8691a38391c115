#pragma once

#include <cstdint>
#include <random>

#include "envlab/hilbert.hpp"

namespace envlab {

/// Deterministic sampling utilities. Only the raw mt19937_64 stream is used;
/// all transforms are implemented here so that a seed fully determines every
/// draw regardless of standard-library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    Complex gaussian_complex() {
        const double re = gaussian();
        return {re, gaussian()};
    }

    Vector random_unit_vector(Index dim);
    Matrix random_unitary(Index dim);
    PureState random_state(std::vector<std::string> labels, std::vector<Index> dims);

private:
    std::mt19937_64 eng_;
};

} // namespace envlab
