#include "envlab/frequency.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "envlab/finegrain.hpp"

namespace envlab {

namespace {

void validate_counting_args(std::int64_t N, std::int64_t m, std::int64_t M) {
    if (N < 1) throw ValidationError("ensemble size N must be at least 1");
    if (m < 1 || m >= M)
        throw ValidationError("counter split requires 1 <= m < M");
}

} // namespace

double big_ratio(const BigInt& numerator, const BigInt& denominator) {
    if (denominator == 0) throw ValidationError("division by zero big integer");
    const std::size_t bits = std::max(msb(denominator), numerator == 0 ? 0u : msb(numerator));
    if (bits <= 960) return numerator.convert_to<double>() / denominator.convert_to<double>();
    const unsigned shift = static_cast<unsigned>(bits - 960);
    const BigInt a = numerator >> shift;
    const BigInt b = denominator >> shift;
    return a.convert_to<double>() / b.convert_to<double>();
}

EnsembleDistribution ensemble_counts(std::int64_t N, std::int64_t m, std::int64_t M) {
    validate_counting_args(N, m, M);
    EnsembleDistribution dist;
    dist.N = N;
    dist.m = m;
    dist.M = M;
    dist.counts.resize(static_cast<std::size_t>(N) + 1);
    dist.probabilities.resize(static_cast<std::size_t>(N) + 1);

    const BigInt total = pow(BigInt(M), static_cast<unsigned>(N));
    BigInt binom = 1;  // C(N, 0)
    for (std::int64_t n = 0; n <= N; ++n) {
        dist.counts[static_cast<std::size_t>(n)] =
            binom * pow(BigInt(m), static_cast<unsigned>(n)) *
            pow(BigInt(M - m), static_cast<unsigned>(N - n));
        dist.probabilities[static_cast<std::size_t>(n)] =
            big_ratio(dist.counts[static_cast<std::size_t>(n)], total);
        if (n < N) binom = binom * (N - n) / (n + 1);
    }
    return dist;
}

std::vector<double> ensemble_probabilities(std::int64_t N, double p0) {
    if (N < 1) throw ValidationError("ensemble size N must be at least 1");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw ValidationError("p0 must lie in [0, 1]");

    std::vector<double> probs(static_cast<std::size_t>(N) + 1, 0.0);
    if (p0 == 0.0) {
        probs[0] = 1.0;
        return probs;
    }
    if (p0 == 1.0) {
        probs.back() = 1.0;
        return probs;
    }

    // Log-gamma in extended precision: the three lgamma terms are ~N log N
    // and nearly cancel, so double-precision ulps alone would show up in the
    // normalization at large N.
    const long double lp = std::log(static_cast<long double>(p0));
    const long double lq = std::log1p(static_cast<long double>(-p0));
    const long double lg_total = std::lgamma(static_cast<long double>(N) + 1.0L);
    for (std::int64_t n = 0; n <= N; ++n) {
        const long double log_weight = lg_total -
                                       std::lgamma(static_cast<long double>(n) + 1.0L) -
                                       std::lgamma(static_cast<long double>(N - n) + 1.0L) +
                                       static_cast<long double>(n) * lp +
                                       static_cast<long double>(N - n) * lq;
        probs[static_cast<std::size_t>(n)] = static_cast<double>(std::exp(log_weight));
    }
    return probs;
}

double gaussian_approx(std::int64_t N, double p0, double n) {
    if (N < 1) throw ValidationError("ensemble size N must be at least 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw ValidationError("Gaussian approximation is undefined at zero variance (p0 in {0,1})");
    const double sigma = std::sqrt(static_cast<double>(N) * p0 * (1.0 - p0));
    const double z = (n - p0 * static_cast<double>(N)) / sigma;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * sigma);
}

EnsembleDistribution ensemble_oracle(std::int64_t N, std::int64_t m, std::int64_t M) {
    validate_counting_args(N, m, M);
    if (N > 3 || M > 3)
        throw ValidationError("oracle caps: N <= 3 and M <= 3 (explicit tensor blow-up)");

    const double phases[] = {0.0, 0.0};
    const std::int64_t split[] = {m, M - m};
    const PureState triplet = apply_cshift(build_fine_grained_state(phases, split));

    std::vector<PureState> copies;
    for (std::int64_t ell = 1; ell <= N; ++ell) {
        const std::string suffix = std::to_string(ell);
        copies.push_back(relabel(triplet, {"S" + suffix, "C" + suffix, "E" + suffix}));
    }
    const PureState ensemble = tensor(copies);

    EnsembleDistribution dist;
    dist.N = N;
    dist.m = m;
    dist.M = M;
    dist.counts.assign(static_cast<std::size_t>(N) + 1, BigInt(0));
    dist.probabilities.assign(static_cast<std::size_t>(N) + 1, 0.0);

    const auto& dims = ensemble.dims();
    for (Index idx = 0; idx < ensemble.dim(); ++idx) {
        if (std::abs(ensemble.amplitudes()[idx]) <= tol::rank) continue;
        // counterweight indices c_k with k <= m record "0"
        Index rest = idx;
        std::int64_t zeros = 0;
        for (std::size_t axis = dims.size(); axis-- > 0;) {
            const Index digit = rest % dims[axis];
            rest /= dims[axis];
            if (axis % 3 == 1 && digit < m) ++zeros;
        }
        dist.counts[static_cast<std::size_t>(zeros)] += 1;
    }

    const BigInt total = pow(BigInt(M), static_cast<unsigned>(N));
    for (std::size_t n = 0; n < dist.counts.size(); ++n)
        dist.probabilities[n] = big_ratio(dist.counts[n], total);
    return dist;
}

} // namespace envlab
