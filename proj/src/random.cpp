#include "envlab/random.hpp"

#include <Eigen/QR>

namespace envlab {

Vector Rng::random_unit_vector(Index dim) {
    if (dim < 1) throw ValidationError("dimension must be positive");
    Vector v(dim);
    for (Index k = 0; k < dim; ++k) v[k] = gaussian_complex();
    const double norm = v.norm();
    if (norm < 1e-12) return random_unit_vector(dim);
    return v / norm;
}

Matrix Rng::random_unitary(Index dim) {
    if (dim < 1) throw ValidationError("dimension must be positive");
    Matrix g(dim, dim);
    for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c) g(r, c) = gaussian_complex();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the column phases so the distribution is Haar.
    for (Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(k) *= d / mag;
    }
    return q;
}

PureState Rng::random_state(std::vector<std::string> labels, std::vector<Index> dims) {
    const Index total = checked_total_dim(dims);
    return PureState(std::move(labels), std::move(dims), random_unit_vector(total));
}

} // namespace envlab
