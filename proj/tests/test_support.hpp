#pragma once

#include "clusterq/tensor_core.hpp"

#include <random>

namespace clusterq::testing {

inline ComplexMatrix random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index d) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(rng, d, d));
    return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
    const ComplexMatrix g = random_gaussian(rng, d, d);
    return 0.5 * (g + g.adjoint());
}

/// Full-rank mixed state from the Ginibre ensemble.
inline DensityMatrix random_density(std::mt19937_64& rng, int qubits) {
    const Eigen::Index d = Eigen::Index{1} << qubits;
    const ComplexMatrix g = random_gaussian(rng, d, d);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

inline ComplexVector random_ket(std::mt19937_64& rng, Eigen::Index d) {
    ComplexVector v = random_gaussian(rng, d, 1);
    return v / v.norm();
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace clusterq::testing
