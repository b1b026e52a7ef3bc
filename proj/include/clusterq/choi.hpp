#pragma once

// Choi matrix of a logical superoperator and its ranked Kraus decomposition.

#include "clusterq/logical.hpp"
#include "clusterq/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clusterq {

struct ChoiDecomposition {
    ComplexMatrix choi;
    std::vector<double> eigenvalues;   // descending, clamped at 0
    std::vector<ComplexMatrix> kraus;  // K_a = sqrt(lambda_a) unvec(v_a)
    std::vector<double> amplitudes;    // A_a = sqrt(lambda_a / N)

    int dim() const { return static_cast<int>(kraus.empty() ? 0 : kraus.front().rows()); }

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto& k : kraus) out += k * rho * k.adjoint();
        return out;
    }
};

/// C[(i,j),(k,l)] = S[(i,k),(j,l)], consistent with row-major vectorization.
inline ComplexMatrix choi_from_superoperator(const ComplexMatrix& s) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    if (n * n != s.rows() || s.cols() != s.rows())
        throw std::invalid_argument("superoperator must be N^2 x N^2");
    ComplexMatrix c(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l < n; ++l) c(i * n + j, k * n + l) = s(i * n + k, j * n + l);
    return c;
}

inline ComplexMatrix choi_from_superoperator(const Superoperator& s) { return choi_from_superoperator(s.matrix); }

inline constexpr double kNotCompletelyPositive = -1e-8;
inline constexpr double kDegenerateEigenvalues = 1e-9;

namespace detail {

// Replaces an eigenspace basis with the Gram-Schmidt image of the computational basis
// vectors that project most strongly onto it, so degenerate clusters come out canonical.
inline ComplexMatrix canonical_eigenspace_basis(const ComplexMatrix& basis) {
    const Eigen::Index d = basis.rows(), k = basis.cols();
    const ComplexMatrix proj = basis * basis.adjoint();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return proj.col(a).norm() > proj.col(b).norm() + 1e-12;
    });
    ComplexMatrix out(d, k);
    Eigen::Index filled = 0;
    for (Eigen::Index idx : order) {
        if (filled == k) break;
        ComplexVector v = proj.col(idx);
        for (Eigen::Index j = 0; j < filled; ++j) v -= out.col(j).dot(v) * out.col(j);
        const double norm = v.norm();
        if (norm < 1e-6) continue;
        out.col(filled++) = v / norm;
    }
    if (filled < k) return basis;
    return out;
}

inline ComplexMatrix fix_phase(const ComplexMatrix& k, const std::optional<ComplexMatrix>& reference) {
    if (reference) {
        const Complex overlap = (reference->adjoint() * k).trace();
        if (std::abs(overlap) > 1e-12) return k * (std::conj(overlap) / std::abs(overlap));
    }
    Eigen::Index r = 0, c = 0;
    k.cwiseAbs().maxCoeff(&r, &c);
    const Complex lead = k(r, c);
    return std::abs(lead) > 0.0 ? ComplexMatrix(k * (std::conj(lead) / std::abs(lead))) : k;
}

}  // namespace detail

/// Eigen-decomposes the Choi matrix into Kraus operators ranked by amplitude. Each K_a is
/// phase-fixed so Tr[U^dag K_a] is real and nonnegative for the reference unitary U; when
/// no reference is given (or the overlap vanishes) its largest entry is made real positive.
/// Throws std::domain_error when an eigenvalue is below -1e-8 (map not completely positive).
inline ChoiDecomposition kraus_from_choi(const ComplexMatrix& choi,
                                         const std::optional<ComplexMatrix>& reference = std::nullopt) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(choi.rows()))));
    const Eigensystem es = hermitian_eigensystem(choi);
    const Eigen::Index d = choi.rows();

    std::vector<double> values(static_cast<std::size_t>(d));
    ComplexMatrix vectors(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        values[static_cast<std::size_t>(a)] = es.values(d - 1 - a);
        vectors.col(a) = es.vectors.col(d - 1 - a);
    }

    for (Eigen::Index start = 0; start < d;) {
        Eigen::Index end = start + 1;
        while (end < d && values[static_cast<std::size_t>(start)] - values[static_cast<std::size_t>(end)] <
                              kDegenerateEigenvalues)
            ++end;
        if (end - start > 1)
            vectors.middleCols(start, end - start) =
                detail::canonical_eigenspace_basis(vectors.middleCols(start, end - start));
        start = end;
    }

    ChoiDecomposition out;
    out.choi = choi;
    for (Eigen::Index a = 0; a < d; ++a) {
        double lambda = values[static_cast<std::size_t>(a)];
        if (lambda < kNotCompletelyPositive)
            throw std::domain_error("Choi eigenvalue " + std::to_string(lambda) + ": map is not completely positive");
        lambda = std::max(lambda, 0.0);
        out.eigenvalues.push_back(lambda);
        out.amplitudes.push_back(std::sqrt(lambda / static_cast<double>(n)));
        out.kraus.push_back(detail::fix_phase(std::sqrt(lambda) * unvec_row_major(vectors.col(a)), reference));
    }
    return out;
}

inline ChoiDecomposition decompose(const Superoperator& s, const std::optional<ComplexMatrix>& reference = std::nullopt) {
    return kraus_from_choi(choi_from_superoperator(s), reference);
}

/// |Tr[U^dag K_1]| / Tr[U^dag U]; the modulus is the phase-fixed value.
inline double first_kraus_fidelity(const ChoiDecomposition& d, const ComplexMatrix& u) {
    return std::abs((u.adjoint() * d.kraus.at(0)).trace()) / (u.adjoint() * u).trace().real();
}

/// |Tr[U^dag K_1]| / sqrt(Tr[U^dag U] Tr[K_1^dag K_1])
inline double first_kraus_correlation(const ChoiDecomposition& d, const ComplexMatrix& u) {
    const ComplexMatrix& k1 = d.kraus.at(0);
    const double kk = (k1.adjoint() * k1).trace().real();
    if (kk < 1e-24) throw std::domain_error("first Kraus operator is numerically zero");
    return std::abs((u.adjoint() * k1).trace()) / std::sqrt((u.adjoint() * u).trace().real() * kk);
}

}  // namespace clusterq
