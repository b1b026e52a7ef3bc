#pragma once

// Dense complex matrices, row-major vectorization and qubit-index bookkeeping.
//
// Qubits are numbered 1..n in every public interface. Qubit 1 is the leftmost
// tensor factor, i.e. the most significant bit of a computational-basis index.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace clusterq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsdSlack = -1e-10;
inline constexpr double kOracle = 1e-9;
inline constexpr double kEigenInput = 1e-10;
}  // namespace tol

/// Sorted, duplicate-free set of 1-based qubit indices.
class QubitSet {
public:
    QubitSet() = default;
    QubitSet(std::initializer_list<int> qubits) : QubitSet(std::vector<int>(qubits)) {}
    explicit QubitSet(std::vector<int> qubits) : qubits_(std::move(qubits)) {
        std::sort(qubits_.begin(), qubits_.end());
        qubits_.erase(std::unique(qubits_.begin(), qubits_.end()), qubits_.end());
    }

    const std::vector<int>& indices() const { return qubits_; }
    std::size_t size() const { return qubits_.size(); }
    bool empty() const { return qubits_.empty(); }
    bool contains(int q) const { return std::binary_search(qubits_.begin(), qubits_.end(), q); }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < qubits_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(qubits_[i]);
        }
        return s + "}";
    }

    friend bool operator==(const QubitSet&, const QubitSet&) = default;

private:
    std::vector<int> qubits_;
};

namespace detail {

inline int qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim || n == 0)
        throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
    return n;
}

// Bit position (from the least significant end) of 1-based qubit q among n.
inline int bit_of(int q, int n) { return n - q; }

inline void require_proper_subset(const QubitSet& subset, int n) {
    if (subset.empty())
        throw std::invalid_argument("qubit subset must be nonempty");
    for (int q : subset.indices())
        if (q < 1 || q > n)
            throw std::out_of_range("qubit index " + std::to_string(q) + " outside 1.." +
                                    std::to_string(n));
    if (static_cast<int>(subset.size()) == n)
        throw std::invalid_argument("qubit subset " + subset.str() + " covers every qubit");
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

inline double hermiticity_residual(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return detail::max_abs(m - m.adjoint());
}

inline bool all_finite(const ComplexMatrix& m) {
    return m.unaryExpr([](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); })
        .all();
}

struct Eigensystem {
    RealVector values;     // ascending
    ComplexMatrix vectors;  // orthonormal columns, vectors.col(k) pairs with values(k)
};

inline Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("eigensystem of a non-square matrix");
    const double res = hermiticity_residual(m);
    if (res > tol::kEigenInput)
        throw std::invalid_argument("matrix is not Hermitian (residual " + std::to_string(res) + ")");
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const ComplexMatrix& m) {
    return hermitian_eigensystem(m).values(0);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

/// Stacks rows top to bottom. With this ordering vec(A X B) = (A (x) B^T) vec(X).
inline ComplexVector vec_row_major(const ComplexMatrix& m) {
    ComplexVector v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

inline ComplexMatrix unvec_row_major(const ComplexVector& v) {
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (side * side != v.size())
        throw std::invalid_argument("unvec: length " + std::to_string(v.size()) + " is not a perfect square");
    ComplexMatrix m(side, side);
    for (Eigen::Index i = 0; i < side; ++i)
        for (Eigen::Index j = 0; j < side; ++j) m(i, j) = v(i * side + j);
    return m;
}

/// Transposes the row/column indices of the qubits in `subset`, leaving the rest alone.
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, const QubitSet& subset) {
    const int n = detail::qubits_for_dim(rho.rows());
    if (rho.cols() != rho.rows()) throw std::invalid_argument("partial_transpose: matrix not square");
    detail::require_proper_subset(subset, n);
    Eigen::Index mask = 0;
    for (int q : subset.indices()) mask |= Eigen::Index{1} << detail::bit_of(q, n);
    ComplexMatrix out(rho.rows(), rho.cols());
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            const Eigen::Index swapped = (r ^ c) & mask;
            out(r ^ swapped, c ^ swapped) = rho(r, c);
        }
    return out;
}

/// Validated density matrix on `qubit_count()` qubits.
class DensityMatrix {
public:
    /// Throws std::invalid_argument unless m is Hermitian, unit-trace and PSD.
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        n_ = detail::qubits_for_dim(m_.rows());
        if (m_.cols() != m_.rows()) throw std::invalid_argument("density matrix must be square");
        if (!all_finite(m_)) throw std::invalid_argument("density matrix has non-finite entries");
        const double herm = hermiticity_residual(m_);
        if (herm > tol::kHermitian)
            throw std::invalid_argument("density matrix not Hermitian (residual " + std::to_string(herm) + ")");
        const double tr_err = std::abs(m_.trace() - Complex{1.0, 0.0});
        if (tr_err > tol::kTrace)
            throw std::invalid_argument("density matrix trace differs from 1 by " + std::to_string(tr_err));
        const double lo = min_eigenvalue(m_);
        if (lo < tol::kPsdSlack)
            throw std::invalid_argument("density matrix has negative eigenvalue " + std::to_string(lo));
    }

    static DensityMatrix from_pure(const ComplexVector& psi) {
        const double norm = psi.norm();
        if (norm == 0.0) throw std::invalid_argument("zero state vector");
        const ComplexVector u = psi / norm;
        return DensityMatrix(u * u.adjoint());
    }

    static DensityMatrix maximally_mixed(int qubits) {
        const Eigen::Index d = Eigen::Index{1} << qubits;
        return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
    }

    const ComplexMatrix& matrix() const { return m_; }
    int qubit_count() const { return n_; }
    Eigen::Index dim() const { return m_.rows(); }
    double purity() const { return (m_ * m_).trace().real(); }

private:
    ComplexMatrix m_;
    int n_ = 0;
};

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, const QubitSet& subset) {
    return partial_transpose(rho.matrix(), subset);
}

/// Partial trace over the qubits in `subset`; the survivors keep their relative order.
inline DensityMatrix trace_out(const DensityMatrix& rho, const QubitSet& subset) {
    const int n = rho.qubit_count();
    detail::require_proper_subset(subset, n);
    std::vector<int> kept_bits, traced_bits;
    for (int q = 1; q <= n; ++q)
        (subset.contains(q) ? traced_bits : kept_bits).push_back(detail::bit_of(q, n));

    const auto compose = [](Eigen::Index bits, const std::vector<int>& positions) {
        Eigen::Index idx = 0;
        for (std::size_t k = 0; k < positions.size(); ++k)
            if ((bits >> (positions.size() - 1 - k)) & 1) idx |= Eigen::Index{1} << positions[k];
        return idx;
    };

    const Eigen::Index kept_dim = Eigen::Index{1} << kept_bits.size();
    const Eigen::Index traced_dim = Eigen::Index{1} << traced_bits.size();
    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (Eigen::Index a = 0; a < kept_dim; ++a)
        for (Eigen::Index b = 0; b < kept_dim; ++b) {
            Complex acc{0.0, 0.0};
            const Eigen::Index ra = compose(a, kept_bits), rb = compose(b, kept_bits);
            for (Eigen::Index t = 0; t < traced_dim; ++t) {
                const Eigen::Index rt = compose(t, traced_bits);
                acc += rho.matrix()(ra | rt, rb | rt);
            }
            out(a, b) = acc;
        }
    return DensityMatrix(std::move(out));
}

}  // namespace clusterq
