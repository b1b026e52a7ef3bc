#pragma once

// Input states, the gate library and the four-qubit linear cluster.

#include "clusterq/tensor_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace clusterq {

/// |psi_in> = cos(alpha)|0> + e^{i beta} sin(alpha)|1>
struct InitialState {
    double alpha = 0.0;
    double beta = 0.0;
};

/// How Z(phi) / X(phi) are written. The two forms differ by the global phase e^{i phi/2}.
enum class RotationForm {
    Phase,        // Z(phi) = diag(1, e^{i phi})
    Exponential,  // Z(phi) = exp(-i phi sigma_z / 2)
};

inline const char* to_string(RotationForm f) {
    return f == RotationForm::Phase ? "phase" : "exponential";
}

enum class GateName { Identity, Hadamard, PauliX, PauliY, PauliZ, RotZ, RotX, CZ };

namespace gates {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix hadamard() {
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::numbers::sqrt2;
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline ComplexMatrix rot_z(double phi, RotationForm form = RotationForm::Phase) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    if (form == RotationForm::Phase) {
        m(0, 0) = 1.0;
        m(1, 1) = std::polar(1.0, phi);
    } else {
        m(0, 0) = std::polar(1.0, -phi / 2);
        m(1, 1) = std::polar(1.0, phi / 2);
    }
    return m;
}

inline ComplexMatrix rot_x(double phi, RotationForm form = RotationForm::Phase) {
    const ComplexMatrix h = hadamard();
    return h * rot_z(phi, form) * h;
}

/// Two-qubit control-phase diag(1, 1, 1, -1).
inline ComplexMatrix cz() {
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
}

}  // namespace gates

inline ComplexMatrix gate(GateName name, double angle = 0.0, RotationForm form = RotationForm::Phase) {
    switch (name) {
        case GateName::Identity: return gates::identity();
        case GateName::Hadamard: return gates::hadamard();
        case GateName::PauliX: return gates::pauli_x();
        case GateName::PauliY: return gates::pauli_y();
        case GateName::PauliZ: return gates::pauli_z();
        case GateName::RotZ: return gates::rot_z(angle, form);
        case GateName::RotX: return gates::rot_x(angle, form);
        case GateName::CZ: return gates::cz();
    }
    throw std::invalid_argument("unknown gate");
}

/// Lifts a k-qubit gate acting on `targets` (1-based, in the gate's own factor order)
/// to the full n-qubit register.
inline ComplexMatrix embed(const ComplexMatrix& g, const std::vector<int>& targets, int n) {
    const auto k = static_cast<int>(targets.size());
    if (k == 0 || g.rows() != (Eigen::Index{1} << k) || g.cols() != g.rows())
        throw std::invalid_argument("embed: gate size does not match target count");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 1 || targets[i] > n)
            throw std::out_of_range("embed: qubit " + std::to_string(targets[i]) + " outside 1.." +
                                    std::to_string(n));
        for (std::size_t j = 0; j < i; ++j)
            if (targets[i] == targets[j]) throw std::invalid_argument("embed: repeated target qubit");
    }

    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::Index target_mask = 0;
    for (int q : targets) target_mask |= Eigen::Index{1} << detail::bit_of(q, n);

    const auto local_index = [&](Eigen::Index full) {
        Eigen::Index idx = 0;
        for (int i = 0; i < k; ++i)
            if ((full >> detail::bit_of(targets[i], n)) & 1) idx |= Eigen::Index{1} << (k - 1 - i);
        return idx;
    };

    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) {
            if ((r & ~target_mask) != (c & ~target_mask)) continue;
            out(r, c) = g(local_index(r), local_index(c));
        }
    return out;
}

inline ComplexVector psi_in(const InitialState& s) {
    ComplexVector v(2);
    v << std::cos(s.alpha), std::polar(std::sin(s.alpha), s.beta);
    return v;
}

inline ComplexVector plus_state() {
    ComplexVector v(2);
    v << 1.0, 1.0;
    return v / std::numbers::sqrt2;
}

/// CZ_34 CZ_23 CZ_12 (|psi_in> (x) |+>^3)
inline ComplexVector cluster_vector(const InitialState& s) {
    const ComplexVector plus = plus_state();
    ComplexVector v = kron({psi_in(s), plus, plus, plus});
    // All CZ are diagonal: one sign flip per adjacent |11> pair.
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        int flips = 0;
        for (int q = 1; q < 4; ++q)
            flips += ((idx >> detail::bit_of(q, 4)) & 1) & ((idx >> detail::bit_of(q + 1, 4)) & 1);
        if (flips % 2) v(idx) = -v(idx);
    }
    return v;
}

inline DensityMatrix build_cluster(const InitialState& s) {
    return DensityMatrix::from_pure(cluster_vector(s));
}

}  // namespace clusterq
