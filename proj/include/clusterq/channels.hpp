#pragma once

// Single-qubit noise models, their equal-strength four-qubit lift, and channel action.

#include "clusterq/states.hpp"
#include "clusterq/tensor_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clusterq {

enum class ChannelKind { Dephasing, AmplitudeDamping, Depolarizing };

inline constexpr ChannelKind kAllChannels[] = {ChannelKind::Dephasing, ChannelKind::AmplitudeDamping,
                                               ChannelKind::Depolarizing};

/// CLI spelling: "dephasing" | "amp" | "depol".
inline const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::Dephasing: return "dephasing";
        case ChannelKind::AmplitudeDamping: return "amp";
        case ChannelKind::Depolarizing: return "depol";
    }
    return "?";
}

inline ChannelKind parse_channel_kind(std::string_view s) {
    if (s == "dephasing") return ChannelKind::Dephasing;
    if (s == "amp") return ChannelKind::AmplitudeDamping;
    if (s == "depol") return ChannelKind::Depolarizing;
    throw std::invalid_argument("unknown channel '" + std::string(s) + "' (expected dephasing|amp|depol)");
}

class KrausChannel {
public:
    KrausChannel(ChannelKind kind, double strength, int qubits, std::vector<ComplexMatrix> operators,
                 std::vector<ComplexMatrix> local_factors = {})
        : kind_(kind), strength_(strength), qubits_(qubits), ops_(std::move(operators)),
          local_(std::move(local_factors)) {}

    ChannelKind kind() const { return kind_; }
    double strength() const { return strength_; }
    int qubit_count() const { return qubits_; }
    const std::vector<ComplexMatrix>& operators() const { return ops_; }

    /// Nonempty when every operator is a tensor product of these single-qubit factors
    /// applied identically to each qubit.
    const std::vector<ComplexMatrix>& local_factors() const { return local_; }
    bool is_product() const { return !local_.empty() && qubits_ > 1; }

private:
    ChannelKind kind_;
    double strength_;
    int qubits_;
    std::vector<ComplexMatrix> ops_;
    std::vector<ComplexMatrix> local_;
};

inline KrausChannel single_qubit_kraus(ChannelKind kind, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("channel strength p=" + std::to_string(p) + " outside [0,1]");
    std::vector<ComplexMatrix> ops;
    switch (kind) {
        case ChannelKind::Dephasing: {
            ComplexMatrix k1 = ComplexMatrix::Zero(2, 2), k2 = ComplexMatrix::Zero(2, 2);
            k1(0, 0) = 1.0;
            k1(1, 1) = std::sqrt(1.0 - p);
            k2(1, 1) = std::sqrt(p);
            ops = {k1, k2};
            break;
        }
        case ChannelKind::AmplitudeDamping: {
            ComplexMatrix k1 = ComplexMatrix::Zero(2, 2), k2 = ComplexMatrix::Zero(2, 2);
            k1(0, 0) = 1.0;
            k1(1, 1) = std::sqrt(1.0 - p);
            k2(0, 1) = std::sqrt(p);
            ops = {k1, k2};
            break;
        }
        case ChannelKind::Depolarizing: {
            const double s = std::sqrt(p) / 2.0;
            ops = {std::sqrt(1.0 - 0.75 * p) * gates::identity(), s * gates::pauli_x(), s * gates::pauli_y(),
                   s * gates::pauli_z()};
            break;
        }
    }
    return KrausChannel(kind, p, 1, ops);
}

/// A_m = K_i (x) K_j (x) K_k (x) K_l, qubit 1 leftmost, operator index with qubit 1 slowest.
inline KrausChannel lift_to_four_qubits(const KrausChannel& c) {
    if (c.qubit_count() != 1) throw std::invalid_argument("channel is already lifted");
    const auto& k = c.operators();
    std::vector<ComplexMatrix> ops;
    ops.reserve(k.size() * k.size() * k.size() * k.size());
    for (const auto& a : k)
        for (const auto& b : k)
            for (const auto& d : k)
                for (const auto& e : k) ops.push_back(kron({a, b, d, e}));
    return KrausChannel(c.kind(), c.strength(), 4, std::move(ops), k);
}

inline KrausChannel four_qubit_channel(ChannelKind kind, double p) {
    return lift_to_four_qubits(single_qubit_kraus(kind, p));
}

/// max |sum K^dag K - I|
inline double completeness_residual(const KrausChannel& c) {
    const auto d = c.operators().front().cols();
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (const auto& k : c.operators()) acc += k.adjoint() * k;
    return detail::max_abs(acc - ComplexMatrix::Identity(d, d));
}

/// Choi matrix sum_K vec(K) vec(K)^dag (row-major vec) of an arbitrary Kraus set.
inline ComplexMatrix kraus_choi_matrix(const KrausChannel& c) {
    const auto d = c.operators().front().rows();
    ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
    for (const auto& k : c.operators()) {
        const ComplexVector v = vec_row_major(k);
        out += v * v.adjoint();
    }
    return out;
}

namespace detail {

inline ComplexMatrix sum_kraus(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& ops) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ops) out.noalias() += k * rho * k.adjoint();
    return out;
}

// Applies the same single-qubit Kraus set to qubit q of an n-qubit matrix.
inline ComplexMatrix apply_local(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& ops, int q, int n) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ops) {
        const ComplexMatrix full = embed(k, {q}, n);
        out.noalias() += full * rho * full.adjoint();
    }
    return out;
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace detail

/// sum_m A_m rho A_m^dag, evaluated through the generic operator sum.
inline DensityMatrix apply_channel_direct(const DensityMatrix& rho, const KrausChannel& c) {
    if (c.operators().front().cols() != rho.dim())
        throw std::invalid_argument("apply_channel: channel acts on dimension " +
                                    std::to_string(c.operators().front().cols()) + ", state has " +
                                    std::to_string(rho.dim()));
    return DensityMatrix(detail::hermitize(detail::sum_kraus(rho.matrix(), c.operators())));
}

/// sum_m A_m rho A_m^dag. Product channels are applied one qubit at a time, which is
/// the same map.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& c) {
    if (!c.is_product()) return apply_channel_direct(rho, c);
    if (rho.qubit_count() != c.qubit_count())
        throw std::invalid_argument("apply_channel: channel acts on " + std::to_string(c.qubit_count()) +
                                    " qubits, state has " + std::to_string(rho.qubit_count()));
    ComplexMatrix m = rho.matrix();
    for (int q = 1; q <= c.qubit_count(); ++q) m = detail::apply_local(m, c.local_factors(), q, c.qubit_count());
    return DensityMatrix(detail::hermitize(m));
}

}  // namespace clusterq
