#pragma once

// Negativities over bipartitions, the phase-rotated cluster witness, and ESD search.

#include "clusterq/channels.hpp"
#include "clusterq/states.hpp"
#include "clusterq/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace clusterq {

struct NegativityResult {
    QubitSet subset;
    double value = 0.0;
};

/// Magnitude of the most negative eigenvalue of the partial transpose, clamped at 0.
inline NegativityResult negativity(const DensityMatrix& rho, const QubitSet& subset) {
    const double lo = min_eigenvalue(partial_transpose(rho, subset));
    return {subset, std::max(0.0, -lo)};
}

/// Bipartitions of four qubits up to complement: {1},{2},{3},{4},{1,2},{1,3},{1,4}.
inline std::vector<QubitSet> four_qubit_bipartitions() {
    return {QubitSet{1}, QubitSet{2}, QubitSet{3}, QubitSet{4}, QubitSet{1, 2}, QubitSet{1, 3}, QubitSet{1, 4}};
}

struct WitnessOperator {
    double beta = 0.0;
    ComplexMatrix matrix;
};

/// W_beta = I/2 - R rho_4I(pi/4, 0) R^dag with R = exp(-i beta sigma_z / 2) on qubit 1.
inline WitnessOperator witness_operator(double beta) {
    const ComplexMatrix ref = build_cluster({std::numbers::pi / 4, 0.0}).matrix();
    const ComplexMatrix r = embed(gates::rot_z(beta, RotationForm::Exponential), {1}, 4);
    ComplexMatrix w = 0.5 * ComplexMatrix::Identity(16, 16) - r * ref * r.adjoint();
    w = 0.5 * (w + w.adjoint());
    return {beta, std::move(w)};
}

inline double witness_expectation(const DensityMatrix& rho, const WitnessOperator& w) {
    if (rho.qubit_count() != 4) throw std::invalid_argument("witness needs a four-qubit state");
    return (w.matrix * rho.matrix()).trace().real();
}

inline double witness_expectation(const DensityMatrix& rho, double beta) {
    return witness_expectation(rho, witness_operator(beta));
}

/// rho_4F(alpha, beta, p) = sum_m A_m rho_4I A_m^dag
inline DensityMatrix noisy_cluster(ChannelKind kind, double p, const InitialState& s) {
    return apply_channel(build_cluster(s), four_qubit_channel(kind, p));
}

namespace detail {

// Smallest p in [lo, hi] with dead(p) true, assuming dead is monotone and dead(hi) holds.
inline double bisect_onset(const std::function<bool(double)>& dead, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (dead(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace detail

inline constexpr double kVanishingNegativity = 1e-12;
inline constexpr double kEsdBracketTop = 1.0 - 1e-9;
/// Power-law decay toward p = 1 drops any negativity under kVanishingNegativity a little
/// before the end of the bracket; death that close to full decay counts as asymptotic.
inline constexpr double kAsymptoticMargin = 1e-3;

/// Smallest noise strength at which the negativity over `subset` vanishes.
/// Returns nullopt for asymptotic decay: the negativity is still positive at the top of the
/// bracket, or only vanishes within kAsymptoticMargin of p = 1.
/// Throws std::domain_error when the state has no negativity to lose at p = 0.
inline std::optional<double> esd_threshold(ChannelKind kind, const QubitSet& subset, const InitialState& s,
                                           double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("esd_threshold: tol must be positive");
    const auto value = [&](double p) { return negativity(noisy_cluster(kind, p, s), subset).value; };
    if (value(0.0) <= kVanishingNegativity)
        throw std::domain_error("no negativity over " + subset.str() + " at p=0");
    const auto dead = [&](double p) { return value(p) <= kVanishingNegativity; };
    const double top = std::min(kEsdBracketTop, 1.0 - tol);
    if (!dead(top)) return std::nullopt;
    const double onset = detail::bisect_onset(dead, 0.0, top, tol);
    if (onset > 1.0 - kAsymptoticMargin) return std::nullopt;
    return onset;
}

/// Smallest p at which Tr[W_witness_beta rho_4F] becomes nonnegative. nullopt when the
/// witness does not detect the noiseless state, or never stops detecting up to p = 1.
inline std::optional<double> witness_crossing(ChannelKind kind, const InitialState& s, double witness_beta,
                                              double tol) {
    const WitnessOperator w = witness_operator(witness_beta);
    const auto value = [&](double p) { return witness_expectation(noisy_cluster(kind, p, s), w); };
    if (value(0.0) >= 0.0) return std::nullopt;
    const auto gone = [&](double p) { return value(p) >= 0.0; };
    if (!gone(1.0)) return std::nullopt;
    return detail::bisect_onset(gone, 0.0, 1.0, tol);
}

}  // namespace clusterq
