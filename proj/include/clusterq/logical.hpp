#pragma once

// The logical qubit: measurement chain on qubits 1-3, process tomography of the
// resulting one-qubit map, closed-form superoperators and fidelities, Haar sampling,
// and the calibration of the unstated rotation and measurement conventions.

#include "clusterq/channels.hpp"
#include "clusterq/entanglement.hpp"
#include "clusterq/states.hpp"
#include "clusterq/tensor_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace clusterq {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
    if (!std::isfinite(a)) throw std::invalid_argument("rotation angle is not finite");
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

/// Euler angles of the target logical rotation, each wrapped into [0, 2 pi).
class RotationSpec {
public:
    RotationSpec() = default;
    RotationSpec(double theta1, double theta2, double theta3)
        : t_{wrap_angle(theta1), wrap_angle(theta2), wrap_angle(theta3)} {}

    double theta1() const { return t_[0]; }
    double theta2() const { return t_[1]; }
    double theta3() const { return t_[2]; }
    /// 0-based access: operator[](0) is theta1.
    double operator[](std::size_t i) const { return t_.at(i); }

    bool same_as(const RotationSpec& o, double eps = 1e-12) const {
        for (std::size_t i = 0; i < 3; ++i) {
            const double d = std::abs(t_[i] - o.t_[i]);
            if (std::min(d, kTwoPi - d) > eps) return false;
        }
        return true;
    }

private:
    std::array<double, 3> t_{0.0, 0.0, 0.0};
};

// ---------------------------------------------------------------------------
// Conventions

/// Which Euler angle drives which measured qubit, and which outcome is kept.
/// Qubit k+1 is measured in the x-y plane at angle sign * theta[source[k]], and the
/// post-selected projector is the `outcome` eigenstate of cos(phi) X + sin(phi) Y.
struct MeasurementMap {
    std::array<int, 3> source{0, 1, 2};
    int sign = 1;
    int outcome = -1;

    friend bool operator==(const MeasurementMap&, const MeasurementMap&) = default;
};

/// U = F . H . Z(s0 theta[slot0]) . X(s1 theta[slot1]) . Z(s2 theta[slot2]).
/// The default-constructed value is the literal H Z(theta1) X(theta2) Z(theta3).
struct IdealConvention {
    RotationForm form = RotationForm::Phase;
    std::array<int, 3> slots{0, 1, 2};
    std::array<int, 3> signs{1, 1, 1};
    char frame = 'I';

    friend bool operator==(const IdealConvention&, const IdealConvention&) = default;
};

struct ConventionCalibration {
    MeasurementMap measurement;
    IdealConvention ideal;

    std::string tag() const {
        const auto angle = [](int sign, int src) {
            return std::string(sign < 0 ? "-" : "+") + "t" + std::to_string(src + 1);
        };
        std::string s = "meas[";
        for (int k = 0; k < 3; ++k) s += (k ? "," : "") + angle(measurement.sign, measurement.source[k]);
        s += "] m0=" + std::string(measurement.outcome < 0 ? "-1" : "+1");
        s += "; U=" + std::string(1, ideal.frame) + ".H.Z(" + angle(ideal.signs[0], ideal.slots[0]) + ").X(" +
             angle(ideal.signs[1], ideal.slots[1]) + ").Z(" + angle(ideal.signs[2], ideal.slots[2]) + "); " +
             to_string(ideal.form);
        return s;
    }

    friend bool operator==(const ConventionCalibration&, const ConventionCalibration&) = default;
};

/// The winner of calibrate_conventions(), frozen.
inline ConventionCalibration default_calibration() {
    ConventionCalibration c;
    c.measurement = MeasurementMap{{0, 1, 2}, 1, -1};
    c.ideal = IdealConvention{RotationForm::Phase, {2, 1, 0}, {1, 1, -1}, 'Z'};
    return c;
}

inline ComplexMatrix pauli(char which) {
    switch (which) {
        case 'I': return gates::identity();
        case 'X': return gates::pauli_x();
        case 'Y': return gates::pauli_y();
        case 'Z': return gates::pauli_z();
    }
    throw std::invalid_argument(std::string("unknown Pauli '") + which + "'");
}

inline ComplexMatrix ideal_unitary(const RotationSpec& r, const IdealConvention& c) {
    const auto angle = [&](int slot) { return c.signs[slot] * r[c.slots[slot]]; };
    return pauli(c.frame) * gates::hadamard() * gates::rot_z(angle(0), c.form) * gates::rot_x(angle(1), c.form) *
           gates::rot_z(angle(2), c.form);
}

inline ComplexMatrix ideal_unitary(const RotationSpec& r, const ConventionCalibration& calib = default_calibration()) {
    return ideal_unitary(r, calib.ideal);
}

// ---------------------------------------------------------------------------
// Superoperators

struct Superoperator {
    ComplexMatrix matrix;                // 4x4, acts on row-major vec(rho)
    std::optional<ChannelKind> channel;  // nullopt: ideal (noiseless) map
    double p = 0.0;
    RotationSpec rotation;
    std::string convention;
    std::string source;  // "reconstructed" | "closed-form" | "ideal"
};

inline ComplexMatrix apply_superoperator(const ComplexMatrix& s, const ComplexMatrix& rho) {
    return unvec_row_major(s * vec_row_major(rho));
}

/// Ideal map U (x) conj(U) for the calibrated composition of the target rotation.
inline Superoperator ideal_superoperator(const RotationSpec& r,
                                         const ConventionCalibration& calib = default_calibration()) {
    const ComplexMatrix u = ideal_unitary(r, calib);
    return {kron(u, u.conjugate()), std::nullopt, 0.0, r, calib.tag(), "ideal"};
}

struct ChainResult {
    DensityMatrix state;   // qubit 4
    double probability;    // of the post-selected branch
};

inline constexpr double kMinBranchProbability = 1e-14;

inline ComplexMatrix measurement_projector(double phi, int outcome) {
    ComplexVector b(2);
    b << 1.0, static_cast<double>(outcome) * std::polar(1.0, phi);
    b /= std::numbers::sqrt2;
    return b * b.adjoint();
}

inline std::array<double, 3> measurement_angles(const RotationSpec& r, const MeasurementMap& m) {
    return {m.sign * r[m.source[0]], m.sign * r[m.source[1]], m.sign * r[m.source[2]]};
}

/// Projects qubits 1, 2, 3 in turn onto the kept outcome, traces them out and
/// renormalizes. Throws std::domain_error when the branch has (numerically) zero weight.
inline ChainResult measure_chain_detailed(const DensityMatrix& rho4, const RotationSpec& r,
                                          const ConventionCalibration& calib = default_calibration()) {
    if (rho4.qubit_count() != 4) throw std::invalid_argument("measure_chain needs a four-qubit state");
    const auto angles = measurement_angles(r, calib.measurement);
    ComplexMatrix m = rho4.matrix();
    for (int q = 1; q <= 3; ++q) {
        const ComplexMatrix proj = embed(measurement_projector(angles[q - 1], calib.measurement.outcome), {q}, 4);
        m = proj * m * proj;
    }
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (Eigen::Index rest = 0; rest < 8; ++rest)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out(a, b) += m(rest * 2 + a, rest * 2 + b);
    const double prob = out.trace().real();
    if (!(prob >= kMinBranchProbability))
        throw std::domain_error("post-selected branch has probability " + std::to_string(prob));
    out /= prob;
    return {DensityMatrix(0.5 * (out + out.adjoint())), prob};
}

inline DensityMatrix measure_chain(const DensityMatrix& rho4, const RotationSpec& r,
                                   const ConventionCalibration& calib = default_calibration()) {
    return measure_chain_detailed(rho4, r, calib).state;
}

/// |0>, |1>, |+>, |+i>
inline std::array<InitialState, 4> tomography_inputs() {
    constexpr double pi = std::numbers::pi;
    return {InitialState{0.0, 0.0}, InitialState{pi / 2, 0.0}, InitialState{pi / 4, 0.0},
            InitialState{pi / 4, pi / 2}};
}

/// The four tomography inputs encoded into clusters and decohered.
inline std::array<DensityMatrix, 4> noisy_tomography_clusters(ChannelKind kind, double p) {
    const auto ch = four_qubit_channel(kind, p);
    const auto in = tomography_inputs();
    return {apply_channel(build_cluster(in[0]), ch), apply_channel(build_cluster(in[1]), ch),
            apply_channel(build_cluster(in[2]), ch), apply_channel(build_cluster(in[3]), ch)};
}

struct Tomography {
    Superoperator superop;
    std::array<double, 4> branch_probabilities{};

    double probability_spread() const {
        const auto [lo, hi] = std::minmax_element(branch_probabilities.begin(), branch_probabilities.end());
        return *hi - *lo;
    }
};

/// Solves S . vec(rho_in_k) = vec(rho_out_k) over the four tomography inputs.
inline Tomography reconstruct_from_clusters(const std::array<DensityMatrix, 4>& noisy, ChannelKind kind, double p,
                                            const RotationSpec& r,
                                            const ConventionCalibration& calib = default_calibration()) {
    const auto in = tomography_inputs();
    ComplexMatrix inputs(4, 4), outputs(4, 4);
    Tomography t;
    for (int k = 0; k < 4; ++k) {
        const ComplexVector psi = psi_in(in[k]);
        inputs.col(k) = vec_row_major(psi * psi.adjoint());
        const ChainResult res = measure_chain_detailed(noisy[k], r, calib);
        outputs.col(k) = vec_row_major(res.state.matrix());
        t.branch_probabilities[k] = res.probability;
    }
    Eigen::FullPivLU<ComplexMatrix> lu(inputs);
    if (lu.rank() < 4) throw std::runtime_error("tomography inputs do not span the operator space");
    t.superop = {outputs * lu.inverse(), kind, p, r, calib.tag(), "reconstructed"};
    return t;
}

inline Tomography reconstruct_tomography(ChannelKind kind, double p, const RotationSpec& r,
                                         const ConventionCalibration& calib = default_calibration()) {
    return reconstruct_from_clusters(noisy_tomography_clusters(kind, p), kind, p, r, calib);
}

inline Superoperator reconstruct_superoperator(ChannelKind kind, double p, const RotationSpec& r,
                                               const ConventionCalibration& calib = default_calibration()) {
    return reconstruct_tomography(kind, p, r, calib).superop;
}

// ---------------------------------------------------------------------------
// Closed forms. q = p - 1, pt = sqrt(1 - p), sj / cj = sin / cos theta_j.

/// How to read the two S_P entries printed with e^{-i theta1} in column 2.
enum class PhaseReading { AsPrinted, PairedColumns };

/// (row, col), 0-based, of the S_P entries whose printed phase breaks the column pattern.
inline constexpr std::array<std::pair<int, int>, 2> kDepolarizingSuspectEntries{{{0, 1}, {3, 1}}};

namespace detail {

struct Trig {
    double s2, s3, c2, c3;
    Complex e, ei;  // e^{+i theta1}, e^{-i theta1}
    explicit Trig(const RotationSpec& r)
        : s2(std::sin(r.theta2())), s3(std::sin(r.theta3())), c2(std::cos(r.theta2())), c3(std::cos(r.theta3())),
          e(std::polar(1.0, r.theta1())), ei(std::polar(1.0, -r.theta1())) {}
};

inline void require_strength(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p=" + std::to_string(p) + " outside [0,1]");
}

}  // namespace detail

inline ComplexMatrix dephasing_closed_form(double p, const RotationSpec& r) {
    detail::require_strength(p);
    const double q = p - 1, pt = std::sqrt(1 - p);
    const detail::Trig t(r);
    const Complex i{0, 1};
    ComplexMatrix s(4, 4);
    s << (1 - q * t.s2 * t.s3), -t.e * q * (t.c3 - i * pt * t.c2 * t.s3), -t.ei * q * (t.c3 + i * pt * t.c2 * t.s3),
        (1 + q * t.s2 * t.s3),
        q * (t.c2 - i * pt * t.c3 * t.s2), t.e * q * (q * t.c2 * t.c3 + i * pt * (t.s2 + t.s3)),
        -t.ei * q * (q * t.c2 * t.c3 + i * pt * (t.s2 - t.s3)), -q * (t.c2 - i * pt * t.c3 * t.s2),
        q * (t.c2 + i * pt * t.c3 * t.s2), -t.e * q * (q * t.c2 * t.c3 - i * pt * (t.s2 - t.s3)),
        t.ei * q * (q * t.c2 * t.c3 - i * pt * (t.s2 + t.s3)), -q * (t.c2 + i * pt * t.c3 * t.s2),
        (1 + q * t.s2 * t.s3), t.e * q * (t.c3 - i * pt * t.c2 * t.s3), t.ei * q * (t.c3 + i * pt * t.c2 * t.s3),
        (1 - q * t.s2 * t.s3);
    return 0.5 * s;
}

inline ComplexMatrix amplitude_damping_closed_form(double p, const RotationSpec& r) {
    detail::require_strength(p);
    const double q = p - 1, pt = std::sqrt(1 - p);
    const detail::Trig t(r);
    const Complex i{0, 1};
    ComplexMatrix s(4, 4);
    s << (1 + p) + q * q * t.s2 * t.s3, t.e * q * q * (t.c3 - i * pt * t.c2 * t.s3),
        t.ei * q * q * (t.c3 + i * pt * t.c2 * t.s3), (1 + p) - q * q * t.s2 * t.s3,
        q * (t.c2 - i * pt * t.c3 * t.s2), t.e * q * (q * t.c2 * t.c3 + i * pt * (t.s2 + t.s3)),
        -t.ei * q * (q * t.c2 * t.c3 + i * pt * (t.s2 - t.s3)), -q * (t.c2 - i * pt * t.c3 * t.s2),
        q * (t.c2 + i * pt * t.c3 * t.s2), -t.e * q * (q * t.c2 * t.c3 - i * pt * (t.s2 - t.s3)),
        t.ei * q * (q * t.c2 * t.c3 - i * pt * (t.s2 + t.s3)), -q * (t.c2 + i * pt * t.c3 * t.s2),
        -q * (1 + q * t.s2 * t.s3), -t.e * q * q * (t.c3 - i * pt * t.c2 * t.s3),
        -t.ei * q * q * (t.c3 + i * pt * t.c2 * t.s3), -q * (1 - q * t.s2 * t.s3);
    return 0.5 * s;
}

inline ComplexMatrix depolarizing_closed_form(double p, const RotationSpec& r,
                                              PhaseReading reading = PhaseReading::AsPrinted) {
    detail::require_strength(p);
    const double q = p - 1, q2 = q * q, q3 = q2 * q;
    const detail::Trig t(r);
    const Complex i{0, 1};
    const Complex col2 = reading == PhaseReading::AsPrinted ? t.ei : t.e;
    ComplexMatrix s(4, 4);
    s << 1 - q3 * t.s2 * t.s3, -col2 * q3 * (t.c3 + i * q * t.c2 * t.s3), t.ei * q3 * (-t.c3 + i * q * t.c2 * t.s3),
        1 + q3 * t.s2 * t.s3,
        -q2 * (t.c2 + i * q * t.c3 * t.s2), t.e * q3 * (q * t.c2 * t.c3 + i * (t.s2 + t.s3)),
        -t.ei * q3 * (q * t.c2 * t.c3 + i * (t.s2 - t.s3)), q2 * (t.c2 + i * q * t.c3 * t.s2),
        -q2 * (t.c2 - i * q * t.c3 * t.s2), -t.e * q3 * (q * t.c2 * t.c3 - i * (t.s2 - t.s3)),
        t.ei * q3 * (q * t.c2 * t.c3 - i * (t.s2 + t.s3)), q2 * (t.c2 - i * q * t.c3 * t.s2),
        1 + q3 * t.s2 * t.s3, col2 * q3 * (t.c3 + i * q * t.c2 * t.s3), t.ei * q3 * (t.c3 - i * q * t.c2 * t.s3),
        1 - q3 * t.s2 * t.s3;
    return 0.5 * s;
}

inline Superoperator closed_form_superoperator(ChannelKind kind, double p, const RotationSpec& r) {
    ComplexMatrix m;
    switch (kind) {
        case ChannelKind::Dephasing: m = dephasing_closed_form(p, r); break;
        case ChannelKind::AmplitudeDamping: m = amplitude_damping_closed_form(p, r); break;
        case ChannelKind::Depolarizing: m = depolarizing_closed_form(p, r); break;
    }
    return {std::move(m), kind, p, r, "appendix", "closed-form"};
}

// ---------------------------------------------------------------------------
// Fidelities

/// Tr[S0 Sp^dag] / N^2 with N = 2, so the ideal map scores 1.
inline double gate_fidelity(const Superoperator& s0, const Superoperator& sp) {
    if (!s0.rotation.same_as(sp.rotation))
        throw std::invalid_argument("gate_fidelity: superoperators implement different rotations");
    return (s0.matrix * sp.matrix.adjoint()).trace().real() / 4.0;
}

/// Tr[rho_ref rho_fin^dag]
inline double cluster_fidelity(const DensityMatrix& ref, const DensityMatrix& fin) {
    if (ref.dim() != fin.dim()) throw std::invalid_argument("cluster_fidelity: dimension mismatch");
    return (ref.matrix() * fin.matrix().adjoint()).trace().real();
}

enum class ClosedForm { GateDephasing, ClusterDephasing, GateAmplitudeDamping, GateDepolarizing, ClusterDepolarizing };

/// "Fg_z" | "Fc_z" | "Fg_A" | "Fg_P" | "Fc_P"
inline ClosedForm parse_closed_form(const std::string& name) {
    if (name == "Fg_z") return ClosedForm::GateDephasing;
    if (name == "Fc_z") return ClosedForm::ClusterDephasing;
    if (name == "Fg_A") return ClosedForm::GateAmplitudeDamping;
    if (name == "Fg_P") return ClosedForm::GateDepolarizing;
    if (name == "Fc_P") return ClosedForm::ClusterDepolarizing;
    throw std::invalid_argument("unknown closed-form fidelity '" + name + "'");
}

/// Prefactor printed for the amplitude-damping gate fidelity, and the one we evaluate with.
inline constexpr double kPrintedAmplitudeGatePrefactor = 1.0 / 4.0;
inline constexpr double kAmplitudeGatePrefactor = 1.0 / 16.0;

inline double dephasing_like_gate_fidelity(double p, const RotationSpec& r, double prefactor) {
    detail::require_strength(p);
    const double q = p - 1, pt = std::sqrt(1 - p);
    const double c2 = std::cos(r.theta2());
    const double common = q * (p + 2 * pt - 2);
    return prefactor * (10 + 6 * pt + p * (p - 6 * pt - 7) + common * std::cos(2 * r.theta2()) +
                        2 * common * c2 * c2 * std::cos(2 * r.theta3()));
}

inline double closed_form_fidelity(ClosedForm which, double p, const RotationSpec& r, double alpha = 0.0) {
    detail::require_strength(p);
    const double q = p - 1, pt = std::sqrt(1 - p);
    switch (which) {
        case ClosedForm::GateDephasing: return dephasing_like_gate_fidelity(p, r, 1.0 / 16.0);
        case ClosedForm::GateAmplitudeDamping: return dephasing_like_gate_fidelity(p, r, kAmplitudeGatePrefactor);
        case ClosedForm::ClusterDephasing:
            return (16 * (1 + pt) + p * (p - 6 * pt - 14) - p * (p - 2 * pt - 2) * std::cos(4 * alpha)) / 32;
        case ClosedForm::GateDepolarizing:
            return ((p - 2) * (-4 + p * (7 + p * (p - 6))) + q * q * p * p * std::cos(2 * r.theta2())) / 8;
        case ClosedForm::ClusterDepolarizing:
            return (p - 2) * (p - 2) * (3 * p * (3 * p - 5) + 8 - q * p * std::cos(4 * alpha)) / 32;
    }
    throw std::invalid_argument("unknown closed form");
}

// ---------------------------------------------------------------------------
// Haar sampling

/// Euler angles of Haar-random SU(2) elements: theta1, theta3 uniform on [0, 2 pi),
/// theta2 on [0, pi] with density sin(theta2) / 2. The stream depends only on the seed.
class HaarSampler {
public:
    explicit HaarSampler(std::uint64_t seed) : engine_(seed) {}

    RotationSpec next() {
        const double t1 = kTwoPi * uniform();
        const double t2 = std::acos(1.0 - 2.0 * uniform());
        const double t3 = kTwoPi * uniform();
        return {t1, t2, t3};
    }

private:
    // 53 random bits; std::uniform_real_distribution is not reproducible across libraries.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
};

inline RotationSpec haar_random_rotation(std::uint64_t seed) { return HaarSampler(seed).next(); }

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationError : std::runtime_error {
    CalibrationError(const std::string& what, double best) : std::runtime_error(what), best_residual(best) {}
    double best_residual;
};

struct ChannelCalibration {
    ChannelKind kind;
    int winners = 0;
    double best_residual = INFINITY;
    MeasurementMap best;
};

struct CalibrationReport {
    ConventionCalibration calibration;
    std::vector<ChannelCalibration> channels;
    int measurement_candidates = 0;
    int ideal_winners = 0;            // within the shipped rotation form
    bool form_degenerate = false;     // the other rotation form wins too
    double ideal_residual = INFINITY;
    double literal_ideal_residual = INFINITY;  // U = H Z(t1) X(t2) Z(t3) as displayed
};

inline constexpr double kCalibrationTol = 1e-9;
inline constexpr std::uint64_t kCalibrationSeed = 20090415;

inline std::vector<RotationSpec> calibration_rotations() {
    HaarSampler h(kCalibrationSeed);
    std::vector<RotationSpec> out;
    for (int i = 0; i < 5; ++i) out.push_back(h.next());
    return out;
}

inline std::vector<double> calibration_strengths() { return {0.15, 0.5, 0.85}; }

/// max |a - b| over entries, skipping `mask` positions.
inline double masked_residual(const ComplexMatrix& a, const ComplexMatrix& b,
                              const std::vector<std::pair<int, int>>& mask = {}) {
    double worst = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (std::find(mask.begin(), mask.end(), std::pair{i, j}) != mask.end()) continue;
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        }
    return worst;
}

inline std::vector<MeasurementMap> measurement_candidates() {
    std::vector<MeasurementMap> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
        for (int sign : {1, -1})
            for (int outcome : {-1, 1}) out.push_back({perm, sign, outcome});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

inline std::vector<IdealConvention> ideal_candidates(RotationForm form) {
    std::vector<IdealConvention> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
        for (int signs = 0; signs < 8; ++signs)
            for (char frame : {'I', 'X', 'Y', 'Z'})
                out.push_back({form, perm, {signs & 1 ? -1 : 1, signs & 2 ? -1 : 1, signs & 4 ? -1 : 1}, frame});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

/// Two-stage search.
///  1. Measurement map: the unique (ordering, sign, kept outcome) for which tomography of
///     the simulated chain reproduces the closed-form superoperators of every channel on a
///     probe grid. The suspected-typo entries of the depolarizing matrix are masked.
///  2. Ideal composition: the (slot order, signs, Pauli frame) of F.H.Z.X.Z whose
///     U (x) conj(U) equals the noiseless reconstruction under that map.
/// Throws CalibrationError when stage 1 has no unique, channel-independent winner.
inline CalibrationReport calibrate_conventions() {
    CalibrationReport report;
    const auto rotations = calibration_rotations();
    const auto candidates = measurement_candidates();
    report.measurement_candidates = static_cast<int>(candidates.size());
    const std::vector<std::pair<int, int>> sp_mask(kDepolarizingSuspectEntries.begin(),
                                                   kDepolarizingSuspectEntries.end());

    std::optional<MeasurementMap> agreed;
    for (ChannelKind kind : kAllChannels) {
        ChannelCalibration cc{kind};
        std::vector<std::array<DensityMatrix, 4>> clusters;
        for (double p : calibration_strengths()) clusters.push_back(noisy_tomography_clusters(kind, p));
        const auto mask = kind == ChannelKind::Depolarizing ? sp_mask : std::vector<std::pair<int, int>>{};

        std::optional<MeasurementMap> winner;
        for (const auto& cand : candidates) {
            ConventionCalibration trial;
            trial.measurement = cand;
            double worst = 0.0;
            const auto strengths = calibration_strengths();
            for (std::size_t ip = 0; ip < strengths.size() && worst <= cc.best_residual; ++ip)
                for (const auto& r : rotations) {
                    const auto rec = reconstruct_from_clusters(clusters[ip], kind, strengths[ip], r, trial);
                    worst = std::max(worst, masked_residual(rec.superop.matrix,
                                                            closed_form_superoperator(kind, strengths[ip], r).matrix,
                                                            mask));
                }
            if (worst < cc.best_residual) {
                cc.best_residual = worst;
                cc.best = cand;
            }
            if (worst < kCalibrationTol) {
                ++cc.winners;
                winner = cand;
            }
        }
        report.channels.push_back(cc);
        if (cc.winners != 1)
            throw CalibrationError(std::string("calibration: ") + std::to_string(cc.winners) +
                                       " measurement maps reproduce the closed form for " + to_string(kind) +
                                       " (best residual " + std::to_string(cc.best_residual) + ")",
                                   cc.best_residual);
        if (agreed && !(*agreed == *winner))
            throw CalibrationError("calibration: channels disagree on the measurement map", cc.best_residual);
        agreed = winner;
    }
    report.calibration.measurement = *agreed;

    std::vector<ComplexMatrix> noiseless;
    {
        const auto clusters = noisy_tomography_clusters(ChannelKind::Dephasing, 0.0);
        for (const auto& r : rotations)
            noiseless.push_back(reconstruct_from_clusters(clusters, ChannelKind::Dephasing, 0.0, r,
                                                          report.calibration)
                                    .superop.matrix);
    }
    const auto ideal_residual = [&](const IdealConvention& c) {
        double worst = 0.0;
        for (std::size_t k = 0; k < rotations.size(); ++k) {
            const ComplexMatrix u = ideal_unitary(rotations[k], c);
            worst = std::max(worst, detail::max_abs(kron(u, u.conjugate()) - noiseless[k]));
        }
        return worst;
    };

    report.literal_ideal_residual = ideal_residual(IdealConvention{});
    std::optional<IdealConvention> ideal;
    for (const auto& c : ideal_candidates(RotationForm::Phase)) {
        const double res = ideal_residual(c);
        report.ideal_residual = std::min(report.ideal_residual, res);
        if (res < kCalibrationTol) {
            ++report.ideal_winners;
            if (!ideal) ideal = c;
        }
    }
    if (!ideal)
        throw CalibrationError("calibration: no ideal composition reproduces the noiseless map",
                               report.ideal_residual);
    for (const auto& c : ideal_candidates(RotationForm::Exponential))
        if (ideal_residual(c) < kCalibrationTol) report.form_degenerate = true;
    report.calibration.ideal = *ideal;
    return report;
}

}  // namespace clusterq
