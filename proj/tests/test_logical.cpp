#include "clusterq/entanglement.hpp"
#include "clusterq/logical.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace clusterq;
using clusterq::testing::max_abs_diff;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<RotationSpec> probe_rotations(std::uint64_t seed, int count) {
    HaarSampler h(seed);
    std::vector<RotationSpec> out;
    for (int i = 0; i < count; ++i) out.push_back(h.next());
    return out;
}

// Cluster encoding of an arbitrary (mixed) input, built from explicit CZ matrices.
DensityMatrix encode_mixed(const DensityMatrix& in) {
    const ComplexVector plus = plus_state();
    const ComplexMatrix pp = plus * plus.adjoint();
    ComplexMatrix c = ComplexMatrix::Identity(16, 16);
    for (int q = 1; q <= 3; ++q) c = embed(gates::cz(), {q, q + 1}, 4) * c;
    return DensityMatrix(c * kron({in.matrix(), pp, pp, pp}) * c.adjoint());
}

}  // namespace

TEST(Rotation, AnglesWrapIntoPeriod) {
    const RotationSpec r(-0.5, 2 * kPi + 0.25, 7 * kPi);
    EXPECT_NEAR(r.theta1(), 2 * kPi - 0.5, 1e-12);
    EXPECT_NEAR(r.theta2(), 0.25, 1e-12);
    EXPECT_NEAR(r.theta3(), kPi, 1e-12);
    EXPECT_THROW(RotationSpec(std::nan(""), 0, 0), std::invalid_argument);
    EXPECT_THROW(RotationSpec(0, INFINITY, 0), std::invalid_argument);
}

TEST(MeasureChain, NoiselessZeroRotationAppliesIdealUnitary) {
    // Direct unitary application oracle for the calibrated composition Z.H at zero angles.
    const RotationSpec zero;
    const ComplexMatrix zh = gates::pauli_z() * gates::hadamard();
    EXPECT_LT(max_abs_diff(ideal_unitary(zero), zh), 1e-14);
    for (const InitialState& s : {InitialState{0.3, 0.7}, InitialState{1.1, 2.0}}) {
        const ComplexVector psi = psi_in(s);
        const DensityMatrix out = measure_chain(build_cluster(s), zero);
        EXPECT_LT(max_abs_diff(out.matrix(), zh * psi * psi.adjoint() * zh.adjoint()), 1e-12);
    }
}

TEST(MeasureChain, NoiselessOutputIsPure) {
    for (const auto& r : probe_rotations(101, 10)) {
        const DensityMatrix out = measure_chain(build_cluster({0.8, 0.3}), r);
        EXPECT_NEAR(out.purity(), 1.0, 1e-10);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    }
}

TEST(MeasureChain, RejectsWrongSizeAndZeroBranch) {
    EXPECT_THROW(measure_chain(DensityMatrix::maximally_mixed(3), {}), std::invalid_argument);
    // |0000> with all-Y... a product state orthogonal to the kept outcome on qubit 1.
    ComplexVector v = ComplexVector::Zero(16);
    v(0) = 1.0;
    const ComplexVector keep_minus = (ComplexVector(2) << 1.0, 1.0).finished() / std::numbers::sqrt2;
    v = kron({keep_minus, plus_state(), plus_state(), plus_state()});
    EXPECT_THROW(measure_chain(DensityMatrix::from_pure(v), {}), std::domain_error);
}

TEST(Reconstruct, NoiselessEqualsIdeal) {
    for (const auto& r : probe_rotations(103, 10)) {
        const Superoperator s = reconstruct_superoperator(ChannelKind::Dephasing, 0.0, r);
        EXPECT_LT(max_abs_diff(s.matrix, ideal_superoperator(r).matrix), 1e-10);
    }
}

TEST(Reconstruct, FullDephasingIsCompletelyDepolarizing) {
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 0.5;
    for (const auto& r : probe_rotations(107, 5))
        EXPECT_LT(max_abs_diff(reconstruct_superoperator(ChannelKind::Dephasing, 1.0, r).matrix, expected), 1e-10);
}

TEST(Reconstruct, LinearOnMixedInputs) {
    std::mt19937_64 rng(109);
    for (ChannelKind kind : kAllChannels)
        for (const auto& r : probe_rotations(113, 3)) {
            const double p = 0.37;
            const Superoperator s = reconstruct_superoperator(kind, p, r);
            const DensityMatrix in = clusterq::testing::random_density(rng, 1);
            const DensityMatrix direct = measure_chain(apply_channel(encode_mixed(in), four_qubit_channel(kind, p)), r);
            EXPECT_LT(max_abs_diff(apply_superoperator(s.matrix, in.matrix()), direct.matrix()), 1e-10)
                << to_string(kind);
        }
}

TEST(Reconstruct, BranchProbabilityIndependentOfInput) {
    for (ChannelKind kind : kAllChannels)
        for (double p : {0.0, 0.3, 0.9})
            for (const auto& r : probe_rotations(127, 3))
                EXPECT_LT(reconstruct_tomography(kind, p, r).probability_spread(), 1e-10);
}

TEST(Reconstruct, TraceAndHermiticityPreserving) {
    const ComplexVector vec_identity = vec_row_major(ComplexMatrix::Identity(2, 2));
    for (ChannelKind kind : kAllChannels)
        for (const auto& r : probe_rotations(131, 3)) {
            const ComplexMatrix s = reconstruct_superoperator(kind, 0.45, r).matrix;
            // Tr[unvec(S v)] = vec(I)^T S v for every v
            const ComplexVector trace_row = vec_identity.transpose() * s;
            EXPECT_LT((trace_row - vec_identity).cwiseAbs().maxCoeff(), 1e-10);
            ComplexMatrix h(2, 2);
            h << 0.2, Complex(0.1, -0.4), Complex(0.1, 0.4), -0.7;
            EXPECT_LT(hermiticity_residual(apply_superoperator(s, h)), 1e-10);
        }
}

TEST(ClosedForm, DephasingAtZeroIsIdeal) {
    const RotationSpec zero;
    EXPECT_LT(max_abs_diff(dephasing_closed_form(0.0, zero), ideal_superoperator(zero).matrix), 1e-14);
}

TEST(ClosedForm, LiteralCompositionCollapsesToHadamard) {
    const ComplexMatrix h = gates::hadamard();
    EXPECT_LT(max_abs_diff(ideal_unitary(RotationSpec{}, IdealConvention{}), h), 1e-14);
}

TEST(ClosedForm, AmplitudeRowsTwoThreeMatchDephasing) {
    std::mt19937_64 rng(137);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HaarSampler h(139);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = u(rng);
        const RotationSpec r = h.next();
        const ComplexMatrix a = amplitude_damping_closed_form(p, r), z = dephasing_closed_form(p, r);
        EXPECT_LT(max_abs_diff(a.middleRows(1, 2), z.middleRows(1, 2)), 1e-14);
    }
}

TEST(ClosedForm, TracePreservingRows) {
    HaarSampler h(149);
    for (ChannelKind kind : kAllChannels)
        for (double p : {0.0, 0.2, 0.55, 1.0}) {
            const RotationSpec r = h.next();
            const ComplexMatrix s = closed_form_superoperator(kind, p, r).matrix;
            const ComplexVector sums = (s.row(0) + s.row(3)).transpose();
            EXPECT_LT(std::abs(sums(0) - 1.0), 1e-12);
            EXPECT_LT(std::abs(sums(1)), 1e-12);
            EXPECT_LT(std::abs(sums(2)), 1e-12);
            EXPECT_LT(std::abs(sums(3) - 1.0), 1e-12);
        }
}

TEST(ClosedForm, MatchesReconstructionOnProbeGrid) {
    const std::vector<std::pair<int, int>> mask(kDepolarizingSuspectEntries.begin(), kDepolarizingSuspectEntries.end());
    for (const auto& r : probe_rotations(151, 4))
        for (double p : {0.1, 0.5, 0.9}) {
            for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::AmplitudeDamping})
                EXPECT_LT(max_abs_diff(reconstruct_superoperator(kind, p, r).matrix,
                                       closed_form_superoperator(kind, p, r).matrix),
                          1e-9);
            const ComplexMatrix rec = reconstruct_superoperator(ChannelKind::Depolarizing, p, r).matrix;
            EXPECT_LT(masked_residual(rec, depolarizing_closed_form(p, r), mask), 1e-9);
            EXPECT_LT(max_abs_diff(rec, depolarizing_closed_form(p, r, PhaseReading::PairedColumns)), 1e-9);
        }
}

TEST(ClosedForm, PrintedDepolarizingPhaseDiffersOnlyAtSuspectEntries) {
    const RotationSpec r(0.9, 1.3, 0.4);
    const ComplexMatrix rec = reconstruct_superoperator(ChannelKind::Depolarizing, 0.3, r).matrix;
    const ComplexMatrix printed = depolarizing_closed_form(0.3, r);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool suspect = std::find(kDepolarizingSuspectEntries.begin(), kDepolarizingSuspectEntries.end(),
                                           std::pair{i, j}) != kDepolarizingSuspectEntries.end();
            if (suspect)
                EXPECT_GT(std::abs(rec(i, j) - printed(i, j)), 1e-3) << i << ',' << j;
            else
                EXPECT_LT(std::abs(rec(i, j) - printed(i, j)), 1e-10) << i << ',' << j;
        }
}

TEST(ClosedForm, RejectsStrengthOutOfRange) {
    EXPECT_THROW(closed_form_superoperator(ChannelKind::Dephasing, 1.5, {}), std::invalid_argument);
    EXPECT_THROW(closed_form_fidelity(ClosedForm::GateDepolarizing, -0.1, {}), std::invalid_argument);
}

TEST(Ideal, UnitarySuperoperator) {
    for (const auto& r : probe_rotations(157, 10)) {
        const ComplexMatrix s = ideal_superoperator(r).matrix;
        EXPECT_LT(max_abs_diff(s * s.adjoint(), ComplexMatrix::Identity(4, 4)), 1e-12);
        EXPECT_NEAR(std::abs(s.determinant()), 1.0, 1e-12);
    }
}

TEST(GateFidelity, ReferenceValues) {
    for (const auto& r : probe_rotations(163, 5)) {
        const Superoperator s0 = ideal_superoperator(r);
        EXPECT_NEAR(gate_fidelity(s0, s0), 1.0, 1e-12);
        EXPECT_NEAR(gate_fidelity(s0, reconstruct_superoperator(ChannelKind::Dephasing, 1.0, r)), 0.25, 1e-10);
        EXPECT_NEAR(gate_fidelity(s0, reconstruct_superoperator(ChannelKind::Depolarizing, 1.0, r)), 0.25, 1e-10);
    }
}

TEST(GateFidelity, RejectsRotationMismatch) {
    EXPECT_THROW(gate_fidelity(ideal_superoperator({0.1, 0, 0}), ideal_superoperator({0.2, 0, 0})),
                 std::invalid_argument);
}

TEST(GateFidelity, IndependentOfTheta1) {
    for (ChannelKind kind : kAllChannels) {
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k < 8; ++k) {
            const RotationSpec r(k * kPi / 4, 1.1, 0.6);
            const double f = gate_fidelity(ideal_superoperator(r), reconstruct_superoperator(kind, 0.4, r));
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        EXPECT_LT(hi - lo, 1e-10) << to_string(kind);
    }
}

TEST(GateFidelity, DepolarizingIndependentOfTheta3) {
    double lo = INFINITY, hi = -INFINITY;
    for (int k = 0; k < 8; ++k) {
        const RotationSpec r(0.3, 1.1, k * kPi / 4);
        const double f = closed_form_fidelity(ClosedForm::GateDepolarizing, 0.6, r);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    EXPECT_LT(hi - lo, 1e-12);
}

TEST(ClusterFidelity, ReferenceValues) {
    const InitialState s{kPi / 4, 0.0};
    const DensityMatrix ref = build_cluster(s);
    EXPECT_NEAR(cluster_fidelity(ref, noisy_cluster(ChannelKind::Dephasing, 0.0, s)), 1.0, 1e-12);
    EXPECT_NEAR(cluster_fidelity(ref, noisy_cluster(ChannelKind::Dephasing, 1.0, s)), 1.0 / 16, 1e-12);
    EXPECT_NEAR(cluster_fidelity(ref, noisy_cluster(ChannelKind::Depolarizing, 1.0, s)), 1.0 / 16, 1e-12);
    EXPECT_THROW(cluster_fidelity(ref, DensityMatrix::maximally_mixed(2)), std::invalid_argument);
}

TEST(ClosedFormFidelity, NoiselessIsOne) {
    for (const auto& r : probe_rotations(167, 5)) {
        EXPECT_NEAR(closed_form_fidelity(ClosedForm::GateDephasing, 0.0, r), 1.0, 1e-12);
        EXPECT_NEAR(closed_form_fidelity(ClosedForm::GateDepolarizing, 0.0, r), 1.0, 1e-12);
    }
    for (double a : {0.0, 0.4, kPi / 4}) {
        EXPECT_NEAR(closed_form_fidelity(ClosedForm::ClusterDephasing, 0.0, {}, a), 1.0, 1e-12);
        EXPECT_NEAR(closed_form_fidelity(ClosedForm::ClusterDepolarizing, 0.0, {}, a), 1.0, 1e-12);
    }
    EXPECT_THROW(parse_closed_form("Fg_x"), std::invalid_argument);
}

TEST(ClosedFormFidelity, GateFormulasMatchTraceDefinition) {
    for (const auto& r : probe_rotations(173, 5))
        for (int k = 0; k <= 10; ++k) {
            const double p = k / 10.0;
            const Superoperator s0 = ideal_superoperator(r);
            EXPECT_NEAR(closed_form_fidelity(ClosedForm::GateDephasing, p, r),
                        gate_fidelity(s0, closed_form_superoperator(ChannelKind::Dephasing, p, r)), 1e-10);
            Superoperator paired = closed_form_superoperator(ChannelKind::Depolarizing, p, r);
            paired.matrix = depolarizing_closed_form(p, r, PhaseReading::PairedColumns);
            EXPECT_NEAR(closed_form_fidelity(ClosedForm::GateDepolarizing, p, r), gate_fidelity(s0, paired), 1e-10);
        }
}

TEST(ClosedFormFidelity, PrintedDepolarizingPhaseBreaksNoiselessLimit) {
    // As printed, S_P(0) is not U (x) conj(U) unless cos(theta3) = 0.
    const RotationSpec r(0.4, 1.0, 0.3);
    const double printed = gate_fidelity(ideal_superoperator(r), closed_form_superoperator(ChannelKind::Depolarizing, 0.0, r));
    EXPECT_GT(std::abs(printed - 1.0), 1e-3);
}

TEST(ClosedFormFidelity, ClusterFormulasMatchSimulation) {
    for (double a : {0.2, kPi / 4, 1.3})
        for (double p : {0.15, 0.5, 0.85}) {
            const DensityMatrix ref = build_cluster({a, 0.0});
            EXPECT_NEAR(closed_form_fidelity(ClosedForm::ClusterDephasing, p, {}, a),
                        cluster_fidelity(ref, noisy_cluster(ChannelKind::Dephasing, p, {a, 0.0})), 1e-10);
            EXPECT_NEAR(closed_form_fidelity(ClosedForm::ClusterDepolarizing, p, {}, a),
                        cluster_fidelity(ref, noisy_cluster(ChannelKind::Depolarizing, p, {a, 0.0})), 1e-10);
        }
}

TEST(ClosedFormFidelity, AmplitudeFormulaEqualsDephasingFormula) {
    for (int ip = 0; ip <= 10; ++ip)
        for (int ir = 0; ir < 10; ++ir) {
            const RotationSpec r(0.2 * ir, 0.6 * ir, 0.35 * ir);
            EXPECT_NEAR(closed_form_fidelity(ClosedForm::GateAmplitudeDamping, ip / 10.0, r),
                        closed_form_fidelity(ClosedForm::GateDephasing, ip / 10.0, r), 1e-10);
        }
    // The printed 1/4 prefactor would give 4 at p = 0.
    EXPECT_NEAR(dephasing_like_gate_fidelity(0.0, {}, kPrintedAmplitudeGatePrefactor), 4.0, 1e-12);
}

TEST(Haar, MomentsAndDistribution) {
    HaarSampler h(2024);
    constexpr int kDraws = 100000;
    std::vector<double> t2;
    t2.reserve(kDraws);
    double mean_cos = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const RotationSpec r = h.next();
        ASSERT_LE(r.theta2(), kPi);
        t2.push_back(r.theta2());
        mean_cos += std::cos(r.theta2());
    }
    EXPECT_NEAR(mean_cos / kDraws, 0.0, 0.01);
    std::sort(t2.begin(), t2.end());
    double ks = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double cdf = (1 - std::cos(t2[static_cast<std::size_t>(i)])) / 2;
        ks = std::max({ks, std::abs(cdf - double(i) / kDraws), std::abs(cdf - double(i + 1) / kDraws)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(Haar, DeterministicPerSeed) {
    EXPECT_TRUE(haar_random_rotation(5).same_as(haar_random_rotation(5)));
    EXPECT_FALSE(haar_random_rotation(5).same_as(haar_random_rotation(6)));
}

TEST(Calibration, UniqueStableWinnerEqualsFrozenDefault) {
    const CalibrationReport report = calibrate_conventions();
    ASSERT_EQ(report.channels.size(), 3u);
    for (const auto& c : report.channels) {
        EXPECT_EQ(c.winners, 1) << to_string(c.kind);
        EXPECT_LT(c.best_residual, kCalibrationTol);
        EXPECT_EQ(c.best, default_calibration().measurement);
    }
    EXPECT_EQ(report.calibration.measurement, default_calibration().measurement);
    EXPECT_LT(report.ideal_residual, kCalibrationTol);
    // The frozen ideal composition reproduces the noiseless map (several equivalent spellings may exist).
    for (const auto& r : calibration_rotations())
        EXPECT_LT(max_abs_diff(ideal_superoperator(r, report.calibration).matrix, ideal_superoperator(r).matrix),
                  1e-10);
    EXPECT_GT(report.literal_ideal_residual, 1e-3);
}
