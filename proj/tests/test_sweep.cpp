#include "clusterq/serialize.hpp"
#include "clusterq/sweep.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <clocale>
#include <numbers>
#include <sstream>

using namespace clusterq;

namespace {

std::string csv_of(const SweepConfig& c) {
    std::ostringstream os;
    write_csv(os, run_sweep(c));
    return os.str();
}

}  // namespace

TEST(GridParsing, RangeAndSingleValue) {
    const Grid g = parse_grid("0:1:5");
    const auto v = g.values();
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v.front(), 0.0);
    EXPECT_EQ(v[2], 0.5);
    EXPECT_EQ(v.back(), 1.0);
    EXPECT_EQ(parse_grid("0.25"), Grid::single(0.25));
    EXPECT_EQ(parse_grid("1:2:1").values(), std::vector<double>{1.0});
}

TEST(GridParsing, EndpointsAreExact) {
    const auto v = parse_grid("0:3.141592653589793:41").values();
    EXPECT_EQ(v.back(), std::numbers::pi);
    EXPECT_EQ(v.size(), 41u);
}

TEST(GridParsing, RejectsMalformedText) {
    for (const char* bad : {"", "abc", "0:1", "0:1:0", "0:1:-3", "0:1:2:3", "0:x:3", "0:1:2.5", "nan", "inf"})
        EXPECT_THROW(parse_grid(bad), std::invalid_argument) << bad;
}

TEST(Names, MetricsSubsetsFormats) {
    for (Metric m : {Metric::Negativity, Metric::Witness, Metric::ClusterFidelity, Metric::GateFidelity,
                     Metric::KrausAmplitudes, Metric::F1, Metric::C1})
        EXPECT_EQ(parse_metric(to_string(m)), m);
    EXPECT_THROW(parse_metric("entropy"), std::invalid_argument);
    EXPECT_EQ(parse_subset("3,1"), (QubitSet{1, 3}));
    EXPECT_THROW(parse_subset("1,a"), std::invalid_argument);
    EXPECT_EQ(parse_format("json"), OutputFormat::Json);
    EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}

TEST(Config, DefaultsFollowMetricKind) {
    const SweepConfig state = default_sweep_config(Metric::Negativity);
    EXPECT_EQ(state.alpha.steps, 41);
    EXPECT_EQ(state.p.steps, 101);
    EXPECT_EQ(state.theta2.steps, 1);
    const SweepConfig gate = default_sweep_config(Metric::GateFidelity);
    EXPECT_EQ(gate.alpha.steps, 1);
    EXPECT_EQ(gate.theta2.steps, 41);
    EXPECT_EQ(gate.theta2.stop, 2 * std::numbers::pi);
    EXPECT_EQ(gate.theta3, Grid::single(0.0));
}

TEST(Config, JsonOverlay) {
    const auto j = nlohmann::json::parse(R"({"channel": "amp", "subset": [1, 2], "p": "0:0.5:3", "alpha": 0.3,
                                              "theta2": {"start": 0, "stop": 1, "steps": 2}, "jobs": 2})");
    const SweepConfig c = apply_json_config(default_sweep_config(Metric::Negativity), j);
    EXPECT_EQ(c.channel, ChannelKind::AmplitudeDamping);
    EXPECT_EQ(c.subset, (QubitSet{1, 2}));
    EXPECT_EQ(c.p, (Grid{0.0, 0.5, 3}));
    EXPECT_EQ(c.alpha, Grid::single(0.3));
    EXPECT_EQ(c.theta2, (Grid{0.0, 1.0, 2}));
    EXPECT_EQ(c.jobs, 2);
    EXPECT_THROW(apply_json_config(c, nlohmann::json::parse(R"({"alhpa": 1})")), std::invalid_argument);
    EXPECT_THROW(apply_json_config(c, nlohmann::json::parse("[1]")), std::invalid_argument);
}

TEST(Config, ValidationRejectsBadValues) {
    SweepConfig c = default_sweep_config(Metric::Negativity);
    c.p = Grid{0.0, 1.5, 4};
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = default_sweep_config(Metric::Negativity);
    c.subset = QubitSet{1, 2, 3, 4};
    EXPECT_THROW(validate(c), std::invalid_argument);
    c.subset = QubitSet{5};
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = default_sweep_config(Metric::Negativity);
    c.jobs = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = default_sweep_config(Metric::Negativity);
    c.alpha.steps = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(SweepOrder, PSlowestThenAlphaBetaThetas) {
    SweepConfig c = default_sweep_config(Metric::Negativity);
    c.p = Grid{0.0, 1.0, 2};
    c.alpha = Grid{0.1, 0.2, 2};
    c.theta3 = Grid{0.0, 1.0, 2};
    const auto pts = sweep_points(c);
    ASSERT_EQ(pts.size(), 8u);
    EXPECT_EQ(pts[1].theta3, 1.0);
    EXPECT_EQ(pts[2].alpha, 0.2);
    EXPECT_EQ(pts[4].p, 1.0);
}

TEST(Sweep, DefaultNegativityGridCardinalityAndNoiselessColumn) {
    SweepConfig c = default_sweep_config(Metric::Negativity);
    const auto rows = run_sweep(c);
    ASSERT_EQ(rows.size(), 4141u);
    for (std::size_t i = 0; i < 41; ++i) {
        EXPECT_EQ(rows[i].p, 0.0);
        const double expected = negativity(build_cluster({rows[i].alpha, 0.0}), {1}).value;
        EXPECT_NEAR(rows[i].value, expected, 1e-12);
    }
    EXPECT_NEAR(rows[10].value, 0.5, 1e-10);  // alpha = pi/4
}

TEST(Sweep, DeterministicAndParallelMatchesSerial) {
    SweepConfig c = default_sweep_config(Metric::GateFidelity);
    c.channel = ChannelKind::AmplitudeDamping;
    c.p = Grid{0.0, 1.0, 6};
    c.theta2 = Grid{0.0, 6.0, 7};
    const std::string serial = csv_of(c);
    EXPECT_EQ(serial, csv_of(c));
    c.jobs = 4;
    EXPECT_EQ(serial, csv_of(c));
}

TEST(Sweep, KrausAmplitudesGiveFourRowsPerPoint) {
    SweepConfig c = default_sweep_config(Metric::KrausAmplitudes);
    c.p = Grid{0.2, 0.4, 2};
    c.theta2 = Grid::single(0.5);
    const auto rows = run_sweep(c);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[0].metric, "kraus_amplitude_1");
    EXPECT_EQ(rows[3].metric, "kraus_amplitude_4");
    double sum = 0;
    for (int i = 0; i < 4; ++i) sum += rows[static_cast<std::size_t>(i)].value * rows[static_cast<std::size_t>(i)].value;
    EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(Sweep, GateMetricsMatchDirectEvaluation) {
    SweepConfig c = default_sweep_config(Metric::F1);
    c.channel = ChannelKind::Dephasing;
    c.p = Grid::single(0.4);
    c.theta2 = Grid::single(0.0);
    const auto rows = run_sweep(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].value, 0.8, 1e-10);  // F1 = 1 - p/2 at the zero rotation
}

TEST(Sweep, WitnessAndClusterFidelityReferenceValues) {
    SweepConfig c = default_sweep_config(Metric::Witness);
    c.p = Grid::single(0.0);
    c.alpha = Grid::single(std::numbers::pi / 4);
    c.beta = Grid::single(0.9);
    EXPECT_NEAR(run_sweep(c).at(0).value, -0.5, 1e-12);
    c.metric = Metric::ClusterFidelity;
    c.channel = ChannelKind::Depolarizing;
    c.p = Grid::single(1.0);
    EXPECT_NEAR(run_sweep(c).at(0).value, 1.0 / 16, 1e-12);
}

TEST(Csv, HeaderAndLineEndings) {
    SweepConfig c = default_sweep_config(Metric::Negativity);
    c.p = Grid::single(0.5);
    c.alpha = Grid::single(0.5);
    const std::string csv = csv_of(c);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "channel,p,alpha,beta,theta1,theta2,theta3,metric,value");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.back(), '\n');
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Csv, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(std::numbers::pi), "3.14159265359");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1.5e-13), "1.5e-13");
    EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
}

TEST(Csv, IndependentOfCLocale) {
    const std::string before = format_number(0.5);
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") || std::setlocale(LC_NUMERIC, "fr_FR.UTF-8")) {
        EXPECT_EQ(format_number(0.5), before);
        std::setlocale(LC_NUMERIC, "C");
    }
    EXPECT_EQ(before, "0.5");
}

TEST(Json, RecordsCarryTheCsvFields) {
    SweepConfig c = default_sweep_config(Metric::Negativity);
    c.p = Grid::single(0.0);
    c.alpha = Grid::single(std::numbers::pi / 4);
    const auto j = records_to_json(run_sweep(c));
    ASSERT_EQ(j.size(), 1u);
    for (const char* key : {"channel", "p", "alpha", "beta", "theta1", "theta2", "theta3", "metric", "value"})
        EXPECT_TRUE(j[0].contains(key)) << key;
    EXPECT_EQ(j[0]["metric"], "negativity");
}

TEST(Serialize, MatrixRoundTripAndMetadata) {
    std::mt19937_64 rng(257);
    const ComplexMatrix m = clusterq::testing::random_gaussian(rng, 4, 4);
    EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
    EXPECT_THROW(matrix_from_json(nlohmann::json::parse("[[[1,0]],[[1,0],[2,0]]]")), std::invalid_argument);

    const Superoperator s = reconstruct_superoperator(ChannelKind::Dephasing, 0.25, {0.1, 0.2, 0.3});
    const auto j = to_json(s);
    EXPECT_EQ(j["kind"], "dephasing");
    EXPECT_EQ(j["source"], "reconstructed");
    EXPECT_EQ(j["theta"].size(), 3u);
    EXPECT_LT((matrix_from_json(j["matrix"]) - s.matrix).cwiseAbs().maxCoeff(), 1e-15);

    const auto d = decompose(s, ideal_unitary(s.rotation));
    const auto k = to_json(d);
    EXPECT_EQ(k["kraus"].size(), 4u);
    EXPECT_EQ(k["amplitudes"].size(), 4u);
}
