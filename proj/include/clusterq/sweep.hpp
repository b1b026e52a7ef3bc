#pragma once

// Parameter sweeps over (p, alpha, beta, theta1..3) grids: configuration, evaluation on a
// worker pool, and CSV / JSON output in grid-lexicographic order.

#include "clusterq/choi.hpp"
#include "clusterq/entanglement.hpp"
#include "clusterq/logical.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

namespace clusterq {

/// Evenly spaced values from start to stop inclusive; steps == 1 is the single value start.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(steps));
        if (steps == 1) return {start};
        for (int k = 0; k < steps; ++k) {
            // Endpoints exact; interior points from the integer index, never accumulated.
            out.push_back(k == steps - 1 ? stop : start + (stop - start) * k / (steps - 1));
        }
        return out;
    }

    static Grid single(double v) { return {v, v, 1}; }
    friend bool operator==(const Grid&, const Grid&) = default;
};

namespace detail {

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": '" + std::string(s) + "' is not a finite number");
    return v;
}

}  // namespace detail

/// "start:stop:steps" or a single value.
inline Grid parse_grid(std::string_view text, std::string_view what = "grid") {
    const auto c1 = text.find(':');
    if (c1 == std::string_view::npos) return Grid::single(detail::parse_double(text, what));
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
        throw std::invalid_argument(std::string(what) + ": expected start:stop:steps or a value, got '" +
                                    std::string(text) + "'");
    Grid g{detail::parse_double(text.substr(0, c1), what), detail::parse_double(text.substr(c1 + 1, c2 - c1 - 1), what),
           0};
    const auto steps_text = text.substr(c2 + 1);
    const auto [ptr, ec] = std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), g.steps);
    if (ec != std::errc{} || ptr != steps_text.data() + steps_text.size() || g.steps < 1)
        throw std::invalid_argument(std::string(what) + ": steps must be a positive integer, got '" +
                                    std::string(steps_text) + "'");
    return g;
}

enum class Metric { Negativity, Witness, ClusterFidelity, GateFidelity, KrausAmplitudes, F1, C1 };

inline const char* to_string(Metric m) {
    switch (m) {
        case Metric::Negativity: return "negativity";
        case Metric::Witness: return "witness";
        case Metric::ClusterFidelity: return "cluster_fidelity";
        case Metric::GateFidelity: return "gate_fidelity";
        case Metric::KrausAmplitudes: return "kraus_amplitudes";
        case Metric::F1: return "f1";
        case Metric::C1: return "c1";
    }
    return "?";
}

inline Metric parse_metric(std::string_view s) {
    for (Metric m : {Metric::Negativity, Metric::Witness, Metric::ClusterFidelity, Metric::GateFidelity,
                     Metric::KrausAmplitudes, Metric::F1, Metric::C1})
        if (s == to_string(m)) return m;
    throw std::invalid_argument("unknown metric '" + std::string(s) +
                                "' (expected negativity|witness|cluster_fidelity|gate_fidelity|kraus_amplitudes|f1|c1)");
}

/// Metrics of the logical gate depend on the rotation; the others on the input state.
inline bool is_gate_metric(Metric m) {
    return m == Metric::GateFidelity || m == Metric::KrausAmplitudes || m == Metric::F1 || m == Metric::C1;
}

/// "1,3" -> {1, 3}
inline QubitSet parse_subset(std::string_view s) {
    std::vector<int> qs;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto tok = s.substr(0, comma);
        int q = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), q);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw std::invalid_argument("subset: '" + std::string(tok) + "' is not a qubit index");
        qs.push_back(q);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return QubitSet(qs);
}

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected csv|json)");
}

struct SweepConfig {
    ChannelKind channel = ChannelKind::Dephasing;
    Metric metric = Metric::Negativity;
    QubitSet subset{1};
    Grid p{0.0, 1.0, 101};
    Grid alpha{0.0, std::numbers::pi, 41};
    Grid beta = Grid::single(0.0);
    Grid theta1 = Grid::single(0.0);
    Grid theta2 = Grid::single(0.0);
    Grid theta3 = Grid::single(0.0);
    std::uint64_t seed = 0;  // recorded for provenance; grid sweeps are deterministic
    int jobs = 1;
    std::string out;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;
};

/// Defaults per metric: state metrics sweep (alpha, p); gate metrics sweep (theta2, p)
/// with theta1 = theta3 = 0 and the input state irrelevant.
inline SweepConfig default_sweep_config(Metric metric) {
    SweepConfig c;
    c.metric = metric;
    if (is_gate_metric(metric)) {
        c.alpha = Grid::single(0.0);
        c.theta2 = Grid{0.0, 2 * std::numbers::pi, 41};
    }
    return c;
}

/// Throws std::invalid_argument describing the first problem found.
inline void validate(const SweepConfig& c) {
    for (const auto& [name, g] : {std::pair{"p", &c.p}, std::pair{"alpha", &c.alpha}, std::pair{"beta", &c.beta},
                                  std::pair{"theta1", &c.theta1}, std::pair{"theta2", &c.theta2},
                                  std::pair{"theta3", &c.theta3}}) {
        if (g->steps < 1) throw std::invalid_argument(std::string(name) + " grid is empty");
        if (!std::isfinite(g->start) || !std::isfinite(g->stop))
            throw std::invalid_argument(std::string(name) + " grid has non-finite bounds");
    }
    for (double v : c.p.values())
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("p grid leaves [0,1]");
    if (c.metric == Metric::Negativity) {
        if (c.subset.size() == 0 || c.subset.size() >= 4) throw std::invalid_argument("subset must be a proper, nonempty cut");
        for (int q : c.subset.indices())
            if (q < 1 || q > 4) throw std::invalid_argument("subset qubit " + std::to_string(q) + " outside 1..4");
    }
    if (c.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

struct SweepRecord {
    ChannelKind channel;
    double p, alpha, beta, theta1, theta2, theta3;
    std::string metric;
    double value;
};

struct SweepPoint {
    double p, alpha, beta, theta1, theta2, theta3;
};

/// Grid points in lexicographic order: p slowest, then alpha, beta, theta1, theta2, theta3.
inline std::vector<SweepPoint> sweep_points(const SweepConfig& c) {
    std::vector<SweepPoint> out;
    const auto ps = c.p.values(), as = c.alpha.values(), bs = c.beta.values();
    const auto t1 = c.theta1.values(), t2 = c.theta2.values(), t3 = c.theta3.values();
    out.reserve(ps.size() * as.size() * bs.size() * t1.size() * t2.size() * t3.size());
    for (double p : ps)
        for (double a : as)
            for (double b : bs)
                for (double x : t1)
                    for (double y : t2)
                        for (double z : t3) out.push_back({p, a, b, x, y, z});
    return out;
}

/// Rows produced at one grid point (several for kraus_amplitudes). Gate metrics reuse
/// `clusters`, the decohered tomography clusters at pt.p, when given.
inline std::vector<SweepRecord> evaluate_point(const SweepConfig& c, const SweepPoint& pt,
                                               const std::array<DensityMatrix, 4>* clusters = nullptr) {
    const auto row = [&](std::string metric, double value) {
        if (!std::isfinite(value)) throw std::runtime_error(std::string("non-finite ") + metric + " value");
        return SweepRecord{c.channel, pt.p, pt.alpha, pt.beta, pt.theta1, pt.theta2, pt.theta3, std::move(metric), value};
    };
    const InitialState s{pt.alpha, pt.beta};
    const RotationSpec r(pt.theta1, pt.theta2, pt.theta3);
    const auto logical_map = [&] {
        return clusters ? reconstruct_from_clusters(*clusters, c.channel, pt.p, r).superop
                        : reconstruct_superoperator(c.channel, pt.p, r);
    };
    switch (c.metric) {
        case Metric::Negativity:
            return {row("negativity", negativity(noisy_cluster(c.channel, pt.p, s), c.subset).value)};
        case Metric::Witness:
            // Witness phase matched to the input phase.
            return {row("witness", witness_expectation(noisy_cluster(c.channel, pt.p, s), pt.beta))};
        case Metric::ClusterFidelity:
            return {row("cluster_fidelity", cluster_fidelity(build_cluster(s), noisy_cluster(c.channel, pt.p, s)))};
        case Metric::GateFidelity:
            return {row("gate_fidelity",
                        gate_fidelity(ideal_superoperator(r), logical_map()))};
        case Metric::KrausAmplitudes: {
            const auto d = decompose(logical_map(), ideal_unitary(r));
            std::vector<SweepRecord> rows;
            for (std::size_t a = 0; a < d.amplitudes.size(); ++a)
                rows.push_back(row("kraus_amplitude_" + std::to_string(a + 1), d.amplitudes[a]));
            return rows;
        }
        case Metric::F1:
        case Metric::C1: {
            const ComplexMatrix u = ideal_unitary(r);
            const auto d = decompose(logical_map(), u);
            return {c.metric == Metric::F1 ? row("f1", first_kraus_fidelity(d, u))
                                           : row("c1", first_kraus_correlation(d, u))};
        }
    }
    throw std::invalid_argument("unknown metric");
}

/// Evaluates every grid point on `c.jobs` workers; output order is grid order regardless
/// of completion order. The first worker exception is rethrown.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& c) {
    validate(c);
    const auto points = sweep_points(c);
    // p is the slowest grid axis, so point i belongs to p value i / per_p.
    const auto p_values = c.p.values();
    const std::size_t per_p = points.size() / p_values.size();
    std::vector<std::array<DensityMatrix, 4>> clusters;
    if (is_gate_metric(c.metric))
        for (double p : p_values) clusters.push_back(noisy_tomography_clusters(c.channel, p));
    std::vector<std::vector<SweepRecord>> per_point(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                per_point[i] = evaluate_point(c, points[i], clusters.empty() ? nullptr : &clusters[i / per_p]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = points.size();
            }
        }
    };
    const auto jobs = static_cast<std::size_t>(std::max(1, c.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < std::min(jobs, points.size()); ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<SweepRecord> out;
    for (auto& rows : per_point)
        for (auto& rec : rows) out.push_back(std::move(rec));
    return out;
}

inline constexpr std::string_view kCsvHeader = "channel,p,alpha,beta,theta1,theta2,theta3,metric,value";

/// 12 significant digits, shortest of fixed / scientific, independent of the C locale.
inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << to_string(r.channel) << ',' << format_number(r.p) << ',' << format_number(r.alpha) << ','
           << format_number(r.beta) << ',' << format_number(r.theta1) << ',' << format_number(r.theta2) << ','
           << format_number(r.theta3) << ',' << r.metric << ',' << format_number(r.value) << '\n';
    }
}

inline nlohmann::json records_to_json(const std::vector<SweepRecord>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"channel", to_string(r.channel)},
                       {"p", r.p},
                       {"alpha", r.alpha},
                       {"beta", r.beta},
                       {"theta1", r.theta1},
                       {"theta2", r.theta2},
                       {"theta3", r.theta3},
                       {"metric", r.metric},
                       {"value", r.value}});
    return out;
}

namespace detail {

inline Grid grid_from_json(const nlohmann::json& j, std::string_view what) {
    if (j.is_number()) return Grid::single(j.get<double>());
    if (j.is_string()) return parse_grid(j.get<std::string>(), what);
    if (j.is_object()) {
        Grid g{j.at("start").get<double>(), j.at("stop").get<double>(), j.at("steps").get<int>()};
        return g;
    }
    throw std::invalid_argument(std::string(what) + ": expected a number, \"start:stop:steps\" or an object");
}

}  // namespace detail

/// Overlays the keys present in a JSON config onto `base`. Unknown keys are rejected so
/// typos do not silently fall back to defaults.
inline SweepConfig apply_json_config(SweepConfig base, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "channel") base.channel = parse_channel_kind(value.get<std::string>());
        else if (key == "metric") base.metric = parse_metric(value.get<std::string>());
        else if (key == "subset") {
            if (value.is_string()) base.subset = parse_subset(value.get<std::string>());
            else base.subset = QubitSet(value.get<std::vector<int>>());
        }
        else if (key == "p") base.p = detail::grid_from_json(value, "p");
        else if (key == "alpha") base.alpha = detail::grid_from_json(value, "alpha");
        else if (key == "beta") base.beta = detail::grid_from_json(value, "beta");
        else if (key == "theta1") base.theta1 = detail::grid_from_json(value, "theta1");
        else if (key == "theta2") base.theta2 = detail::grid_from_json(value, "theta2");
        else if (key == "theta3") base.theta3 = detail::grid_from_json(value, "theta3");
        else if (key == "seed") base.seed = value.get<std::uint64_t>();
        else if (key == "jobs") base.jobs = value.get<int>();
        else if (key == "out") base.out = value.get<std::string>();
        else if (key == "format") base.format = parse_format(value.get<std::string>());
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return base;
}

}  // namespace clusterq
