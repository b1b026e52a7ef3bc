// clusterq: sweeps, ESD scans, superoperator / Kraus dumps, Haar samples and the
// acceptance report. Exit codes: 0 success, 1 validation failure, 2 precondition failure.

#include "clusterq/serialize.hpp"
#include "clusterq/sweep.hpp"
#include "clusterq/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace clusterq;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPrecondition = 2;

// Raw flag values; an empty optional means "not given on the command line".
struct Flags {
    std::optional<std::string> channel, metric, subset, p, alpha, beta, theta1, theta2, theta3, tol, seed, jobs, out,
        config, format, source, count, criterion;
};

json load_config(const std::optional<std::string>& path) {
    if (!path) return json::object();
    std::ifstream in(*path);
    if (!in) throw std::invalid_argument("cannot open config '" + *path + "'");
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw std::invalid_argument("config '" + *path + "' must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config '" + *path + "': " + e.what());
    }
}

// A flag value, falling back to the config file, as text.
std::optional<std::string> lookup(const std::optional<std::string>& flag, const json& config, const char* key) {
    if (flag) return flag;
    if (!config.contains(key)) return std::nullopt;
    const json& v = config.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + std::to_string(e.get<int>());
        return s;
    }
    throw std::invalid_argument(std::string("config key '") + key + "' has an unsupported type");
}

double single_value(const std::optional<std::string>& text, double fallback, const char* what) {
    if (!text) return fallback;
    const Grid g = parse_grid(*text, what);
    if (g.steps != 1) throw std::invalid_argument(std::string(what) + " must be a single value for this command");
    return g.start;
}

class Output {
public:
    explicit Output(const std::optional<std::string>& path) {
        if (path && !path->empty() && *path != "-") {
            file_.open(*path, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot write '" + *path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

OutputFormat format_of(const Flags& f, const json& config, OutputFormat fallback) {
    const auto v = lookup(f.format, config, "format");
    return v ? parse_format(*v) : fallback;
}

int cmd_sweep(const Flags& f) {
    const json config = load_config(f.config);
    const auto metric_text = lookup(f.metric, config, "metric");
    SweepConfig c = default_sweep_config(metric_text ? parse_metric(*metric_text) : Metric::Negativity);
    c = apply_json_config(c, config);
    if (f.channel) c.channel = parse_channel_kind(*f.channel);
    if (f.subset) c.subset = parse_subset(*f.subset);
    if (f.p) c.p = parse_grid(*f.p, "p");
    if (f.alpha) c.alpha = parse_grid(*f.alpha, "alpha");
    if (f.beta) c.beta = parse_grid(*f.beta, "beta");
    if (f.theta1) c.theta1 = parse_grid(*f.theta1, "theta1");
    if (f.theta2) c.theta2 = parse_grid(*f.theta2, "theta2");
    if (f.theta3) c.theta3 = parse_grid(*f.theta3, "theta3");
    if (f.seed) c.seed = std::stoull(*f.seed);
    if (f.jobs) c.jobs = std::stoi(*f.jobs);
    if (f.out) c.out = *f.out;
    if (f.format) c.format = parse_format(*f.format);
    validate(c);

    const auto rows = run_sweep(c);
    Output out(c.out);
    if (c.format == OutputFormat::Csv) write_csv(out.stream(), rows);
    else out.stream() << records_to_json(rows).dump(2) << '\n';
    return kExitOk;
}

int cmd_esd(const Flags& f) {
    const json config = load_config(f.config);
    const auto channel = parse_channel_kind(lookup(f.channel, config, "channel").value_or("dephasing"));
    const auto subset_text = lookup(f.subset, config, "subset");
    const QubitSet subset = subset_text ? parse_subset(*subset_text) : QubitSet{1};
    const InitialState s{single_value(lookup(f.alpha, config, "alpha"), std::numbers::pi / 4, "alpha"),
                         single_value(lookup(f.beta, config, "beta"), 0.0, "beta")};
    const double tol = single_value(lookup(f.tol, config, "tol"), 1e-6, "tol");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (subset.empty() || subset.size() >= 4) throw std::invalid_argument("subset must be a proper, nonempty cut");

    std::optional<double> p;
    try {
        p = esd_threshold(channel, subset, s, tol);
    } catch (const std::domain_error& e) {
        std::cerr << "clusterq esd: " << e.what() << '\n';
        return kExitPrecondition;
    }
    Output out(lookup(f.out, config, "out"));
    if (format_of(f, config, OutputFormat::Csv) == OutputFormat::Json) {
        out.stream() << json{{"channel", to_string(channel)},
                             {"subset", subset.indices()},
                             {"alpha", s.alpha},
                             {"beta", s.beta},
                             {"tol", tol},
                             {"esd", p ? json(*p) : json(nullptr)}}
                            .dump(2)
                     << '\n';
    } else {
        out.stream() << (p ? "esd p=" + format_number(*p) : std::string("no-esd")) << '\n';
    }
    return kExitOk;
}

struct GatePoint {
    ChannelKind channel;
    double p;
    RotationSpec rotation;
};

GatePoint gate_point(const Flags& f, const json& config) {
    const auto channel = parse_channel_kind(lookup(f.channel, config, "channel").value_or("dephasing"));
    const double p = single_value(lookup(f.p, config, "p"), 0.0, "p");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    return {channel, p,
            RotationSpec(single_value(lookup(f.theta1, config, "theta1"), 0.0, "theta1"),
                         single_value(lookup(f.theta2, config, "theta2"), 0.0, "theta2"),
                         single_value(lookup(f.theta3, config, "theta3"), 0.0, "theta3"))};
}

int cmd_superop(const Flags& f) {
    const json config = load_config(f.config);
    const GatePoint g = gate_point(f, config);
    const std::string source = lookup(f.source, config, "source").value_or("reconstructed");
    json doc;
    if (source == "reconstructed") {
        doc = to_json(reconstruct_superoperator(g.channel, g.p, g.rotation));
    } else if (source == "closed-form") {
        doc = to_json(closed_form_superoperator(g.channel, g.p, g.rotation));
    } else if (source == "both") {
        const Superoperator rec = reconstruct_superoperator(g.channel, g.p, g.rotation);
        const Superoperator cf = closed_form_superoperator(g.channel, g.p, g.rotation);
        doc = {{"reconstructed", to_json(rec)},
               {"closed_form", to_json(cf)},
               {"max_residual", detail::max_abs(rec.matrix - cf.matrix)}};
        if (g.channel == ChannelKind::Depolarizing) {
            const std::vector<std::pair<int, int>> mask(kDepolarizingSuspectEntries.begin(),
                                                        kDepolarizingSuspectEntries.end());
            json entries = json::array();
            for (const auto& [i, j] : mask) entries.push_back({i + 1, j + 1});
            doc["suspect_entries"] = entries;
            doc["residual_outside_suspect_entries"] = masked_residual(rec.matrix, cf.matrix, mask);
        }
    } else {
        throw std::invalid_argument("unknown source '" + source + "' (expected reconstructed|closed-form|both)");
    }
    Output out(lookup(f.out, config, "out"));
    out.stream() << doc.dump(2) << '\n';
    return kExitOk;
}

int cmd_kraus(const Flags& f) {
    const json config = load_config(f.config);
    const GatePoint g = gate_point(f, config);
    const ComplexMatrix u = ideal_unitary(g.rotation);
    const auto d = decompose(reconstruct_superoperator(g.channel, g.p, g.rotation), u);
    Output out(lookup(f.out, config, "out"));
    if (format_of(f, config, OutputFormat::Json) == OutputFormat::Csv) {
        SweepConfig c = default_sweep_config(Metric::KrausAmplitudes);
        c.channel = g.channel;
        c.p = Grid::single(g.p);
        c.alpha = Grid::single(0.0);
        c.theta1 = Grid::single(g.rotation.theta1());
        c.theta2 = Grid::single(g.rotation.theta2());
        c.theta3 = Grid::single(g.rotation.theta3());
        std::vector<SweepRecord> rows;
        for (Metric m : {Metric::KrausAmplitudes, Metric::F1, Metric::C1}) {
            c.metric = m;
            for (auto& r : run_sweep(c)) rows.push_back(std::move(r));
        }
        write_csv(out.stream(), rows);
    } else {
        json doc = to_json(d);
        doc["channel"] = to_string(g.channel);
        doc["p"] = g.p;
        doc["theta"] = {g.rotation.theta1(), g.rotation.theta2(), g.rotation.theta3()};
        doc["choi"] = matrix_to_json(d.choi);
        doc["f1"] = first_kraus_fidelity(d, u);
        doc["c1"] = first_kraus_correlation(d, u);
        out.stream() << doc.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_validate(const Flags& f) {
    const auto criteria = acceptance_criteria();
    std::optional<int> only;
    if (f.criterion) {
        only = std::stoi(*f.criterion);
        if (*only < 1 || *only > static_cast<int>(criteria.size()))
            throw std::invalid_argument("criterion must be in 1.." + std::to_string(criteria.size()));
    }
    Output out(f.out);
    bool all = true;
    json report = json::array();
    const bool as_json = f.format && parse_format(*f.format) == OutputFormat::Json;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != *only) continue;
        const CriterionResult r = criteria[i]();
        all = all && r.passed;
        if (as_json) {
            report.push_back({{"criterion", r.id}, {"title", r.title}, {"passed", r.passed}, {"details", r.details}});
        } else {
            out.stream() << summary_line(r) << '\n';
            for (const auto& line : r.details) out.stream() << "    " << line << '\n';
        }
    }
    if (as_json) out.stream() << report.dump(2) << '\n';
    return all ? kExitOk : kExitValidation;
}

int cmd_haar(const Flags& f) {
    const json config = load_config(f.config);
    const auto seed_text = lookup(f.seed, config, "seed");
    const std::uint64_t seed = seed_text ? std::stoull(*seed_text) : 0;
    const auto count_text = lookup(f.count, config, "count");
    const int count = count_text ? std::stoi(*count_text) : 1;
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    HaarSampler h(seed);
    Output out(lookup(f.out, config, "out"));
    if (format_of(f, config, OutputFormat::Csv) == OutputFormat::Json) {
        json rows = json::array();
        for (int i = 0; i < count; ++i) {
            const RotationSpec r = h.next();
            rows.push_back({{"theta1", r.theta1()}, {"theta2", r.theta2()}, {"theta3", r.theta3()}});
        }
        out.stream() << rows.dump(2) << '\n';
    } else {
        out.stream() << "theta1,theta2,theta3\n";
        for (int i = 0; i < count; ++i) {
            const RotationSpec r = h.next();
            out.stream() << format_number(r.theta1()) << ',' << format_number(r.theta2()) << ','
                         << format_number(r.theta3()) << '\n';
        }
    }
    return kExitOk;
}

void add_grid_flags(CLI::App* cmd, Flags& f, bool thetas, bool state) {
    cmd->add_option("--p", f.p, "noise strength: start:stop:steps or a value");
    if (state) {
        cmd->add_option("--alpha", f.alpha, "input polar angle: start:stop:steps or a value");
        cmd->add_option("--beta", f.beta, "input phase: start:stop:steps or a value");
    }
    if (thetas) {
        cmd->add_option("--theta1", f.theta1, "first Euler angle");
        cmd->add_option("--theta2", f.theta2, "second Euler angle");
        cmd->add_option("--theta3", f.theta3, "third Euler angle");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence of a four-qubit cluster-state logical rotation"};
    app.require_subcommand(1);
    Flags f;

    const auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", f.config, "JSON config file; command-line flags take precedence");
        cmd->add_option("--out", f.out, "output file (default: standard output)");
        cmd->add_option("--format", f.format, "csv | json");
    };

    auto* sweep = app.add_subcommand("sweep", "evaluate a metric over a parameter grid");
    common(sweep);
    sweep->add_option("--channel", f.channel, "dephasing | amp | depol");
    sweep->add_option("--metric", f.metric, "negativity | witness | cluster_fidelity | gate_fidelity | kraus_amplitudes | f1 | c1");
    sweep->add_option("--subset", f.subset, "qubits on one side of the cut, e.g. 1,3");
    add_grid_flags(sweep, f, true, true);
    sweep->add_option("--seed", f.seed, "recorded seed");
    sweep->add_option("--jobs", f.jobs, "worker threads");

    auto* esd = app.add_subcommand("esd", "find the noise strength at which a negativity vanishes");
    common(esd);
    esd->add_option("--channel", f.channel, "dephasing | amp | depol");
    esd->add_option("--subset", f.subset, "qubits on one side of the cut, e.g. 1,3");
    esd->add_option("--alpha", f.alpha, "input polar angle (default pi/4)");
    esd->add_option("--beta", f.beta, "input phase (default 0)");
    esd->add_option("--tol", f.tol, "bisection tolerance (default 1e-6)");

    auto* superop = app.add_subcommand("superop", "dump the logical superoperator");
    common(superop);
    superop->add_option("--channel", f.channel, "dephasing | amp | depol");
    add_grid_flags(superop, f, true, false);
    superop->add_option("--source", f.source, "reconstructed | closed-form | both");

    auto* kraus = app.add_subcommand("kraus", "Choi matrix and ranked Kraus decomposition of the logical map");
    common(kraus);
    kraus->add_option("--channel", f.channel, "dephasing | amp | depol");
    add_grid_flags(kraus, f, true, false);

    auto* val = app.add_subcommand("validate", "run the acceptance criteria");
    val->add_option("--criterion", f.criterion, "run a single criterion (1-8)");
    val->add_option("--out", f.out, "output file (default: standard output)");
    val->add_option("--format", f.format, "csv (text report) | json");

    auto* haar = app.add_subcommand("haar-sample", "draw Haar-random Euler angles");
    common(haar);
    haar->add_option("--seed", f.seed, "generator seed (default 0)");
    haar->add_option("--count", f.count, "number of samples (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitPrecondition;
    }

    try {
        if (*sweep) return cmd_sweep(f);
        if (*esd) return cmd_esd(f);
        if (*superop) return cmd_superop(f);
        if (*kraus) return cmd_kraus(f);
        if (*val) return cmd_validate(f);
        if (*haar) return cmd_haar(f);
    } catch (const std::invalid_argument& e) {
        std::cerr << "clusterq: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const std::out_of_range& e) {
        std::cerr << "clusterq: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const CalibrationError& e) {
        std::cerr << "clusterq: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "clusterq: " << e.what() << '\n';
        return kExitPrecondition;
    }
    return kExitPrecondition;
}
