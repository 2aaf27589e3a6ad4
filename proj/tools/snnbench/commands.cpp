#include "snnbench/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "snn/calibration.hpp"
#include "snn/energy.hpp"
#include "snn/engine.hpp"
#include "snn/error.hpp"
#include "snn/report_io.hpp"
#include "snn/socket_transport.hpp"

namespace snn::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << text << '\n';
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct NetworkOverrides {
    std::optional<double> j_ext;
    std::optional<double> j_exc;
    std::optional<double> g_c;
    std::optional<double> g_rel;

    void add_to(CLI::App& app) {
        app.add_option("--j-ext", j_ext, "External efficacy (mV), overrides the calibrated default");
        app.add_option("--j-exc", j_exc, "Excitatory efficacy (mV)");
        app.add_option("--g-c", g_c, "Adaptation coupling of excitatory neurons (mV/ms per unit)");
        app.add_option("--g-rel", g_rel, "Inhibitory/excitatory weight ratio");
    }

    void apply(SimConfig& c) const {
        if (j_ext) c.drive.j_ext = *j_ext;
        if (j_exc) c.spec.j_exc = *j_exc;
        if (g_c) c.excitatory.g_c = *g_c;
        if (g_rel) c.spec.g_rel = *g_rel;
    }
};

void print_summary(std::ostream& out, const RunReport& merged, const ProfileSummary& profile) {
    out << "neurons          " << merged.n_neurons << '\n'
        << "ranks            " << merged.n_ranks << '\n'
        << "simulated_s      " << fixed(merged.duration_ms * 1e-3, 3) << '\n'
        << "wall_clock_s     " << fixed(merged.wall_clock, 3) << '\n'
        << "setup_s          " << fixed(merged.setup_seconds, 3) << '\n'
        << "real_time        " << (merged.real_time ? "yes" : "no") << '\n'
        << "total_spikes     " << merged.total_spikes << '\n'
        << "mean_rate_hz     " << fixed(merged.mean_rate_hz, 3) << '\n'
        << "recurrent_events " << merged.recurrent_events << '\n'
        << "external_events  " << merged.external_events << '\n'
        << "computation      " << fixed(100.0 * profile.computation, 1) << "%\n"
        << "communication    " << fixed(100.0 * profile.communication, 1) << "%\n"
        << "barrier          " << fixed(100.0 * profile.barrier, 1) << "%\n"
        << "other            " << fixed(100.0 * profile.other, 1) << "%\n";
}

std::string summary_json(const RunReport& merged, const ProfileSummary& p) {
    auto j = nlohmann::json::parse(report_to_json(merged));
    j["profile"] = {{"wall_clock_s", p.wall_clock},     {"computation", p.computation},
                    {"communication", p.communication}, {"barrier", p.barrier},
                    {"other", p.other},                 {"real_time", p.real_time}};
    return j.dump(2);
}

// ---------------------------------------------------------------- run

struct RunOptions {
    std::uint32_t neurons = 2048;
    std::uint32_t ranks = 1;
    int rank = -1;
    std::uint64_t duration_ms = 1000;
    std::uint64_t seed = 1;
    std::string transport = "inproc";
    std::string peers;
    std::string out_dir;
    bool raster = false;
    bool steps = false;
    NetworkOverrides overrides;
};

int cmd_run(const RunOptions& o, std::ostream& out) {
    SimConfig config = default_sim_config(o.neurons, o.seed);
    config.duration_ms = o.duration_ms;
    config.n_ranks = o.ranks;
    config.record_raster = o.raster;
    config.record_step_profiles = o.steps;
    o.overrides.apply(config);
    config.validate();

    std::vector<RunReport> reports;
    if (o.transport == "inproc") {
        if (o.rank >= 0) throw ConfigError("--rank only applies to the socket transport");
        reports = run_inproc(config);
    } else {
        if (o.peers.empty()) throw ConfigError("the socket transport needs --peers <file>");
        const auto peers = load_peers(o.peers);
        if (peers.size() != config.n_ranks) {
            throw ConfigError("peer list has " + std::to_string(peers.size()) + " entries but --ranks is " +
                              std::to_string(config.n_ranks));
        }
        if (o.rank >= 0) {
            auto transport = SocketTransport::connect(o.rank, peers);
            reports.push_back(run(config, o.rank, *transport));
        } else {
            std::vector<SocketListener> listeners;
            for (const auto& p : peers) listeners.emplace_back(p.port);
            std::vector<RunReport> all(config.n_ranks);
            std::vector<std::exception_ptr> errors(config.n_ranks);
            std::vector<std::thread> threads;
            for (std::uint32_t r = 0; r < config.n_ranks; ++r) {
                threads.emplace_back([&, r] {
                    try {
                        auto t = SocketTransport::connect(static_cast<int>(r), peers, std::move(listeners[r]));
                        all[r] = run(config, static_cast<int>(r), *t);
                    } catch (...) {
                        errors[r] = std::current_exception();
                    }
                });
            }
            for (auto& t : threads) t.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
            reports = std::move(all);
        }
    }

    const RunReport merged = merge_reports(reports);
    const ProfileSummary profile = profile_summary(reports);
    print_summary(out, merged, profile);

    if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
        for (const auto& r : reports) {
            write_file(fs::path(o.out_dir) / ("rank_" + std::to_string(r.rank) + ".json"),
                       report_to_json(r, o.steps));
        }
        if (reports.size() == config.n_ranks) {
            write_file(fs::path(o.out_dir) / "summary.json", summary_json(merged, profile));
        }
        if (o.raster) {
            const auto name = reports.size() == config.n_ranks
                                  ? std::string("raster.aer")
                                  : "raster_rank_" + std::to_string(reports.front().rank) + ".aer";
            write_raster(fs::path(o.out_dir) / name, merged.raster);
        }
    }
    return 0;
}

// ---------------------------------------------------------------- summarize

int cmd_summarize(const std::string& dir, std::ostream& out) {
    std::vector<RunReport> reports;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("rank_", 0) == 0 && entry.path().extension() == ".json") {
            reports.push_back(report_from_json(read_file(entry.path())));
        }
    }
    if (reports.empty()) throw Error("no rank_*.json reports in " + dir);
    std::sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) { return a.rank < b.rank; });
    const auto merged = merge_reports(reports);
    const auto profile = profile_summary(reports);
    print_summary(out, merged, profile);
    out << '\n' << render_profile_table({profile});
    return 0;
}

// ---------------------------------------------------------------- energy

struct EnergyOptions {
    std::string trace;
    std::string pause = "0:5";
    std::optional<double> start;
    std::optional<double> end;
    double k_sigma = 5.0;
    std::string report;
    std::optional<double> recurrent_events;
    std::optional<double> external_events;
    std::string table;
    std::string out;
    std::string mode = "unknown";
};

int cmd_energy(const EnergyOptions& o, std::ostream& out) {
    auto trace = energy::load_trace(o.trace);
    trace.mode = o.mode == "ac" ? energy::SamplingMode::kAC
                 : o.mode == "dc" ? energy::SamplingMode::kDC
                                  : energy::SamplingMode::kUnknown;
    energy::AnalysisOptions a;
    a.pause = energy::parse_window(o.pause);
    a.start = o.start;
    a.end = o.end;
    a.k_sigma = o.k_sigma;
    if (!o.report.empty()) {
        const auto j = nlohmann::json::parse(read_file(o.report));
        a.recurrent_events = j.at("recurrent_events").get<double>();
        a.external_events = j.at("external_events").get<double>();
    }
    if (o.recurrent_events) a.recurrent_events = *o.recurrent_events;
    if (o.external_events) a.external_events = *o.external_events;

    const auto report = energy::analyze(trace, a);
    const auto text = energy::report_to_json(report);
    if (o.out.empty()) {
        out << text << '\n';
    } else {
        write_file(o.out, text);
        out << "energy_to_solution_j " << fixed(report.energy_j, 3) << '\n';
    }

    if (!o.table.empty()) {
        for (const auto& c : energy::check_table(energy::parse_table(read_file(o.table)))) {
            out << (c.consistent ? "consistent   " : "INCONSISTENT ") << c.row.label << ": "
                << fixed(c.row.time_s, 3) << " s x " << fixed(c.row.power_w, 3) << " W = "
                << fixed(c.product_j, 3) << " J, stated " << fixed(c.row.energy_j, 3) << " J\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
    std::uint32_t neurons = 2048;
    std::uint64_t duration_ms = 10000;
    std::uint64_t seed = 1;
    double lo = 0.0;
    double hi = 2.0;
    int iterations = 30;
    NetworkOverrides overrides;
};

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
    SimConfig config = default_sim_config(o.neurons, o.seed);
    config.duration_ms = o.duration_ms;
    o.overrides.apply(config);
    const auto result = calibrate_external_drive(config, o.lo, o.hi, 3.0, 3.4, o.iterations);
    for (const auto& h : result.history) {
        out << "j_ext " << fixed(h.j_ext, 6) << " -> " << fixed(h.rate_hz, 4) << " Hz\n";
    }
    out << (result.converged ? "converged" : "not converged") << ": j_ext = " << fixed(result.j_ext, 6)
        << " mV, rate = " << fixed(result.rate_hz, 4) << " Hz\n";
    return result.converged ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------- scale

void SweepSpec::validate() const {
    if (sizes.empty()) throw ConfigError("sweep needs at least one network size");
    if (ranks.empty()) throw ConfigError("sweep needs at least one rank count");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (transport != "inproc" && transport != "socket") throw ConfigError("unknown transport " + transport);
}

const std::vector<std::string_view>& scale_columns() {
    static const std::vector<std::string_view> columns = {
        "neurons",          "ranks",           "repetition",        "transport",
        "duration_ms",      "wall_clock_s",    "computation_frac",  "communication_frac",
        "barrier_frac",     "other_frac",      "real_time_threshold_s", "real_time",
        "total_spikes",     "mean_rate_hz",    "messages",          "bytes_per_message",
        "status"};
    return columns;
}

std::string scale_csv_header() {
    std::string h;
    for (const auto& c : scale_columns()) {
        if (!h.empty()) h += ',';
        h += c;
    }
    return h;
}

std::string format_scale_row(const ScaleRow& r) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    std::ostringstream s;
    s << r.neurons << ',' << r.ranks << ',' << r.repetition << ',' << r.transport << ',' << r.duration_ms << ','
      << fixed(r.wall_clock_s, 3) << ',' << fixed(r.computation, 4) << ',' << fixed(r.communication, 4) << ','
      << fixed(r.barrier, 4) << ',' << fixed(r.other, 4) << ',' << fixed(r.duration_ms * 1e-3, 3) << ','
      << (r.real_time ? 1 : 0) << ',' << r.total_spikes << ',' << fixed(r.mean_rate_hz, 3) << ','
      << r.messages << ',' << fixed(r.bytes_per_message, 3) << ',' << status;
    return s.str();
}

std::vector<ScaleRow> run_sweep(const SweepSpec& sweep, std::ostream* progress) {
    sweep.validate();
    std::vector<ScaleRow> rows;
    for (auto size : sweep.sizes) {
        for (auto ranks : sweep.ranks) {
            for (int rep = 0; rep < sweep.repetitions; ++rep) {
                ScaleRow row;
                row.neurons = size;
                row.ranks = ranks;
                row.repetition = rep;
                row.transport = sweep.transport;
                row.duration_ms = sweep.duration_ms;
                try {
                    SimConfig config = default_sim_config(size, sweep.seed);
                    config.duration_ms = sweep.duration_ms;
                    config.n_ranks = ranks;
                    config.record_raster = false;
                    config.record_step_profiles = false;
                    const auto reports =
                        sweep.transport == "socket" ? run_loopback_sockets(config) : run_inproc(config);
                    const auto merged = merge_reports(reports);
                    const auto p = profile_summary(reports);
                    row.wall_clock_s = p.wall_clock;
                    row.computation = p.computation;
                    row.communication = p.communication;
                    row.barrier = p.barrier;
                    row.other = p.other;
                    row.real_time = p.real_time;
                    row.total_spikes = merged.total_spikes;
                    row.mean_rate_hz = merged.mean_rate_hz;
                    row.messages = merged.transport.messages_sent;
                    row.bytes_per_message = merged.transport.messages_sent == 0
                                                ? 0.0
                                                : static_cast<double>(merged.transport.bytes_sent) /
                                                      static_cast<double>(merged.transport.messages_sent);
                } catch (const std::exception& e) {
                    row.status = std::string("error: ") + e.what();
                }
                if (progress) *progress << format_scale_row(row) << '\n';
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributed spiking network simulator and benchmark harness", "snnbench"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Simulate one network and report timings and activity");
    run_cmd->add_option("--neurons", run_opts.neurons, "Network size")->check(CLI::PositiveNumber);
    run_cmd->add_option("--ranks", run_opts.ranks, "Number of ranks")->check(CLI::PositiveNumber);
    run_cmd->add_option("--rank", run_opts.rank, "This process's rank (socket transport only)");
    run_cmd->add_option("--duration-ms", run_opts.duration_ms, "Simulated time in ms");
    run_cmd->add_option("--seed", run_opts.seed, "Global seed");
    run_cmd->add_option("--transport", run_opts.transport)->check(CLI::IsMember({"inproc", "socket"}));
    run_cmd->add_option("--peers", run_opts.peers, "Peer list, one host:port per rank")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run_opts.out_dir, "Directory for reports and raster");
    run_cmd->add_flag("--raster", run_opts.raster, "Record and write the spike raster");
    run_cmd->add_flag("--steps", run_opts.steps, "Include per-step profiles in rank reports");
    run_opts.overrides.add_to(*run_cmd);

    SweepSpec sweep;
    std::string scale_out;
    auto* scale_cmd = app.add_subcommand("scale", "Strong-scaling sweep written as CSV");
    scale_cmd->add_option("--neurons", sweep.sizes, "Network sizes")->delimiter(',')->required();
    scale_cmd->add_option("--ranks", sweep.ranks, "Rank counts")->delimiter(',')->required();
    scale_cmd->add_option("--repetitions", sweep.repetitions);
    scale_cmd->add_option("--duration-ms", sweep.duration_ms);
    scale_cmd->add_option("--seed", sweep.seed);
    scale_cmd->add_option("--transport", sweep.transport)->check(CLI::IsMember({"inproc", "socket"}));
    scale_cmd->add_option("--out", scale_out, "CSV output path (stdout if omitted)");

    EnergyOptions energy_opts;
    auto* energy_cmd = app.add_subcommand("energy", "Energy-to-solution from a power trace");
    energy_cmd->add_option("--trace", energy_opts.trace, "CSV t_seconds,watts")->required();
    energy_cmd->add_option("--pause-window", energy_opts.pause, "Idle plateau a:b in seconds");
    energy_cmd->add_option("--start", energy_opts.start, "Run start (s), skips knee detection");
    energy_cmd->add_option("--end", energy_opts.end, "Run end (s)");
    energy_cmd->add_option("--k-sigma", energy_opts.k_sigma, "Knee threshold in baseline sigmas");
    energy_cmd->add_option("--report", energy_opts.report, "summary.json of a run, for event counts");
    energy_cmd->add_option("--recurrent-events", energy_opts.recurrent_events);
    energy_cmd->add_option("--external-events", energy_opts.external_events);
    energy_cmd->add_option("--table", energy_opts.table, "CSV label,time_s,power_w,energy_j to cross-check");
    energy_cmd->add_option("--mode", energy_opts.mode)->check(CLI::IsMember({"ac", "dc", "unknown"}));
    energy_cmd->add_option("--out", energy_opts.out, "EnergyReport output path (stdout if omitted)");

    CalibrateOptions cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Bisect the external efficacy onto 3.0-3.4 Hz");
    cal_cmd->add_option("--neurons", cal.neurons);
    cal_cmd->add_option("--duration-ms", cal.duration_ms);
    cal_cmd->add_option("--seed", cal.seed);
    cal_cmd->add_option("--lo", cal.lo);
    cal_cmd->add_option("--hi", cal.hi);
    cal_cmd->add_option("--iterations", cal.iterations);
    cal.overrides.add_to(*cal_cmd);

    std::string summarize_dir;
    auto* sum_cmd = app.add_subcommand("summarize", "Merge rank_*.json reports from a directory");
    sum_cmd->add_option("--out", summarize_dir, "Directory holding the reports")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts, out);
        if (*scale_cmd) {
            const auto rows = run_sweep(sweep, scale_out.empty() ? nullptr : &err);
            std::ostringstream csv;
            csv << scale_csv_header() << '\n';
            for (const auto& r : rows) csv << format_scale_row(r) << '\n';
            if (scale_out.empty()) {
                out << csv.str();
            } else {
                std::ofstream os(scale_out);
                if (!os) throw Error("cannot write " + scale_out);
                os << csv.str();
            }
            return 0;
        }
        if (*energy_cmd) return cmd_energy(energy_opts, out);
        if (*cal_cmd) return cmd_calibrate(cal, out);
        if (*sum_cmd) return cmd_summarize(summarize_dir, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace snn::cli
