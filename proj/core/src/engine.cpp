#include "snn/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "snn/delay_queue.hpp"
#include "snn/error.hpp"
#include "snn/inproc_transport.hpp"
#include "snn/rng.hpp"
#include "snn/socket_transport.hpp"

namespace snn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

// Caches propagators for short integer gaps between neuron updates; longer
// gaps build one on the fly with identical arithmetic.
class PropagatorCache {
public:
    PropagatorCache(const NeuronParams& params, std::uint32_t max_gap) : params_(params) {
        cache_.reserve(max_gap + 1);
        for (std::uint32_t gap = 0; gap <= max_gap; ++gap) cache_.emplace_back(params, gap);
    }

    void advance(NeuronState& state, double t) const {
        if (t == state.last_update) return;
        const double gap = t - state.last_update;
        const auto index = static_cast<std::size_t>(gap);
        if (static_cast<double>(index) == gap && index < cache_.size()) {
            cache_[index].apply(state);
        } else {
            Propagator(params_, gap).apply(state);
        }
        state.last_update = t;
    }

private:
    NeuronParams params_;
    std::vector<Propagator> cache_;
};

NeuronState initial_state(NeuronId id, const NeuronParams& params, std::uint64_t seed) {
    CounterRng rng(seed, StreamTag::kInitial, id);
    NeuronState s;
    s.v = params.v_rest + (params.v_theta - params.v_rest) * rng.uniform();
    return s;
}

}  // namespace

void SimConfig::validate() const {
    spec.validate();
    drive.validate();
    excitatory.validate();
    inhibitory.validate();
    if (!excitatory.is_excitatory || inhibitory.is_excitatory) {
        throw ConfigError("population parameter sets have the wrong excitatory flag");
    }
    if (step_ms != 1) throw ConfigError("the exchange step is fixed at 1 ms");
    if (duration_ms % step_ms != 0) throw ConfigError("duration must be a multiple of the step");
    if (n_ranks == 0 || n_ranks > spec.n_neurons) throw ConfigError("n_ranks must lie in [1, n_neurons]");
}

SimConfig default_sim_config(std::uint32_t n_neurons, std::uint64_t seed) {
    SimConfig c;
    c.spec = default_network_spec(n_neurons, seed);
    c.drive = default_external_drive();
    return c;
}

RunReport run(const SimConfig& config, int rank, Transport& transport) {
    config.validate();
    if (transport.n_ranks() != static_cast<int>(config.n_ranks) || transport.rank() != rank) {
        throw ConfigError("transport layout does not match the configuration");
    }
    const NetworkSpec& spec = config.spec;
    const std::uint32_t n_ranks = config.n_ranks;

    RunReport report;
    report.rank = static_cast<std::uint32_t>(rank);
    report.n_ranks = n_ranks;
    report.n_neurons = spec.n_neurons;
    report.fan_out = spec.fan_out;
    report.duration_ms = config.duration_ms;
    report.seed = spec.seed;

    const auto setup_start = Clock::now();
    const Partition part = partition(spec.n_neurons, n_ranks, static_cast<std::uint32_t>(rank));
    report.owned_neurons = part.size();
    const SynapseTable table = build_table(spec, part);

    // Destination ranks of each owned source: the ranks owning any of its targets.
    std::vector<std::vector<std::uint32_t>> destinations(part.size());
    if (n_ranks > 1) {
        for (NeuronId gid = part.lo; gid < part.hi; ++gid) {
            auto& dest = destinations[gid - part.lo];
            for (const auto& syn : outgoing(gid, spec)) {
                const auto owner = owner_of(syn.target, spec.n_neurons, n_ranks);
                if (dest.empty() || dest.back() != owner) dest.push_back(owner);
            }
        }
    }

    const std::uint32_t n_exc = spec.n_excitatory();
    const PropagatorCache exc_prop(config.excitatory, 64);
    const PropagatorCache inh_prop(config.inhibitory, 64);
    std::vector<NeuronState> states(part.size());
    for (NeuronId gid = part.lo; gid < part.hi; ++gid) {
        states[gid - part.lo] =
            initial_state(gid, gid < n_exc ? config.excitatory : config.inhibitory, spec.seed);
    }

    const ExternalDriveSampler external(config.drive, spec.seed);
    DelayQueue queue(spec.d_min, spec.d_max);
    std::vector<std::uint8_t> touched(part.size(), 0);
    std::vector<AxonalSpike> emitted;
    SpikeLists outgoing_lists(n_ranks);
    const std::uint64_t n_steps = config.n_steps();
    if (config.record_step_profiles) {
        report.steps.reserve(n_steps);
        report.step_wall.reserve(n_steps);
    }
    report.setup_seconds = seconds(Clock::now() - setup_start);

    auto touch = [&](std::uint32_t local, double t) -> NeuronState& {
        NeuronState& s = states[local];
        if (!touched[local]) {
            touched[local] = 1;
            (part.lo + local < n_exc ? exc_prop : inh_prop).advance(s, t);
        }
        return s;
    };

    const auto loop_start = Clock::now();
    for (Step step = 0; step < n_steps; ++step) {
        const auto t0 = Clock::now();
        const double now = static_cast<double>(step);

        // Computation: recurrent deliveries in (source, target) order, then
        // external drive, then threshold checks.
        const auto due = queue.drain(step);
        for (const auto& spike : due) {
            const auto source = static_cast<NeuronId>(spike.source);
            const auto delay = static_cast<std::uint32_t>(step - spike.step);
            const double w = table.weight(source);
            for (auto local : table.bucket(source, delay)) {
                NeuronState& s = touch(local, now);
                s = apply_impulse(s, w);
            }
            report.delivered_events += table.bucket(source, delay).size();
        }
        for (std::uint32_t local = 0; local < part.size(); ++local) {
            const auto k = external(part.lo + local, step);
            if (k == 0) continue;
            report.external_events += k;
            NeuronState& s = touch(local, now);
            for (std::uint64_t i = 0; i < k; ++i) s = apply_impulse(s, config.drive.j_ext);
        }
        // Ascending scan so spikes come out sorted by id.
        emitted.clear();
        for (std::uint32_t local = 0; local < part.size(); ++local) {
            if (!touched[local]) continue;
            touched[local] = 0;
            const NeuronId gid = part.lo + local;
            const auto& params = gid < n_exc ? config.excitatory : config.inhibitory;
            if (fire_check(states[local], params, now)) emitted.push_back({gid, step});
        }
        report.total_spikes += emitted.size();
        if (config.record_raster) report.raster.insert(report.raster.end(), emitted.begin(), emitted.end());
        const auto t1 = Clock::now();

        // Communication.
        for (auto& list : outgoing_lists) list.clear();
        if (n_ranks == 1) {
            outgoing_lists[0] = emitted;
        } else {
            for (const auto& spike : emitted) {
                for (auto dest : destinations[spike.source - part.lo]) outgoing_lists[dest].push_back(spike);
            }
        }
        SpikeLists incoming;
        try {
            incoming = all_to_all(transport, step, outgoing_lists);
        } catch (const Error& e) {
            throw StepError(step, e.what());
        }
        for (const auto& list : incoming) {
            for (const auto& spike : list) {
                if (spike.source >= spec.n_neurons) throw StepError(step, "received spike from unknown neuron");
                const auto source = static_cast<NeuronId>(spike.source);
                std::uint32_t mask = table.delay_mask(source);
                while (mask != 0) {
                    const auto bit = static_cast<std::uint32_t>(__builtin_ctz(mask));
                    mask &= mask - 1;
                    const std::uint32_t delay = spec.d_min + bit;
                    queue.schedule(spike, delay);
                    report.received_events += table.bucket(source, delay).size();
                }
            }
        }
        const auto t3 = Clock::now();

        // Synchronization.
        try {
            transport.barrier(step);
        } catch (const Error& e) {
            throw StepError(step, e.what());
        }
        const auto t4 = Clock::now();
        // Independent read of the step end; the gap to t4 is all "other" holds.
        const auto t5 = config.record_step_profiles ? Clock::now() : t4;

        StepProfile p;
        p.computation = seconds(t1 - t0);
        p.communication = seconds(t3 - t1);
        p.barrier = seconds(t4 - t3);
        report.phases.computation += p.computation;
        report.phases.communication += p.communication;
        report.phases.barrier += p.barrier;
        if (config.record_step_profiles) {
            const double step_wall = seconds(t5 - t0);
            p.other = step_wall - (p.computation + p.communication + p.barrier);
            report.steps.push_back(p);
            report.step_wall.push_back(step_wall);
        }
    }
    report.wall_clock = seconds(Clock::now() - loop_start);
    report.phases.other =
        std::max(0.0, report.wall_clock - (report.phases.computation + report.phases.communication +
                                           report.phases.barrier));

    report.recurrent_events = report.total_spikes * spec.fan_out;
    report.mean_rate_hz = (part.size() == 0 || config.duration_ms == 0)
                              ? 0.0
                              : static_cast<double>(report.total_spikes) /
                                    (static_cast<double>(part.size()) * config.duration_ms * 1e-3);
    report.real_time = report.wall_clock <= static_cast<double>(config.duration_ms) * 1e-3;
    report.transport = transport.stats();
    return report;
}

namespace {

template <typename MakeTransport>
std::vector<RunReport> run_threads(const SimConfig& config, MakeTransport make_transport) {
    config.validate();
    const auto n = static_cast<int>(config.n_ranks);
    std::vector<RunReport> reports(n);
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (int r = 0; r < n; ++r) {
        threads.emplace_back([&, r] {
            try {
                auto transport = make_transport(r);
                reports[r] = run(config, r, *transport);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    // Report the root cause: a rank whose own work failed, not one that
    // merely saw its peer disappear.
    std::exception_ptr first;
    for (auto& e : errors) {
        if (!e) continue;
        if (!first) first = e;
        try {
            std::rethrow_exception(e);
        } catch (const StepError& se) {
            const std::string what = se.what();
            if (what.find("disconnected") == std::string::npos && what.find("is gone") == std::string::npos) {
                first = e;
                break;
            }
        } catch (...) {
            first = e;
            break;
        }
    }
    if (first) std::rethrow_exception(first);
    return reports;
}

}  // namespace

std::vector<RunReport> run_inproc(const SimConfig& config, std::chrono::milliseconds timeout) {
    config.validate();
    InprocHub hub(static_cast<int>(config.n_ranks), timeout);
    return run_threads(config, [&](int r) { return hub.endpoint(r); });
}

std::vector<RunReport> run_loopback_sockets(const SimConfig& config, std::chrono::milliseconds timeout) {
    config.validate();
    std::vector<SocketListener> listeners;
    std::vector<PeerAddress> peers;
    for (std::uint32_t r = 0; r < config.n_ranks; ++r) {
        listeners.emplace_back(0, "127.0.0.1");
        peers.push_back({"127.0.0.1", listeners.back().port()});
    }
    return run_threads(config, [&](int r) -> std::unique_ptr<Transport> {
        return SocketTransport::connect(r, peers, std::move(listeners[r]), timeout);
    });
}

RunReport merge_reports(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw ContractError("no reports to merge");
    RunReport merged;
    const auto& first = reports.front();
    merged.rank = 0;
    merged.n_ranks = first.n_ranks;
    merged.n_neurons = first.n_neurons;
    merged.fan_out = first.fan_out;
    merged.duration_ms = first.duration_ms;
    merged.seed = first.seed;

    const RunReport* slowest = &first;
    for (const auto& r : reports) {
        merged.owned_neurons += r.owned_neurons;
        merged.total_spikes += r.total_spikes;
        merged.recurrent_events += r.recurrent_events;
        merged.received_events += r.received_events;
        merged.delivered_events += r.delivered_events;
        merged.external_events += r.external_events;
        merged.setup_seconds = std::max(merged.setup_seconds, r.setup_seconds);
        merged.transport.messages_sent += r.transport.messages_sent;
        merged.transport.bytes_sent += r.transport.bytes_sent;
        merged.transport.messages_received += r.transport.messages_received;
        merged.transport.bytes_received += r.transport.bytes_received;
        merged.raster.insert(merged.raster.end(), r.raster.begin(), r.raster.end());
        if (r.wall_clock > slowest->wall_clock) slowest = &r;
    }
    merged.wall_clock = slowest->wall_clock;
    merged.phases = slowest->phases;
    std::sort(merged.raster.begin(), merged.raster.end(), [](const AxonalSpike& a, const AxonalSpike& b) {
        return a.step != b.step ? a.step < b.step : a.source < b.source;
    });
    merged.mean_rate_hz = (merged.owned_neurons == 0 || merged.duration_ms == 0)
                              ? 0.0
                              : static_cast<double>(merged.total_spikes) /
                                    (static_cast<double>(merged.owned_neurons) * merged.duration_ms * 1e-3);
    merged.real_time = merged.wall_clock <= static_cast<double>(merged.duration_ms) * 1e-3;
    return merged;
}

EventCounts count_events(const RunReport& report, const NetworkSpec& spec) noexcept {
    return {report.total_spikes * spec.fan_out, report.external_events};
}

ProfileSummary profile_summary(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw ContractError("no reports to summarize");
    ProfileSummary s;
    s.n_neurons = reports.front().n_neurons;
    s.synapses = static_cast<std::uint64_t>(reports.front().n_neurons) * reports.front().fan_out;
    s.n_ranks = static_cast<std::uint32_t>(reports.size());
    s.simulated_seconds = static_cast<double>(reports.front().duration_ms) * 1e-3;
    for (const auto& r : reports) {
        s.wall_clock = std::max(s.wall_clock, r.wall_clock);
        if (r.wall_clock > 0.0) {
            s.computation += r.phases.computation / r.wall_clock;
            s.communication += r.phases.communication / r.wall_clock;
            s.barrier += r.phases.barrier / r.wall_clock;
            s.other += r.phases.other / r.wall_clock;
        }
    }
    const double n = static_cast<double>(reports.size());
    s.computation /= n;
    s.communication /= n;
    s.barrier /= n;
    s.other /= n;
    s.real_time = s.wall_clock <= s.simulated_seconds;
    return s;
}

std::string render_profile_table(const std::vector<ProfileSummary>& columns) {
    std::ostringstream out;
    char buf[64];
    auto row = [&](const char* label, auto cell) {
        std::snprintf(buf, sizeof(buf), "%-16s", label);
        out << buf;
        for (const auto& c : columns) {
            out << " | " << cell(c);
        }
        out << '\n';
    };
    auto fmt = [&](const char* pattern, double v) {
        std::snprintf(buf, sizeof(buf), pattern, v);
        return std::string(buf);
    };
    row("Neurons", [&](const ProfileSummary& c) { return fmt("%10.0f", c.n_neurons); });
    row("Synapses", [&](const ProfileSummary& c) { return fmt("%10.2E", static_cast<double>(c.synapses)); });
    row("Procs", [&](const ProfileSummary& c) { return fmt("%10.0f", c.n_ranks); });
    row("Wall-clock (s)", [&](const ProfileSummary& c) { return fmt("%10.3f", c.wall_clock); });
    row("Computation", [&](const ProfileSummary& c) { return fmt("%9.1f%%", 100.0 * c.computation); });
    row("Communication", [&](const ProfileSummary& c) { return fmt("%9.1f%%", 100.0 * c.communication); });
    row("Barrier", [&](const ProfileSummary& c) { return fmt("%9.1f%%", 100.0 * c.barrier); });
    row("Other", [&](const ProfileSummary& c) { return fmt("%9.1f%%", 100.0 * c.other); });
    return out.str();
}

}  // namespace snn
