#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "snn/aer.hpp"
#include "snn/connectivity.hpp"
#include "snn/model.hpp"
#include "snn/transport.hpp"

namespace snn {

struct SimConfig {
    NetworkSpec spec;
    ExternalDrive drive = default_external_drive();
    NeuronParams excitatory = default_excitatory_params();
    NeuronParams inhibitory = default_inhibitory_params();
    std::uint64_t duration_ms = 1000;
    std::uint32_t step_ms = 1;
    std::uint32_t n_ranks = 1;
    bool record_raster = true;
    bool record_step_profiles = true;

    void validate() const;
    std::uint64_t n_steps() const noexcept { return duration_ms / step_ms; }
};

/// Calibrated defaults: n neurons, 1125 fan-out, 400 external synapses at 3 Hz.
SimConfig default_sim_config(std::uint32_t n_neurons, std::uint64_t seed = 1);

/// Wall-clock split of one step (or a whole run), in seconds.
struct StepProfile {
    double computation = 0.0;
    double communication = 0.0;
    double barrier = 0.0;
    double other = 0.0;

    double total() const noexcept { return computation + communication + barrier + other; }
    StepProfile& operator+=(const StepProfile& o) noexcept {
        computation += o.computation;
        communication += o.communication;
        barrier += o.barrier;
        other += o.other;
        return *this;
    }
};

struct RunReport {
    std::uint32_t rank = 0;
    std::uint32_t n_ranks = 1;
    std::uint32_t n_neurons = 0;        // whole network
    std::uint32_t owned_neurons = 0;    // this rank (all ranks for a merged report)
    std::uint32_t fan_out = 0;
    std::uint64_t duration_ms = 0;
    std::uint64_t seed = 0;

    double setup_seconds = 0.0;   // synapse table construction, outside wall_clock
    double wall_clock = 0.0;      // simulation loop, seconds
    StepProfile phases;           // totals; other = wall_clock - the three phases
    std::vector<StepProfile> steps;
    std::vector<double> step_wall;  // measured wall-clock of each step

    std::uint64_t total_spikes = 0;
    std::uint64_t recurrent_events = 0;  // sender side: spikes * fan_out
    std::uint64_t received_events = 0;   // receiver side: synapses scheduled
    std::uint64_t delivered_events = 0;  // receiver side: impulses drained within the run
    std::uint64_t external_events = 0;
    double mean_rate_hz = 0.0;
    bool real_time = false;

    TransportStats transport;
    std::vector<AxonalSpike> raster;  // sorted by (step, source)
};

/// Runs one rank to completion. Exchange and barrier failures are rethrown
/// as StepError carrying the step index.
RunReport run(const SimConfig& config, int rank, Transport& transport);

/// Runs every rank on its own thread over the in-process transport and
/// returns the per-rank reports in rank order.
std::vector<RunReport> run_inproc(const SimConfig& config,
                                  std::chrono::milliseconds timeout = kDefaultTransportTimeout);

/// Same, over loopback TCP sockets (one listener per rank on 127.0.0.1).
std::vector<RunReport> run_loopback_sockets(const SimConfig& config,
                                            std::chrono::milliseconds timeout = kDefaultTransportTimeout);

/// Whole-network view of per-rank reports: counts summed, wall-clock and
/// phase totals taken from the slowest rank, rasters merged.
RunReport merge_reports(const std::vector<RunReport>& reports);

struct EventCounts {
    std::uint64_t recurrent = 0;
    std::uint64_t external = 0;
};

EventCounts count_events(const RunReport& report, const NetworkSpec& spec) noexcept;

struct ProfileSummary {
    std::uint32_t n_neurons = 0;
    std::uint64_t synapses = 0;
    std::uint32_t n_ranks = 0;
    double wall_clock = 0.0;  // max over ranks
    double computation = 0.0; // fractions, averaged over ranks
    double communication = 0.0;
    double barrier = 0.0;
    double other = 0.0;
    bool real_time = false;
    double simulated_seconds = 0.0;
};

ProfileSummary profile_summary(const std::vector<RunReport>& reports);

/// Table-shaped text: neurons, synapses, procs, wall-clock and phase percentages.
std::string render_profile_table(const std::vector<ProfileSummary>& columns);

}  // namespace snn
