#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "snn/model.hpp"

namespace snn {

struct NetworkSpec {
    std::uint32_t n_neurons = 2048;
    double frac_excitatory = 0.8;
    std::uint32_t fan_out = 1125;
    double j_exc = 0.2;  // mV, calibrated jointly with the external drive
    double g_rel = 5.0;  // inhibitory weight = -g_rel * j_exc
    std::uint32_t d_min = 1;
    std::uint32_t d_max = 16;
    std::uint64_t seed = 1;

    void validate() const;

    /// Excitatory ids are [0, n_excitatory()).
    std::uint32_t n_excitatory() const noexcept;
    bool is_excitatory(NeuronId id) const noexcept { return id < n_excitatory(); }
    double weight_of(NeuronId source) const noexcept {
        return is_excitatory(source) ? j_exc : -g_rel * j_exc;
    }
    std::uint32_t n_delays() const noexcept { return d_max - d_min + 1; }
    std::uint64_t total_synapses() const noexcept {
        return static_cast<std::uint64_t>(n_neurons) * fan_out;
    }
};

/// Default spec for a network of n neurons (fan-out, weights and delays
/// do not depend on n).
NetworkSpec default_network_spec(std::uint32_t n_neurons, std::uint64_t seed = 1);

struct Synapse {
    NeuronId target;
    double weight;
    std::uint32_t delay;

    friend bool operator==(const Synapse&, const Synapse&) = default;
};

/// The fan_out synapses projected by `source`, sorted by target id.
/// Deterministic in (spec.seed, source). Throws ConfigError on a bad spec.
std::vector<Synapse> outgoing(NeuronId source, const NetworkSpec& spec);

struct Partition {
    std::uint32_t n_ranks = 1;
    std::uint32_t rank = 0;
    NeuronId lo = 0;  // owned ids are [lo, hi)
    NeuronId hi = 0;

    std::uint32_t size() const noexcept { return hi - lo; }
    bool owns(NeuronId id) const noexcept { return id >= lo && id < hi; }
};

/// Contiguous block decomposition; the first n_neurons % n_ranks ranks get
/// one extra neuron.
Partition partition(std::uint32_t n_neurons, std::uint32_t n_ranks, std::uint32_t rank);

/// Rank owning global id `id` under the same decomposition.
std::uint32_t owner_of(NeuronId id, std::uint32_t n_neurons, std::uint32_t n_ranks) noexcept;

/// Receiver-side synapse storage for one rank. Buckets are keyed by
/// (source, delay) and hold local target ids in ascending order. Weights are
/// homogeneous per source population, so they are derived from the spec
/// rather than stored per entry.
class SynapseTable {
public:
    SynapseTable() = default;

    const NetworkSpec& spec() const noexcept { return spec_; }
    const Partition& part() const noexcept { return part_; }

    /// Local target ids (global id - part().lo) for the (source, delay) bucket.
    std::span<const std::uint32_t> bucket(NeuronId source, std::uint32_t delay) const noexcept;

    /// All local targets of `source` across delays.
    std::span<const std::uint32_t> targets_of(NeuronId source) const noexcept;

    /// Bitmask over delays (bit d - d_min) with a non-empty bucket.
    std::uint32_t delay_mask(NeuronId source) const noexcept { return delay_mask_[source]; }

    double weight(NeuronId source) const noexcept { return spec_.weight_of(source); }
    std::uint64_t size() const noexcept { return targets_.size(); }

    /// Every entry as a global-id Synapse triple together with its source,
    /// ordered by (source, delay, target).
    struct Entry {
        NeuronId source;
        Synapse synapse;
        friend bool operator==(const Entry&, const Entry&) = default;
        friend auto operator<=>(const Entry& a, const Entry& b) {
            if (auto c = a.source <=> b.source; c != 0) return c;
            if (auto c = a.synapse.delay <=> b.synapse.delay; c != 0) return c;
            return a.synapse.target <=> b.synapse.target;
        }
    };
    std::vector<Entry> entries() const;

    friend SynapseTable build_table(const NetworkSpec& spec, const Partition& part);
    friend SynapseTable load_table(const std::filesystem::path& path);

private:
    std::size_t bucket_index(NeuronId source, std::uint32_t delay) const noexcept {
        return static_cast<std::size_t>(source) * spec_.n_delays() + (delay - spec_.d_min);
    }

    NetworkSpec spec_;
    Partition part_;
    std::vector<std::uint64_t> offsets_;  // n_neurons * n_delays + 1
    std::vector<std::uint32_t> targets_;
    std::vector<std::uint32_t> delay_mask_;
};

/// Replays every source's outgoing stream and keeps the synapses whose
/// target this rank owns.
SynapseTable build_table(const NetworkSpec& spec, const Partition& part);

/// Binary dump: "SYN1", u32 version, u32 n_neurons, u32 fan_out, u32 lo,
/// u32 hi, u32 d_min, u32 d_max, u64 seed, f64 j_exc, f64 g_rel,
/// f64 frac_excitatory, u32 n_ranks, u32 rank, u64 entry count, then per entry u32 source,
/// u32 target, u32 delay, f64 weight. Little-endian throughout.
void dump_table(const SynapseTable& table, const std::filesystem::path& path);
SynapseTable load_table(const std::filesystem::path& path);

}  // namespace snn
