#include "snn/connectivity.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "snn/error.hpp"
#include "snn/rng.hpp"

namespace snn {

namespace {

constexpr std::uint32_t kMaxDelaySlots = 32;

// Floyd's sampling of fan_out distinct values from [0, n_neurons - 1),
// mapped around `source` so it is never chosen. `seen` is an n_neurons-sized
// scratch buffer that is left zeroed on return.
void sample_targets(NeuronId source, const NetworkSpec& spec, CounterRng& rng,
                    std::vector<std::uint8_t>& seen, std::vector<NeuronId>& out) {
    out.clear();
    const std::uint64_t domain = spec.n_neurons - 1;
    for (std::uint64_t j = domain - spec.fan_out; j < domain; ++j) {
        auto pick = rng.below(j + 1);
        if (seen[pick]) pick = j;
        seen[pick] = 1;
        out.push_back(static_cast<NeuronId>(pick));
    }
    for (auto v : out) seen[v] = 0;
    std::sort(out.begin(), out.end());
    for (auto& v : out) {
        if (v >= source) ++v;
    }
}

void outgoing_into(NeuronId source, const NetworkSpec& spec, std::vector<std::uint8_t>& seen,
                   std::vector<NeuronId>& targets, std::vector<std::uint32_t>& delays) {
    CounterRng rng(spec.seed, StreamTag::kSynapses, source);
    sample_targets(source, spec, rng, seen, targets);
    delays.resize(targets.size());
    const std::uint64_t span = spec.n_delays();
    for (auto& d : delays) d = spec.d_min + static_cast<std::uint32_t>(rng.below(span));
}

template <typename T>
void put(std::ostream& os, T value) {
    static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
    std::array<char, sizeof(T)> buf;
    std::memcpy(buf.data(), &value, sizeof(T));
    os.write(buf.data(), buf.size());
}

template <typename T>
T get(std::istream& is) {
    std::array<char, sizeof(T)> buf;
    if (!is.read(buf.data(), buf.size())) throw ParseError(0, "truncated synapse table file");
    T value;
    std::memcpy(&value, buf.data(), sizeof(T));
    return value;
}

constexpr std::array<char, 4> kTableMagic = {'S', 'Y', 'N', '1'};
constexpr std::uint32_t kTableVersion = 1;

}  // namespace

void NetworkSpec::validate() const {
    if (n_neurons == 0) throw ConfigError("n_neurons must be positive");
    if (!(frac_excitatory > 0.0 && frac_excitatory < 1.0)) {
        throw ConfigError("frac_excitatory must lie in (0, 1)");
    }
    if (fan_out >= n_neurons) {
        throw ConfigError("fan_out (" + std::to_string(fan_out) + ") must be below n_neurons (" +
                          std::to_string(n_neurons) + ")");
    }
    if (d_min < 1 || d_min > d_max) throw ConfigError("delays must satisfy 1 <= d_min <= d_max");
    if (d_max - d_min + 1 > kMaxDelaySlots) {
        throw ConfigError("at most " + std::to_string(kMaxDelaySlots) + " distinct delays supported");
    }
    if (g_rel < 0.0) throw ConfigError("g_rel must be non-negative");
}

std::uint32_t NetworkSpec::n_excitatory() const noexcept {
    return static_cast<std::uint32_t>(std::llround(frac_excitatory * n_neurons));
}

NetworkSpec default_network_spec(std::uint32_t n_neurons, std::uint64_t seed) {
    NetworkSpec spec;
    spec.n_neurons = n_neurons;
    spec.seed = seed;
    return spec;
}

std::vector<Synapse> outgoing(NeuronId source, const NetworkSpec& spec) {
    spec.validate();
    if (source >= spec.n_neurons) {
        throw ContractError("source " + std::to_string(source) + " out of range");
    }
    std::vector<std::uint8_t> seen(spec.n_neurons, 0);
    std::vector<NeuronId> targets;
    std::vector<std::uint32_t> delays;
    outgoing_into(source, spec, seen, targets, delays);

    std::vector<Synapse> out;
    out.reserve(targets.size());
    const double w = spec.weight_of(source);
    for (std::size_t i = 0; i < targets.size(); ++i) out.push_back({targets[i], w, delays[i]});
    return out;
}

Partition partition(std::uint32_t n_neurons, std::uint32_t n_ranks, std::uint32_t rank) {
    if (n_ranks == 0 || n_ranks > n_neurons) {
        throw ConfigError("n_ranks (" + std::to_string(n_ranks) + ") must lie in [1, n_neurons]");
    }
    if (rank >= n_ranks) throw ConfigError("rank out of range");
    const std::uint32_t base = n_neurons / n_ranks;
    const std::uint32_t extra = n_neurons % n_ranks;
    Partition p;
    p.n_ranks = n_ranks;
    p.rank = rank;
    p.lo = rank * base + std::min(rank, extra);
    p.hi = p.lo + base + (rank < extra ? 1 : 0);
    return p;
}

std::uint32_t owner_of(NeuronId id, std::uint32_t n_neurons, std::uint32_t n_ranks) noexcept {
    const std::uint32_t base = n_neurons / n_ranks;
    const std::uint32_t extra = n_neurons % n_ranks;
    const std::uint32_t big = extra * (base + 1);
    if (id < big) return id / (base + 1);
    return extra + (id - big) / base;
}

std::span<const std::uint32_t> SynapseTable::bucket(NeuronId source,
                                                    std::uint32_t delay) const noexcept {
    if (source >= spec_.n_neurons || delay < spec_.d_min || delay > spec_.d_max) return {};
    const auto i = bucket_index(source, delay);
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
}

std::span<const std::uint32_t> SynapseTable::targets_of(NeuronId source) const noexcept {
    if (source >= spec_.n_neurons) return {};
    const auto first = bucket_index(source, spec_.d_min);
    const auto last = first + spec_.n_delays();
    return {targets_.data() + offsets_[first], targets_.data() + offsets_[last]};
}

std::vector<SynapseTable::Entry> SynapseTable::entries() const {
    std::vector<Entry> out;
    out.reserve(targets_.size());
    for (NeuronId s = 0; s < spec_.n_neurons; ++s) {
        for (std::uint32_t d = spec_.d_min; d <= spec_.d_max; ++d) {
            for (auto local : bucket(s, d)) {
                out.push_back({s, Synapse{local + part_.lo, weight(s), d}});
            }
        }
    }
    return out;
}

SynapseTable build_table(const NetworkSpec& spec, const Partition& part) {
    spec.validate();
    if (part.hi > spec.n_neurons || part.lo > part.hi) throw ConfigError("partition outside network");

    SynapseTable table;
    table.spec_ = spec;
    table.part_ = part;
    const std::uint32_t n_delays = spec.n_delays();
    table.offsets_.assign(static_cast<std::size_t>(spec.n_neurons) * n_delays + 1, 0);
    table.delay_mask_.assign(spec.n_neurons, 0);
    table.targets_.reserve(static_cast<std::size_t>(
        static_cast<double>(spec.total_synapses()) * part.size() / spec.n_neurons * 1.05 + 64));

    std::vector<std::uint8_t> seen(spec.n_neurons, 0);
    std::vector<NeuronId> targets;
    std::vector<std::uint32_t> delays;
    std::vector<std::uint32_t> counts(n_delays);
    std::vector<std::uint32_t> local(spec.fan_out);

    for (NeuronId s = 0; s < spec.n_neurons; ++s) {
        outgoing_into(s, spec, seen, targets, delays);
        // Owned targets form a contiguous run of the sorted target list.
        const auto first = std::lower_bound(targets.begin(), targets.end(), part.lo) - targets.begin();
        const auto last = std::lower_bound(targets.begin(), targets.end(), part.hi) - targets.begin();

        std::fill(counts.begin(), counts.end(), 0);
        for (auto i = first; i < last; ++i) ++counts[delays[i] - spec.d_min];

        const std::size_t base_index = static_cast<std::size_t>(s) * n_delays;
        std::uint64_t offset = table.targets_.size();
        std::uint32_t mask = 0;
        for (std::uint32_t k = 0; k < n_delays; ++k) {
            table.offsets_[base_index + k] = offset;
            if (counts[k] != 0) mask |= 1u << k;
            offset += counts[k];
        }
        table.offsets_[base_index + n_delays] = offset;
        table.delay_mask_[s] = mask;

        // Counting sort into delay buckets keeps targets ascending within each.
        table.targets_.resize(offset);
        std::vector<std::uint64_t> cursor(table.offsets_.begin() + base_index,
                                          table.offsets_.begin() + base_index + n_delays);
        for (auto i = first; i < last; ++i) {
            table.targets_[cursor[delays[i] - spec.d_min]++] = targets[i] - part.lo;
        }
    }
    table.offsets_.back() = table.targets_.size();
    return table;
}

void dump_table(const SynapseTable& table, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    const auto& spec = table.spec();
    const auto& part = table.part();
    os.write(kTableMagic.data(), kTableMagic.size());
    put<std::uint32_t>(os, kTableVersion);
    put<std::uint32_t>(os, spec.n_neurons);
    put<std::uint32_t>(os, spec.fan_out);
    put<std::uint32_t>(os, part.lo);
    put<std::uint32_t>(os, part.hi);
    put<std::uint32_t>(os, spec.d_min);
    put<std::uint32_t>(os, spec.d_max);
    put<std::uint64_t>(os, spec.seed);
    put<double>(os, spec.j_exc);
    put<double>(os, spec.g_rel);
    put<double>(os, spec.frac_excitatory);
    put<std::uint32_t>(os, part.n_ranks);
    put<std::uint32_t>(os, part.rank);
    const auto entries = table.entries();
    put<std::uint64_t>(os, entries.size());
    for (const auto& e : entries) {
        put<std::uint32_t>(os, e.source);
        put<std::uint32_t>(os, e.synapse.target);
        put<std::uint32_t>(os, e.synapse.delay);
        put<double>(os, e.synapse.weight);
    }
    if (!os) throw Error("write failed: " + path.string());
}

SynapseTable load_table(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError(0, "cannot open " + path.string());
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kTableMagic) throw ParseError(0, "bad synapse table magic");
    if (get<std::uint32_t>(is) != kTableVersion) throw ParseError(0, "unsupported table version");

    NetworkSpec spec;
    Partition part;
    spec.n_neurons = get<std::uint32_t>(is);
    spec.fan_out = get<std::uint32_t>(is);
    part.lo = get<std::uint32_t>(is);
    part.hi = get<std::uint32_t>(is);
    spec.d_min = get<std::uint32_t>(is);
    spec.d_max = get<std::uint32_t>(is);
    spec.seed = get<std::uint64_t>(is);
    spec.j_exc = get<double>(is);
    spec.g_rel = get<double>(is);
    spec.frac_excitatory = get<double>(is);
    part.n_ranks = get<std::uint32_t>(is);
    part.rank = get<std::uint32_t>(is);
    spec.validate();
    if (part.hi > spec.n_neurons || part.lo > part.hi) throw ParseError(0, "bad partition range");

    const auto count = get<std::uint64_t>(is);
    SynapseTable table;
    table.spec_ = spec;
    table.part_ = part;
    const std::uint32_t n_delays = spec.n_delays();
    table.offsets_.assign(static_cast<std::size_t>(spec.n_neurons) * n_delays + 1, 0);
    table.delay_mask_.assign(spec.n_neurons, 0);
    table.targets_.resize(count);

    // Entries arrive ordered by (source, delay, target), which is exactly the
    // bucket layout; count first, then prefix-sum.
    std::size_t last_bucket = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto source = get<std::uint32_t>(is);
        const auto target = get<std::uint32_t>(is);
        const auto delay = get<std::uint32_t>(is);
        get<double>(is);
        if (source >= spec.n_neurons || !part.owns(target) || delay < spec.d_min || delay > spec.d_max) {
            throw ParseError(0, "synapse entry " + std::to_string(i) + " out of range");
        }
        const auto b = table.bucket_index(source, delay);
        if (b < last_bucket) throw ParseError(0, "synapse entries out of order");
        last_bucket = b;
        ++table.offsets_[b + 1];
        table.targets_[i] = target - part.lo;
        table.delay_mask_[source] |= 1u << (delay - spec.d_min);
    }
    for (std::size_t i = 1; i < table.offsets_.size(); ++i) table.offsets_[i] += table.offsets_[i - 1];
    return table;
}

}  // namespace snn
