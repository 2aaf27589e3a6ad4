#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snn/aer.hpp"

namespace snn {

struct TransportStats {
    std::uint64_t messages_sent = 0;
    std::uint64_t bytes_sent = 0;      // payload bytes, excluding framing
    std::uint64_t messages_received = 0;
    std::uint64_t bytes_received = 0;
};

/// Point-to-point endpoint owned by one rank. Delivery is reliable and
/// ordered per (sender, receiver) pair. Every message carries the step it
/// belongs to; recv() rejects a message stamped with a different step.
class Transport {
public:
    virtual ~Transport() = default;

    virtual int rank() const noexcept = 0;
    virtual int n_ranks() const noexcept = 0;

    virtual void send(int peer, Step step, std::span<const std::byte> payload) = 0;
    virtual std::vector<std::byte> recv(int peer, Step step) = 0;

    /// Returns only after every rank has entered the barrier for `step`.
    virtual void barrier(Step step) = 0;

    const TransportStats& stats() const noexcept { return stats_; }

protected:
    TransportStats stats_;
};

inline constexpr std::chrono::milliseconds kDefaultTransportTimeout{30'000};

using SpikeLists = std::vector<std::vector<AxonalSpike>>;

/// Variable-size all-to-all of spike lists. `outgoing[r]` goes to rank r;
/// the result's entry r is what rank r sent here. Phase one exchanges a
/// 4-byte little-endian spike count with every peer, phase two the encoded
/// payloads (empty ones included). The self entry never touches the transport.
SpikeLists all_to_all(Transport& transport, Step step, const SpikeLists& outgoing);

inline void barrier(Transport& transport, Step step) { transport.barrier(step); }

}  // namespace snn
