#pragma once

// Address-event representation of an axonal spike on the wire: 4-byte
// source id followed by the 8-byte emission step, both little-endian.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snn/model.hpp"

namespace snn {

struct AxonalSpike {
    std::uint64_t source = 0;
    Step step = 0;

    friend bool operator==(const AxonalSpike&, const AxonalSpike&) = default;
    friend auto operator<=>(const AxonalSpike&, const AxonalSpike&) = default;
};

inline constexpr std::size_t kSpikeWireBytes = 12;

/// Throws EncodingError if a source id does not fit in 32 bits.
std::vector<std::byte> encode(std::span<const AxonalSpike> spikes);
void encode_into(std::span<const AxonalSpike> spikes, std::vector<std::byte>& out);

/// Throws FramingError unless the length is a multiple of 12.
std::vector<AxonalSpike> decode(std::span<const std::byte> payload);

}  // namespace snn
