#include "snn/aer.hpp"

#include <limits>
#include <string>

#include "snn/error.hpp"

namespace snn {

namespace {

void store_le(std::byte* dst, std::uint64_t value, std::size_t width) noexcept {
    for (std::size_t i = 0; i < width; ++i) dst[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
}

std::uint64_t load_le(const std::byte* src, std::size_t width) noexcept {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < width; ++i) value |= std::to_integer<std::uint64_t>(src[i]) << (8 * i);
    return value;
}

}  // namespace

void encode_into(std::span<const AxonalSpike> spikes, std::vector<std::byte>& out) {
    const auto base = out.size();
    out.resize(base + spikes.size() * kSpikeWireBytes);
    std::byte* p = out.data() + base;
    for (const auto& s : spikes) {
        if (s.source > std::numeric_limits<std::uint32_t>::max()) {
            out.resize(base);
            throw EncodingError("spike source " + std::to_string(s.source) + " exceeds 32 bits");
        }
        store_le(p, s.source, 4);
        store_le(p + 4, s.step, 8);
        p += kSpikeWireBytes;
    }
}

std::vector<std::byte> encode(std::span<const AxonalSpike> spikes) {
    std::vector<std::byte> out;
    encode_into(spikes, out);
    return out;
}

std::vector<AxonalSpike> decode(std::span<const std::byte> payload) {
    if (payload.size() % kSpikeWireBytes != 0) {
        throw FramingError("payload of " + std::to_string(payload.size()) +
                           " bytes is not a whole number of 12-byte spikes");
    }
    std::vector<AxonalSpike> out(payload.size() / kSpikeWireBytes);
    const std::byte* p = payload.data();
    for (auto& s : out) {
        s.source = load_le(p, 4);
        s.step = load_le(p + 4, 8);
        p += kSpikeWireBytes;
    }
    return out;
}

}  // namespace snn
