#include "snn/transport.hpp"

#include <array>
#include <string>

#include "snn/error.hpp"

namespace snn {

namespace {

std::array<std::byte, 4> count_header(std::uint64_t count) {
    if (count > 0xffffffffULL) throw EncodingError("too many spikes for one message");
    std::array<std::byte, 4> h{};
    for (int i = 0; i < 4; ++i) h[i] = static_cast<std::byte>((count >> (8 * i)) & 0xff);
    return h;
}

std::uint32_t parse_count(int peer, std::span<const std::byte> bytes) {
    if (bytes.size() != 4) {
        throw ProtocolError("count header from rank " + std::to_string(peer) + " has " +
                            std::to_string(bytes.size()) + " bytes, expected 4");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

SpikeLists all_to_all(Transport& transport, Step step, const SpikeLists& outgoing) {
    const int n = transport.n_ranks();
    const int self = transport.rank();
    if (static_cast<int>(outgoing.size()) != n) {
        throw ContractError("all_to_all needs " + std::to_string(n) + " outgoing lists, got " +
                            std::to_string(outgoing.size()));
    }

    SpikeLists incoming(n);
    incoming[self] = outgoing[self];
    if (n == 1) return incoming;

    for (int peer = 0; peer < n; ++peer) {
        if (peer == self) continue;
        const auto h = count_header(outgoing[peer].size());
        transport.send(peer, step, h);
    }
    std::vector<std::uint32_t> counts(n, 0);
    for (int peer = 0; peer < n; ++peer) {
        if (peer == self) continue;
        counts[peer] = parse_count(peer, transport.recv(peer, step));
    }

    std::vector<std::byte> buffer;
    for (int peer = 0; peer < n; ++peer) {
        if (peer == self) continue;
        buffer.clear();
        encode_into(outgoing[peer], buffer);
        transport.send(peer, step, buffer);
    }
    for (int peer = 0; peer < n; ++peer) {
        if (peer == self) continue;
        const auto payload = transport.recv(peer, step);
        if (payload.size() != std::size_t{counts[peer]} * kSpikeWireBytes) {
            throw ProtocolError("rank " + std::to_string(peer) + " announced " +
                                std::to_string(counts[peer]) + " spikes but sent " +
                                std::to_string(payload.size()) + " bytes");
        }
        incoming[peer] = decode(payload);
    }
    return incoming;
}

}  // namespace snn
