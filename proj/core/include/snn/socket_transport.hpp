#pragma once

// Full-mesh TCP transport. Every message is a frame:
//
//   u32 sender rank | u64 step | u32 payload bytes | payload
//
// little-endian, 16-byte header. Rank i dials every rank below it and
// accepts connections from every rank above it; the first frame on each
// connection is a hello (step = 2^64 - 1, empty payload) naming the dialer.
// A barrier is an empty frame to every peer followed by one from every peer.

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "snn/transport.hpp"

namespace snn {

struct PeerAddress {
    std::string host;
    std::uint16_t port = 0;

    friend bool operator==(const PeerAddress&, const PeerAddress&) = default;
};

/// One "host:port" per line in rank order; blank lines and '#' comments are
/// skipped. Throws ParseError with the offending line number.
std::vector<PeerAddress> load_peers(const std::filesystem::path& path);
std::vector<PeerAddress> parse_peers(const std::string& text);

inline constexpr std::size_t kFrameHeaderBytes = 16;
inline constexpr Step kHelloStep = ~Step{0};

struct FrameHeader {
    std::uint32_t sender = 0;
    Step step = 0;
    std::uint32_t payload_bytes = 0;

    friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

std::array<std::byte, kFrameHeaderBytes> encode_frame_header(const FrameHeader& header) noexcept;
FrameHeader decode_frame_header(std::span<const std::byte, kFrameHeaderBytes> bytes) noexcept;

/// Bound, listening TCP socket. Port 0 picks a free port.
class SocketListener {
public:
    explicit SocketListener(std::uint16_t port, const std::string& bind_host = "0.0.0.0");
    ~SocketListener();
    SocketListener(SocketListener&& other) noexcept;
    SocketListener& operator=(SocketListener&&) = delete;
    SocketListener(const SocketListener&) = delete;
    SocketListener& operator=(const SocketListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    int fd() const noexcept { return fd_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

class SocketTransport final : public Transport {
public:
    /// Builds the mesh. Blocks until every peer is connected or `timeout`
    /// elapses (ExchangeError naming the missing peer).
    static std::unique_ptr<SocketTransport> connect(int rank, const std::vector<PeerAddress>& peers,
                                                    SocketListener listener,
                                                    std::chrono::milliseconds timeout = kDefaultTransportTimeout);
    static std::unique_ptr<SocketTransport> connect(int rank, const std::vector<PeerAddress>& peers,
                                                    std::chrono::milliseconds timeout = kDefaultTransportTimeout);

    ~SocketTransport() override;

    int rank() const noexcept override { return rank_; }
    int n_ranks() const noexcept override { return static_cast<int>(fds_.size()); }

    void send(int peer, Step step, std::span<const std::byte> payload) override;
    std::vector<std::byte> recv(int peer, Step step) override;
    void barrier(Step step) override;

private:
    SocketTransport(int rank, int n_ranks, std::chrono::milliseconds timeout);

    void write_all(int peer, const std::byte* data, std::size_t size);
    void read_all(int peer, std::byte* data, std::size_t size);

    int rank_;
    std::chrono::milliseconds timeout_;
    std::vector<int> fds_;  // -1 for self
};

}  // namespace snn
