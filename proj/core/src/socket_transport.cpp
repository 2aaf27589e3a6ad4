#include "snn/socket_transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "snn/error.hpp"

namespace snn {

namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text() { return std::strerror(errno); }

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() <= 0 ? 0 : static_cast<int>(left.count());
}

void tune_socket(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    int buf = 4 << 20;
    ::setsockopt(fd, SOL_SOCKET, SO_SNDBUF, &buf, sizeof(buf));
    ::setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &buf, sizeof(buf));
}

// Blocking read of exactly `size` bytes with an overall deadline.
// Returns false on orderly shutdown by the remote end.
bool read_exact(int fd, std::byte* data, std::size_t size, Clock::time_point deadline, bool& timed_out) {
    timed_out = false;
    std::size_t done = 0;
    while (done < size) {
        pollfd pfd{fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
        if (ready < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        if (ready == 0) {
            timed_out = true;
            return false;
        }
        const auto n = ::recv(fd, data + done, size - done, 0);
        if (n == 0) return false;
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

bool write_exact(int fd, const std::byte* data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const auto n = ::send(fd, data + done, size - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

int dial(const PeerAddress& addr, Clock::time_point deadline) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    const auto port = std::to_string(addr.port);
    for (;;) {
        addrinfo* result = nullptr;
        if (::getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &result) == 0) {
            for (auto* ai = result; ai != nullptr; ai = ai->ai_next) {
                const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
                if (fd < 0) continue;
                if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                    ::freeaddrinfo(result);
                    return fd;
                }
                ::close(fd);
            }
            ::freeaddrinfo(result);
        }
        if (Clock::now() >= deadline) return -1;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

}  // namespace

std::vector<PeerAddress> parse_peers(const std::string& text) {
    std::vector<PeerAddress> peers;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto colon = line.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == line.size()) {
            throw ParseError(line_no, "expected host:port, got '" + line + "'");
        }
        PeerAddress addr;
        addr.host = line.substr(0, colon);
        const auto port_text = line.substr(colon + 1);
        std::size_t used = 0;
        unsigned long port = 0;
        try {
            port = std::stoul(port_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != port_text.size() || port == 0 || port > 65535) {
            throw ParseError(line_no, "bad port '" + port_text + "'");
        }
        addr.port = static_cast<std::uint16_t>(port);
        peers.push_back(std::move(addr));
    }
    if (peers.empty()) throw ParseError(0, "peer list is empty");
    return peers;
}

std::vector<PeerAddress> load_peers(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open peer list " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_peers(text.str());
}

std::array<std::byte, kFrameHeaderBytes> encode_frame_header(const FrameHeader& h) noexcept {
    std::array<std::byte, kFrameHeaderBytes> out{};
    auto put = [&](std::size_t at, std::uint64_t v, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i) out[at + i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
    };
    put(0, h.sender, 4);
    put(4, h.step, 8);
    put(12, h.payload_bytes, 4);
    return out;
}

FrameHeader decode_frame_header(std::span<const std::byte, kFrameHeaderBytes> bytes) noexcept {
    auto get = [&](std::size_t at, std::size_t width) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) v |= std::to_integer<std::uint64_t>(bytes[at + i]) << (8 * i);
        return v;
    };
    return {static_cast<std::uint32_t>(get(0, 4)), get(4, 8), static_cast<std::uint32_t>(get(12, 4))};
}

SocketListener::SocketListener(std::uint16_t port, const std::string& bind_host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error("socket(): " + errno_text());
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw ConfigError("bad bind address " + bind_host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd_, 128) != 0) {
        const auto msg = errno_text();
        ::close(fd_);
        throw Error("cannot listen on port " + std::to_string(port) + ": " + msg);
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
    if (fd_ >= 0) ::close(fd_);
}

SocketListener::SocketListener(SocketListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
}

SocketTransport::SocketTransport(int rank, int n_ranks, std::chrono::milliseconds timeout)
    : rank_(rank), timeout_(timeout), fds_(n_ranks, -1) {}

SocketTransport::~SocketTransport() {
    for (int fd : fds_) {
        if (fd >= 0) ::close(fd);
    }
}

std::unique_ptr<SocketTransport> SocketTransport::connect(int rank, const std::vector<PeerAddress>& peers,
                                                          std::chrono::milliseconds timeout) {
    if (rank < 0 || rank >= static_cast<int>(peers.size())) throw ConfigError("rank not in peer list");
    return connect(rank, peers, SocketListener(peers[rank].port), timeout);
}

std::unique_ptr<SocketTransport> SocketTransport::connect(int rank, const std::vector<PeerAddress>& peers,
                                                          SocketListener listener,
                                                          std::chrono::milliseconds timeout) {
    const int n = static_cast<int>(peers.size());
    if (rank < 0 || rank >= n) throw ConfigError("rank not in peer list");
    std::unique_ptr<SocketTransport> t(new SocketTransport(rank, n, timeout));
    const auto deadline = Clock::now() + timeout;

    for (int peer = 0; peer < rank; ++peer) {
        const int fd = dial(peers[peer], deadline);
        if (fd < 0) throw ExchangeError(peer, "cannot connect to " + peers[peer].host + ":" +
                                                  std::to_string(peers[peer].port));
        tune_socket(fd);
        t->fds_[peer] = fd;
        const auto hello = encode_frame_header({static_cast<std::uint32_t>(rank), kHelloStep, 0});
        t->write_all(peer, hello.data(), hello.size());
    }

    for (int accepted = rank + 1; accepted < n; ++accepted) {
        pollfd pfd{listener.fd(), POLLIN, 0};
        if (::poll(&pfd, 1, remaining_ms(deadline)) <= 0) {
            throw ExchangeError(accepted, "no connection before timeout");
        }
        const int fd = ::accept(listener.fd(), nullptr, nullptr);
        if (fd < 0) throw Error("accept(): " + errno_text());
        tune_socket(fd);
        std::array<std::byte, kFrameHeaderBytes> raw{};
        bool timed_out = false;
        if (!read_exact(fd, raw.data(), raw.size(), deadline, timed_out)) {
            ::close(fd);
            throw ProtocolError("incoming connection sent no hello");
        }
        const auto hello = decode_frame_header(raw);
        const auto sender = static_cast<int>(hello.sender);
        if (hello.step != kHelloStep || hello.payload_bytes != 0 || sender <= rank || sender >= n ||
            t->fds_[sender] >= 0) {
            ::close(fd);
            throw ProtocolError("unexpected hello from rank " + std::to_string(hello.sender));
        }
        t->fds_[sender] = fd;
    }
    return t;
}

void SocketTransport::write_all(int peer, const std::byte* data, std::size_t size) {
    if (!write_exact(fds_[peer], data, size)) throw ExchangeError(peer, "send failed: " + errno_text());
}

void SocketTransport::read_all(int peer, std::byte* data, std::size_t size) {
    bool timed_out = false;
    if (!read_exact(fds_[peer], data, size, Clock::now() + timeout_, timed_out)) {
        throw ExchangeError(peer, timed_out ? "timed out" : "peer disconnected");
    }
}

void SocketTransport::send(int peer, Step step, std::span<const std::byte> payload) {
    if (peer < 0 || peer >= n_ranks() || peer == rank_) throw ContractError("invalid peer rank");
    if (payload.size() > 0xffffffffULL) throw EncodingError("payload too large for one frame");
    const auto header = encode_frame_header(
        {static_cast<std::uint32_t>(rank_), step, static_cast<std::uint32_t>(payload.size())});
    write_all(peer, header.data(), header.size());
    if (!payload.empty()) write_all(peer, payload.data(), payload.size());
    ++stats_.messages_sent;
    stats_.bytes_sent += payload.size();
}

std::vector<std::byte> SocketTransport::recv(int peer, Step step) {
    if (peer < 0 || peer >= n_ranks() || peer == rank_) throw ContractError("invalid peer rank");
    std::array<std::byte, kFrameHeaderBytes> raw{};
    read_all(peer, raw.data(), raw.size());
    const auto header = decode_frame_header(raw);
    if (static_cast<int>(header.sender) != peer) {
        throw ProtocolError("frame on rank " + std::to_string(peer) + "'s connection claims sender " +
                            std::to_string(header.sender));
    }
    if (header.step != step) {
        throw ProtocolError("rank " + std::to_string(peer) + " sent a frame for step " +
                            std::to_string(header.step) + " while step " + std::to_string(step) +
                            " was expected");
    }
    std::vector<std::byte> payload(header.payload_bytes);
    if (!payload.empty()) read_all(peer, payload.data(), payload.size());
    ++stats_.messages_received;
    stats_.bytes_received += payload.size();
    return payload;
}

void SocketTransport::barrier(Step step) {
    try {
        for (int peer = 0; peer < n_ranks(); ++peer) {
            if (peer != rank_) send(peer, step, {});
        }
        for (int peer = 0; peer < n_ranks(); ++peer) {
            if (peer == rank_) continue;
            if (!recv(peer, step).empty()) throw ProtocolError("barrier frame carried a payload");
        }
    } catch (const ExchangeError& e) {
        throw BarrierError("barrier at step " + std::to_string(step) + ": " + e.what());
    }
}

}  // namespace snn
