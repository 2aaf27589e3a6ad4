#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <vector>

#include "snn/transport.hpp"

namespace snn {

/// Shared rendezvous state for n ranks living in one process. Each rank
/// takes its endpoint once and drives it from its own thread.
class InprocHub {
public:
    explicit InprocHub(int n_ranks,
                       std::chrono::milliseconds timeout = kDefaultTransportTimeout);
    ~InprocHub();

    InprocHub(const InprocHub&) = delete;
    InprocHub& operator=(const InprocHub&) = delete;

    int n_ranks() const noexcept { return n_ranks_; }

    /// Endpoint for `rank`. Destroying an endpoint marks the rank as gone,
    /// which fails any peer still waiting on it.
    std::unique_ptr<Transport> endpoint(int rank);

private:
    friend class InprocTransport;

    struct Message {
        Step step;
        std::vector<std::byte> payload;
    };

    struct Channel {
        std::mutex mutex;
        std::condition_variable ready;
        std::deque<Message> queue;
    };

    Channel& channel(int from, int to) { return *channels_[static_cast<std::size_t>(from) * n_ranks_ + to]; }
    void depart(int rank);
    bool departed(int rank);

    int n_ranks_;
    std::chrono::milliseconds timeout_;
    std::vector<std::unique_ptr<Channel>> channels_;

    std::mutex state_mutex_;
    std::condition_variable barrier_cv_;
    std::vector<bool> taken_;
    std::vector<bool> departed_;
    int barrier_waiting_ = 0;
    std::uint64_t barrier_generation_ = 0;
};

}  // namespace snn
